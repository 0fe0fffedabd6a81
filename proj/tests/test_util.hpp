#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "hsplab/hsplab.hpp"

namespace hsplab::testing {

inline BlackBoxGroup S(std::size_t n, std::vector<std::string> gens) { return make_group(permutation_spec(n, gens)); }

inline Element perm(const BlackBoxGroup& G, const std::string& cycles) { return G.parse(cycles); }

/// Canonical keys of <gens>, sorted.
inline std::set<Bits> key_set(const BlackBoxGroup& G, const std::vector<Element>& gens) {
  std::set<Bits> out;
  for (const auto& e : enumerate_closure(G, gens)) out.insert(G.canonical(e));
  return out;
}

inline std::set<Bits> key_set_of_elements(const BlackBoxGroup& G, const std::vector<Element>& elems) {
  std::set<Bits> out;
  for (const auto& e : elems) out.insert(G.canonical(e));
  return out;
}

/// Dihedral group of order 2n acting on n points.
inline BlackBoxGroup dihedral(std::size_t n) {
  std::string rot = "(";
  for (std::size_t i = 1; i <= n; ++i) rot += std::to_string(i) + (i < n ? " " : ")");
  std::string refl;
  for (std::size_t i = 1; i <= n / 2; ++i) {
    const std::size_t j = n + 1 - i;
    if (i != j) refl += "(" + std::to_string(i) + " " + std::to_string(j) + ")";
  }
  return make_group(permutation_spec(n, {rot, refl}, "D" + std::to_string(2 * n)));
}

/// Quaternion group Q8 in its regular representation on 8 points.
/// Points: 1=1, 2=i, 3=j, 4=k, 5=-1, 6=-i, 7=-j, 8=-k; generators are left
/// multiplication by i and by j.
inline BlackBoxGroup quaternion() {
  return make_group(permutation_spec(8, {"(1 2 5 6)(3 8 7 4)", "(1 3 5 7)(2 4 6 8)"}, "Q8"));
}

inline Tuple T(std::initializer_list<std::uint64_t> v) { return Tuple(v); }

/// Brute-force subgroup of a tuple group given by generators.
inline std::set<Tuple> tuple_closure(const AbelianStructure& A, const std::vector<Tuple>& gens) {
  const auto v = enumerate_tuples(A, gens);
  return {v.begin(), v.end()};
}

}  // namespace hsplab::testing

namespace hsplab::testing {

/// Tuple-indexed view of f on an `abelian` backend group.
inline QuantumFunctionOracle tuple_oracle(const BlackBoxGroup& G, Labeler& f) {
  const auto& backend = dynamic_cast<const AbelianBackend&>(G.backend());
  return compose_oracle(AbelianStructure{backend.moduli()}, f, [&backend](const Tuple& t) { return backend.make(t); });
}

inline std::vector<Element> tuples_to_elements(const BlackBoxGroup& G, const std::vector<Tuple>& ts) {
  const auto& backend = dynamic_cast<const AbelianBackend&>(G.backend());
  std::vector<Element> out;
  for (const auto& t : ts) out.push_back(backend.make(t));
  return out;
}

}  // namespace hsplab::testing
