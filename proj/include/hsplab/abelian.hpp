#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hsplab/error.hpp"
#include "hsplab/group.hpp"
#include "hsplab/linalg.hpp"

namespace hsplab {

using Tuple = std::vector<std::uint64_t>;

/// Z_{m1} x ... x Z_{mk}.
struct AbelianStructure {
  std::vector<std::uint64_t> moduli;

  std::size_t rank() const noexcept { return moduli.size(); }

  std::uint64_t order() const {
    std::uint64_t n = 1;
    for (auto m : moduli) n *= m;
    return n;
  }
  /// lcm of the moduli.
  std::uint64_t exponent() const {
    std::uint64_t l = 1;
    for (auto m : moduli) l = std::lcm(l, m);
    return l;
  }

  /// Mixed-radix index, first coordinate most significant.
  std::uint64_t index(const Tuple& t) const {
    std::uint64_t i = 0;
    for (std::size_t j = 0; j < moduli.size(); ++j) i = i * moduli[j] + t[j];
    return i;
  }
  Tuple at(std::uint64_t i) const {
    Tuple t(moduli.size());
    for (std::size_t j = moduli.size(); j-- > 0;) {
      t[j] = i % moduli[j];
      i /= moduli[j];
    }
    return t;
  }

  Tuple zero() const { return Tuple(moduli.size(), 0); }
  Tuple add(const Tuple& a, const Tuple& b) const {
    Tuple c(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) c[j] = (a[j] + b[j]) % moduli[j];
    return c;
  }
  Tuple scale(const Tuple& a, std::uint64_t s) const {
    Tuple c(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) c[j] = static_cast<std::uint64_t>((static_cast<unsigned __int128>(a[j]) * s) % moduli[j]);
    return c;
  }
  /// Order of a tuple: lcm over coordinates of m_j / gcd(t_j, m_j).
  std::uint64_t element_order(const Tuple& t) const {
    std::uint64_t o = 1;
    for (std::size_t j = 0; j < t.size(); ++j) o = std::lcm(o, moduli[j] / std::gcd(t[j], moduli[j]));
    return o;
  }
  /// Pairing sum_j c_j x_j (M/m_j) mod M; zero iff chi_c(x) = 1.
  std::uint64_t pairing(const Tuple& c, const Tuple& x) const {
    const std::uint64_t M = exponent();
    unsigned __int128 s = 0;
    for (std::size_t j = 0; j < c.size(); ++j) s += static_cast<unsigned __int128>(c[j]) * x[j] % M * (M / moduli[j]) % M;
    return static_cast<std::uint64_t>(s % M);
  }

  friend bool operator==(const AbelianStructure&, const AbelianStructure&) = default;
};

/// A character chi_c(x) = exp(2 pi i sum_j c_j x_j / m_j) of an Abelian
/// group, stored by its coefficients.
using CharacterVector = Tuple;

/// All elements of <gens> inside A (breadth-first, zero first).
inline std::vector<Tuple> enumerate_tuples(const AbelianStructure& A, std::span<const Tuple> gens) {
  std::vector<Tuple> out{A.zero()};
  std::vector<bool> seen(A.order(), false);
  seen[A.index(A.zero())] = true;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& g : gens) {
      Tuple y = A.add(out[i], g);
      const auto idx = A.index(y);
      if (!seen[idx]) {
        seen[idx] = true;
        out.push_back(std::move(y));
      }
    }
  }
  return out;
}

/// Result of intersecting the annihilators of a set of vectors.
struct AnnihilatorResult {
  std::vector<Tuple> generators;  // nonzero generators
  Lattice lattice;                // preimage in Z^k (contains diag(moduli))
  std::uint64_t order = 1;        // size of the subgroup of A
};

/// {x in A : sum_j c_j x_j (M/m_j) = 0 mod M for every c in rows}. The
/// pairing is symmetric, so this computes both H^perp (rows = generators of
/// H) and joint character kernels (rows = characters).
inline AnnihilatorResult annihilator(const AbelianStructure& A, std::span<const Tuple> rows) {
  const std::size_t k = A.rank();
  const std::size_t t = rows.size();
  std::vector<std::vector<BigInt>> lattice_rows;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<BigInt> e(k);
    e[j] = A.moduli[j];
    lattice_rows.push_back(std::move(e));
  }
  if (t > 0 && k > 0) {
    const BigInt M = A.exponent();
    // [W | M I] (x, y)^T = 0 with W_ij = c_ij (M / m_j).
    IntegerMatrix B(t, k + t);
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t j = 0; j < k; ++j) B(i, j) = BigInt(rows[i][j]) * (M / A.moduli[j]);
      B(i, k + i) = M;
    }
    for (const auto& v : integer_kernel(B)) lattice_rows.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
  } else if (k > 0) {
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<BigInt> e(k);
      e[j] = 1;
      lattice_rows.push_back(std::move(e));
    }
  }
  AnnihilatorResult r;
  if (k == 0) return r;
  r.lattice = Lattice::from_rows(k, std::move(lattice_rows));
  BigInt order = 1;
  for (auto m : A.moduli) order *= m;
  order /= r.lattice.determinant();
  r.order = static_cast<std::uint64_t>(order);
  for (const auto& b : r.lattice.basis()) {
    Tuple g(k);
    bool nonzero = false;
    for (std::size_t j = 0; j < k; ++j) {
      BigInt v = b[j] % A.moduli[j];
      if (v < 0) v += A.moduli[j];
      g[j] = static_cast<std::uint64_t>(v);
      nonzero = nonzero || g[j] != 0;
    }
    if (nonzero) r.generators.push_back(std::move(g));
  }
  return r;
}

/// Generators of H^perp for H = <H_gens>.
inline std::vector<CharacterVector> dual_subgroup(const AbelianStructure& A, std::span<const Tuple> H_gens) {
  return annihilator(A, H_gens).generators;
}

/// Generators of {x : chi_c(x) = 1 for every sampled c}.
inline std::vector<Tuple> solve_character_kernel(const AbelianStructure& A, std::span<const CharacterVector> samples) {
  return annihilator(A, samples).generators;
}

// ---------------------------------------------------------------------------
// Brute-force structure of an enumerable Abelian subgroup of a black-box
// group. Classical stand-in for quantum decomposition; replaceable by the
// quantum algorithm without changing callers.

struct AbelianDecomposition {
  AbelianStructure structure;           // prime-power moduli, ascending
  std::vector<Element> basis;           // one generator per cyclic factor
  std::unordered_map<Element, Tuple, BitsHash> to_tuple;  // keyed by canonical encoding

  Element from_tuple(const BlackBoxGroup& G, const Tuple& t) const {
    Element x = G.identity();
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i]) x = G.multiply(x, G.power(basis[i], static_cast<std::int64_t>(t[i])));
    }
    return x;
  }
  const Tuple& tuple_of(const BlackBoxGroup& G, const Element& x) const { return to_tuple.at(G.canonical(x)); }
};

namespace detail {

inline std::vector<std::pair<std::uint64_t, std::uint64_t>> factor_prime_powers(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;  // (p, p^a)
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    std::uint64_t q = 1;
    while (n % p == 0) {
      n /= p;
      q *= p;
    }
    out.emplace_back(p, q);
  }
  if (n > 1) out.emplace_back(n, n);
  return out;
}

inline std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  std::int64_t t = 0, nt = 1;
  std::int64_t r = static_cast<std::int64_t>(m), nr = static_cast<std::int64_t>(a % m);
  while (nr != 0) {
    const auto q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  if (r != 1) throw std::logic_error("inverse_mod: not invertible");
  return static_cast<std::uint64_t>((t % static_cast<std::int64_t>(m) + static_cast<std::int64_t>(m)) % static_cast<std::int64_t>(m));
}

inline std::uint64_t mod_big(const BigInt& v, std::uint64_t m) {
  BigInt r = v % m;
  if (r < 0) r += m;
  return static_cast<std::uint64_t>(r);
}

}  // namespace detail

inline AbelianDecomposition decompose_abelian(const BlackBoxGroup& G, std::span<const Element> gens,
                                              std::size_t bound = default_enum_bound()) {
  if (!is_abelian(G, gens)) fail(ErrorCode::NotAbelian, "generators do not commute");
  const std::size_t r = gens.size();

  // Relation lattice by adjoining one generator at a time: if t is minimal
  // with g^t in the current subgroup, the new relations are generated by the
  // old ones and t e_g - vec(g^t).
  std::unordered_map<Element, std::vector<std::int64_t>, BitsHash> exps;
  std::vector<Element> elems{G.identity()};
  exps.emplace(G.canonical(G.identity()), std::vector<std::int64_t>(r, 0));
  std::vector<std::vector<BigInt>> relations;
  for (std::size_t i = 0; i < r; ++i) {
    std::uint64_t t = 1;
    Element gt = gens[i];
    while (!exps.contains(G.canonical(gt))) {
      gt = G.multiply(gt, gens[i]);
      ++t;
      if (t * elems.size() > bound) fail(ErrorCode::BoundExceeded, "Abelian subgroup larger than " + std::to_string(bound));
    }
    std::vector<BigInt> rel(r);
    const auto& v = exps.at(G.canonical(gt));
    for (std::size_t j = 0; j < r; ++j) rel[j] = -BigInt(v[j]);
    rel[i] += t;
    relations.push_back(std::move(rel));

    const std::size_t old = elems.size();
    Element ga = G.identity();
    for (std::uint64_t a = 1; a < t; ++a) {
      ga = G.multiply(ga, gens[i]);
      for (std::size_t e = 0; e < old; ++e) {
        Element y = G.multiply(elems[e], ga);
        auto vec = exps.at(G.canonical(elems[e]));
        vec[i] += static_cast<std::int64_t>(a);
        exps.emplace(G.canonical(y), std::move(vec));
        elems.push_back(std::move(y));
      }
    }
  }

  AbelianDecomposition out;
  if (r == 0 || elems.size() == 1) {
    out.to_tuple.emplace(G.canonical(G.identity()), Tuple{});
    return out;
  }

  IntegerMatrix R(relations.size(), r);
  for (std::size_t i = 0; i < relations.size(); ++i) {
    for (std::size_t j = 0; j < r; ++j) R(i, j) = relations[i][j];
  }
  const SmithForm s = smith_normal_form(R);

  struct Factor {
    std::uint64_t q;       // prime power
    std::size_t inv;       // index of invariant factor
    std::uint64_t d;       // invariant factor
    Element generator;
  };
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < r; ++i) {
    const std::uint64_t d = static_cast<std::uint64_t>(s.D(i, i));
    if (d <= 1) continue;
    // Factor i is generated by the image of row i of V^-1.
    Element t = G.identity();
    for (std::size_t j = 0; j < r; ++j) {
      const std::uint64_t e = detail::mod_big(s.V_inv(i, j), elems.size());
      if (e) t = G.multiply(t, G.power(gens[j], static_cast<std::int64_t>(e)));
    }
    for (const auto& [p, q] : detail::factor_prime_powers(d)) {
      factors.push_back({q, i, d, G.power(t, static_cast<std::int64_t>(d / q))});
    }
  }
  std::stable_sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) { return a.q < b.q; });

  for (const auto& f : factors) {
    out.structure.moduli.push_back(f.q);
    out.basis.push_back(f.generator);
  }
  for (const auto& e : elems) {
    const auto& x = exps.at(G.canonical(e));
    Tuple tup;
    for (const auto& f : factors) {
      // y_i = (x V)_i mod d; Z_d -> Z_q coordinate is y_i (d/q)^-1 mod q.
      BigInt y = 0;
      for (std::size_t j = 0; j < r; ++j) y += BigInt(x[j]) * s.V(j, f.inv);
      const std::uint64_t yi = detail::mod_big(y, f.d);
      tup.push_back(static_cast<std::uint64_t>(static_cast<unsigned __int128>(yi % f.q) * detail::inverse_mod((f.d / f.q) % f.q, f.q) % f.q));
    }
    out.to_tuple.emplace(G.canonical(e), std::move(tup));
  }
  return out;
}

}  // namespace hsplab
