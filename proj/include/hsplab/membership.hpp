#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "hsplab/abelian.hpp"
#include "hsplab/error.hpp"
#include "hsplab/group.hpp"
#include "hsplab/linalg.hpp"
#include "hsplab/oracle.hpp"
#include "hsplab/sampler.hpp"

namespace hsplab {

/// Exponents alpha_i with 0 <= alpha_i < s_i, s_i the order of h_i.
struct ExponentTuple {
  std::vector<std::uint64_t> values;
  std::vector<std::uint64_t> moduli;
  friend bool operator==(const ExponentTuple&, const ExponentTuple&) = default;
};

struct MembershipAnswer {
  std::optional<ExponentTuple> expression;  // empty: NotMember
  bool is_member() const noexcept { return expression.has_value(); }
};

/// Looks for a kernel element with last coordinate coprime to s = moduli.back()
/// and returns its first r coordinates scaled so that the last one is 1.
/// Works on the SNF of the row of last coordinates, so no enumeration.
inline std::optional<ExponentTuple> extract_expression(std::span<const Tuple> kernel_gens,
                                                       std::span<const std::uint64_t> moduli) {
  if (moduli.empty()) return std::nullopt;
  const std::size_t r = moduli.size() - 1;
  const std::uint64_t s = moduli.back();
  const std::size_t t = kernel_gens.size();
  IntegerMatrix row(1, t + 1);
  for (std::size_t i = 0; i < t; ++i) row(0, i) = kernel_gens[i][r];
  row(0, t) = s;
  const SmithForm snf = smith_normal_form(row);
  // row * V e_0 = U^-1 d; d = 1 iff some combination has last coordinate 1.
  if (snf.D(0, 0) != 1) return std::nullopt;
  const BigInt sign = snf.U(0, 0);
  ExponentTuple out{std::vector<std::uint64_t>(r), std::vector<std::uint64_t>(moduli.begin(), moduli.begin() + static_cast<std::ptrdiff_t>(r))};
  for (std::size_t j = 0; j < r; ++j) {
    BigInt acc = 0;
    for (std::size_t i = 0; i < t; ++i) acc += sign * snf.V(i, 0) * kernel_gens[i][j];
    out.values[j] = detail::mod_big(acc, moduli[j]);
  }
  return out;
}

/// prod h_i^{alpha_i}
inline Element evaluate_expression(const BlackBoxGroup& G, std::span<const Element> hs, const ExponentTuple& alpha) {
  Element y = G.identity();
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (alpha.values[i]) y = G.multiply(y, G.power(hs[i], static_cast<std::int64_t>(alpha.values[i])));
  }
  return y;
}

/// Decides whether g lies in <h_1, ..., h_r> modulo whatever `modulo` labels
/// (nothing, a hidden normal subgroup, or a generated one) and, if so,
/// returns exponents. The h_i and g must commute in that quotient; this is
/// certified on pairs by label comparison, which is sound for the pairs
/// checked but says nothing about commutation with elements outside the
/// list. `known_orders`, when given, supplies the orders of the h_i.
inline MembershipAnswer constructive_membership(const BlackBoxGroup& G, std::span<const Element> hs, const Element& g,
                                                Labeler& modulo, Simulator& sim,
                                                std::span<const std::uint64_t> known_orders = {}) {
  const std::size_t r = hs.size();
  std::vector<Element> all(hs.begin(), hs.end());
  all.push_back(g);
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (modulo.eval(G.multiply(all[i], all[j])) != modulo.eval(G.multiply(all[j], all[i]))) {
        fail(ErrorCode::NotCommuting, "elements " + std::to_string(i) + " and " + std::to_string(j) + " do not commute");
      }
    }
  }

  // Failure budget split evenly over the order computations and the kernel.
  const std::size_t calls = (known_orders.size() == r ? 1 : r + 1) + 1;
  EpsilonScope scope(sim, sim.config().epsilon / static_cast<double>(calls));

  std::vector<std::uint64_t> orders;
  for (std::size_t i = 0; i < r; ++i) {
    orders.push_back(known_orders.size() == r ? known_orders[i] : find_order(G, hs[i], modulo, sim));
  }
  orders.push_back(find_order(G, g, modulo, sim));

  // Power tables: h_i^a and g^{-a}.
  std::vector<std::vector<Element>> tables;
  for (std::size_t i = 0; i < r; ++i) tables.push_back(power_table(G, hs[i], orders[i]));
  tables.push_back(power_table(G, G.invert(g), orders[r]));
  auto phi = [&G, &tables](const Tuple& a) {
    Element y = G.identity();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i]) y = G.multiply(y, tables[i][a[i]]);
    }
    return y;
  };
  const QuantumFunctionOracle f = compose_oracle(AbelianStructure{orders}, modulo, phi);

  const Label target = modulo.eval(g);
  for (std::size_t attempt = 0; attempt <= sim.config().max_retries; ++attempt) {
    const auto kernel = abelian_hsp(f, sim);
    auto alpha = extract_expression(kernel, orders);
    // A kernel estimate only ever errs on the large side, so NotFound is
    // final; a found expression is checked before it is returned.
    if (!alpha) return {};
    if (modulo.eval(evaluate_expression(G, hs, *alpha)) == target) return {std::move(alpha)};
  }
  fail(ErrorCode::RoundBudgetExceeded, "membership expression failed verification repeatedly");
}

/// Unique-encoding mode: equality in G itself.
inline MembershipAnswer membership_unique(const BlackBoxGroup& G, std::span<const Element> hs, const Element& g,
                                          Simulator& sim) {
  CanonicalLabeler labels(G);
  return constructive_membership(G, hs, g, labels, sim);
}

/// Modulo the normal subgroup hidden by f.
inline MembershipAnswer membership_mod_hidden(const BlackBoxGroup& G, std::span<const Element> hs, const Element& g,
                                              Labeler& f, Simulator& sim) {
  return constructive_membership(G, hs, g, f, sim);
}

/// Modulo the normal subgroup generated by N_gens.
inline MembershipAnswer membership_mod_generated(const BlackBoxGroup& G, std::span<const Element> hs, const Element& g,
                                                 std::span<const Element> N_gens, Simulator& sim) {
  CosetLabeler labels(G, N_gens, sim.config().enum_bound);
  return constructive_membership(G, hs, g, labels, sim);
}

}  // namespace hsplab
