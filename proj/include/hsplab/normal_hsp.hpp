#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hsplab/abelian.hpp"
#include "hsplab/error.hpp"
#include "hsplab/group.hpp"
#include "hsplab/linalg.hpp"
#include "hsplab/membership.hpp"
#include "hsplab/oracle.hpp"
#include "hsplab/sampler.hpp"

// Hidden normal subgroups with Abelian quotient G/N. General quotients
// need machinery this library does not provide; such inputs are refused
// with QuotientNotAbelian.

namespace hsplab {

struct Relator {
  enum class Kind { power, commutator } kind;
  std::size_t i = 0;
  std::size_t j = 0;         // commutator partner
  std::uint64_t exponent = 0;  // power relator t_i^exponent
};

/// Generators T of G/N (as elements of G), their orders modulo N and the
/// relators t_i^{d_i}, [t_i, t_j].
struct AbelianPresentation {
  std::vector<Element> T;
  std::vector<std::uint64_t> moduli;
  std::vector<Relator> relators;
};

inline AbelianPresentation abelian_quotient_presentation(const BlackBoxGroup& G, Labeler& f, Simulator& sim) {
  const auto& S = G.generators();
  const std::size_t r = S.size();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      if (f.eval(G.multiply(S[i], S[j])) != f.eval(G.multiply(S[j], S[i]))) {
        fail(ErrorCode::QuotientNotAbelian, "generators " + std::to_string(i) + " and " + std::to_string(j) + " do not commute modulo N");
      }
    }
  }
  const Label id = f.eval(G.identity());

  for (std::size_t attempt = 0; attempt <= sim.config().max_retries; ++attempt) {
    EpsilonScope scope(sim, sim.config().epsilon / static_cast<double>(r + 1));
    std::vector<std::uint64_t> orders;
    for (const auto& s : S) orders.push_back(find_order(G, s, f, sim));

    std::vector<std::vector<Element>> tables;
    for (std::size_t j = 0; j < r; ++j) tables.push_back(power_table(G, S[j], orders[j]));
    const QuantumFunctionOracle phi = compose_oracle(AbelianStructure{orders}, f, [&G, &tables](const Tuple& a) {
      Element y = G.identity();
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j]) y = G.multiply(y, tables[j][a[j]]);
      }
      return y;
    });
    const auto kernel = abelian_hsp(phi, sim);

    // Relation lattice: kernel generators plus o_j e_j.
    IntegerMatrix R(kernel.size() + r, r);
    for (std::size_t i = 0; i < kernel.size(); ++i) {
      for (std::size_t j = 0; j < r; ++j) R(i, j) = kernel[i][j];
    }
    for (std::size_t j = 0; j < r; ++j) R(kernel.size() + j, j) = orders[j];
    const SmithForm snf = smith_normal_form(R);

    // The t_i (one per row of V^-1) generate G/N, since V^-1 is unimodular.
    // A kernel estimate can only be too large, which makes prod d_i too
    // small; t_i^{d_i} in N for every i, including d_i = 1, rules that out.
    AbelianPresentation P;
    bool ok = true;
    for (std::size_t i = 0; i < r && ok; ++i) {
      const std::uint64_t d = static_cast<std::uint64_t>(snf.D(i, i));
      Element t = G.identity();
      for (std::size_t j = 0; j < r; ++j) {
        const std::uint64_t e = detail::mod_big(snf.V_inv(i, j), orders[j]);
        if (e) t = G.multiply(t, tables[j][e]);
      }
      ok = f.eval(G.power(t, static_cast<std::int64_t>(d))) == id;
      if (d <= 1) continue;
      P.T.push_back(std::move(t));
      P.moduli.push_back(d);
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < P.T.size(); ++i) P.relators.push_back({Relator::Kind::power, i, i, P.moduli[i]});
    for (std::size_t i = 0; i < P.T.size(); ++i) {
      for (std::size_t j = i + 1; j < P.T.size(); ++j) P.relators.push_back({Relator::Kind::commutator, i, j, 0});
    }
    return P;
  }
  fail(ErrorCode::RoundBudgetExceeded, "quotient presentation failed verification repeatedly");
}

/// Relators evaluated in G (not modulo N).
inline std::vector<Element> relator_values(const BlackBoxGroup& G, const AbelianPresentation& P) {
  std::vector<Element> out;
  for (const auto& rel : P.relators) {
    if (rel.kind == Relator::Kind::power) {
      out.push_back(G.power(P.T[rel.i], static_cast<std::int64_t>(rel.exponent)));
    } else {
      out.push_back(G.commutator(P.T[rel.i], P.T[rel.j]));
    }
  }
  return out;
}

/// y^-1 x for each x in S, where y is x rewritten over T modulo N.
inline std::vector<Element> generator_quotients(const BlackBoxGroup& G, Labeler& f, const AbelianPresentation& P,
                                                std::span<const Element> S, Simulator& sim) {
  std::vector<Element> out;
  EpsilonScope scope(sim, sim.config().epsilon / static_cast<double>(std::max<std::size_t>(1, S.size())));
  for (const auto& x : S) {
    const MembershipAnswer a = constructive_membership(G, P.T, x, f, sim, P.moduli);
    if (!a.is_member()) fail(ErrorCode::ExpressFailure, "generator not expressible over the quotient presentation");
    const Element y = evaluate_expression(G, P.T, *a.expression);
    out.push_back(G.multiply(G.invert(y), x));
  }
  return out;
}

struct NormalGenerators {
  std::vector<Element> gens;
  std::optional<ElementSet> closure;  // enumerated normal closure
};

struct NormalClosureOptions {
  bool randomized = false;
  Rng* rng = nullptr;            // required for the randomized variant
  std::size_t stall_rounds = 40; // randomized: stop after this many non-growing rounds
};

/// Smallest normal subgroup containing `seeds`. The deterministic variant
/// closes the generator list under conjugation by G's generators; the
/// randomized one conjugates random subproducts by random subproducts until
/// the subgroup stops growing.
inline NormalGenerators normal_closure(const BlackBoxGroup& G, std::span<const Element> seeds,
                                       std::size_t bound = default_enum_bound(), NormalClosureOptions opt = {}) {
  NormalGenerators out;
  ElementSet closure;
  closure.insert(G, G.identity());
  for (const auto& s : seeds) extend_closure(G, closure, out.gens, s, bound);
  const auto& S = G.generators();

  if (opt.randomized) {
    if (!opt.rng) throw std::invalid_argument("normal_closure: randomized variant needs an rng");
    auto subproduct = [&](std::span<const Element> xs) {
      Element w = G.identity();
      for (const auto& x : xs) {
        if (opt.rng->below(2)) w = G.multiply(w, x);
      }
      return w;
    };
    std::size_t stalled = 0;
    while (stalled < opt.stall_rounds) {
      if (out.gens.empty()) break;
      const Element w = subproduct(out.gens);
      const Element u = subproduct(S);
      const Element c = G.conjugate(w, u);
      if (closure.contains(G, c)) {
        ++stalled;
      } else {
        extend_closure(G, closure, out.gens, c, bound);
        stalled = 0;
      }
    }
  } else {
    for (std::size_t i = 0; i < out.gens.size(); ++i) {
      const Element x = out.gens[i];
      for (const auto& s : S) {
        const Element c = G.conjugate(x, s);
        if (!closure.contains(G, c)) extend_closure(G, closure, out.gens, c, bound);
      }
    }
  }
  out.closure = std::move(closure);
  return out;
}

/// N = {g : f(g) = f(e)} for f hiding a normal subgroup with Abelian
/// quotient: the normal closure of relator values and generator quotients.
inline NormalGenerators hidden_normal_subgroup(const BlackBoxGroup& G, Labeler& f, Simulator& sim) {
  EpsilonScope scope(sim, sim.config().epsilon / 2);
  const AbelianPresentation P = abelian_quotient_presentation(G, f, sim);
  std::vector<Element> seeds = relator_values(G, P);
  for (auto& q : generator_quotients(G, f, P, G.generators(), sim)) seeds.push_back(std::move(q));
  return normal_closure(G, seeds, sim.config().enum_bound);
}

}  // namespace hsplab
