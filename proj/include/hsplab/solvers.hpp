#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsplab/abelian.hpp"
#include "hsplab/budget.hpp"
#include "hsplab/error.hpp"
#include "hsplab/group.hpp"
#include "hsplab/membership.hpp"
#include "hsplab/normal_hsp.hpp"
#include "hsplab/oracle.hpp"
#include "hsplab/sampler.hpp"

namespace hsplab {

struct SolverDiagnostics {
  std::uint64_t commutator_order = 0;   // |G'| (commutator solver)
  std::uint64_t normal_order = 0;       // |N| (elem-2 solvers)
  std::uint64_t quotient_order = 0;     // |G/N| (elem-2 solvers)
  std::vector<Element> V;               // coset representatives probed
  std::vector<Element> intersection;    // generators of H ∩ G' or H ∩ N
  std::vector<Element> picks;           // one element of H per successful probe
  std::uint64_t query_budget = 0;
};

struct SubgroupResult {
  std::vector<Element> gens;
  QueryStats stats;
  std::string method;
  SolverDiagnostics diagnostics;
};

struct CosetPick {
  Element z;
  std::optional<Element> u;  // u in N with u^-1 z in H
};

namespace detail {

inline QueryStats snapshot(const BlackBoxGroup& G, const Labeler& f, Simulator& sim) {
  return {f.query_count(), G.group_ops(), sim.rng().draws(), f.sim_count()};
}

/// Keeps only elements that enlarge the generated subgroup.
inline std::vector<Element> prune_generators(const BlackBoxGroup& G, std::span<const Element> xs, std::size_t bound) {
  ElementSet closure;
  closure.insert(G, G.identity());
  std::vector<Element> gens;
  for (const auto& x : xs) extend_closure(G, closure, gens, x, bound);
  return gens;
}

/// Product-replacement random elements.
class RandomElements {
 public:
  RandomElements(const BlackBoxGroup& G, Rng& rng) : G_(G), rng_(rng) {
    const auto& S = G.generators();
    while (slots_.size() < std::max<std::size_t>(10, S.size())) slots_.push_back(S[slots_.size() % S.size()]);
    acc_ = G.identity();
    for (int i = 0; i < 50; ++i) next();
  }
  Element next() {
    const std::size_t n = slots_.size();
    const std::size_t i = rng_.below(n);
    std::size_t j = rng_.below(n - 1);
    if (j >= i) ++j;
    slots_[i] = rng_.below(2) ? G_.multiply(slots_[i], slots_[j]) : G_.multiply(slots_[i], G_.invert(slots_[j]));
    acc_ = G_.multiply(acc_, slots_[i]);
    return acc_;
  }

 private:
  const BlackBoxGroup& G_;
  Rng& rng_;
  std::vector<Element> slots_;
  Element acc_;
};

/// F(x) = sorted labels of f over xG'. One F call is |G'| calls of f, each
/// on the whole batch.
class CommutatorCosetLabeler final : public Labeler {
 public:
  CommutatorCosetLabeler(const BlackBoxGroup& G, Labeler& f, std::vector<Element> commutator_subgroup)
      : G_(G), f_(f), D_(std::move(commutator_subgroup)) {}

  std::vector<Label> query(std::span<const Element> xs) override {
    ++queries_;
    return evaluate(xs, true);
  }
  std::vector<Label> simulate(std::span<const Element> xs) override { return evaluate(xs, false); }
  std::uint64_t query_count() const override { return queries_; }

 private:
  std::vector<Label> evaluate(std::span<const Element> xs, bool charged) {
    std::vector<std::vector<Label>> per_x(xs.size());
    std::vector<Element> batch(xs.size());
    for (const auto& g : D_) {
      for (std::size_t i = 0; i < xs.size(); ++i) batch[i] = G_.multiply(xs[i], g);
      auto labels = charged ? f_.query(batch) : f_.simulate(batch);
      for (std::size_t i = 0; i < xs.size(); ++i) per_x[i].push_back(std::move(labels[i]));
    }
    std::vector<Label> out;
    out.reserve(xs.size());
    for (auto& ls : per_x) {
      std::sort(ls.begin(), ls.end());
      Label joined;
      for (const auto& l : ls) joined = joined.concat(l);
      out.push_back(std::move(joined));
    }
    return out;
  }

  const BlackBoxGroup& G_;
  Labeler& f_;
  std::vector<Element> D_;
  std::uint64_t queries_ = 0;
};

/// Enumerated elementary Abelian 2-subgroup N with a basis, after the
/// structural checks the elem-2 solvers require.
inline AbelianDecomposition checked_elem2_normal(const BlackBoxGroup& G, std::span<const Element> N_gens,
                                                 std::size_t bound) {
  for (const auto& n : N_gens) {
    if (!G.is_identity(G.multiply(n, n))) fail(ErrorCode::NotElementaryAbelian2, "normal generator of order > 2");
  }
  if (!is_abelian(G, N_gens)) fail(ErrorCode::NotElementaryAbelian2, "normal generators do not commute");
  AbelianDecomposition dec = decompose_abelian(G, N_gens, bound);
  for (const auto& n : N_gens) {
    for (const auto& s : G.generators()) {
      if (!dec.to_tuple.contains(G.canonical(G.conjugate(n, s)))) fail(ErrorCode::NotNormal, "N is not normal in G");
    }
  }
  return dec;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Generators of H ∩ N for N Abelian and enumerated: the Abelian HSP on N
/// with f restricted to it. Each generator is checked against f(e) and the
/// search repeated if one fails.
inline std::vector<Element> intersect_with_normal(const BlackBoxGroup& G, const AbelianDecomposition& N, Labeler& f,
                                                  Simulator& sim) {
  const Label id = f.eval(G.identity());
  const QuantumFunctionOracle phi = compose_oracle(N.structure, f, [&G, &N](const Tuple& t) { return N.from_tuple(G, t); });
  for (std::size_t attempt = 0; attempt <= sim.config().max_retries; ++attempt) {
    std::vector<Element> out;
    bool ok = true;
    for (const auto& t : abelian_hsp(phi, sim)) {
      Element x = N.from_tuple(G, t);
      if (f.eval(x) != id) {
        ok = false;
        break;
      }
      out.push_back(std::move(x));
    }
    if (ok) return out;
  }
  fail(ErrorCode::RoundBudgetExceeded, "H ∩ N failed verification repeatedly");
}

/// For N elementary Abelian 2: F(0,x) = f(x), F(1,x) = f(xz) on Z_2 x N. A
/// kernel element (1,u) means f(uz) = f(e), so u^-1 z = uz lies in zN ∩ H.
/// u is only determined modulo H ∩ N.
inline CosetPick coset_intersection_pick(const BlackBoxGroup& G, const AbelianDecomposition& N, Labeler& f,
                                         const Element& z, Simulator& sim) {
  CosetPick pick{z, std::nullopt};
  const Label id = f.eval(G.identity());
  AbelianStructure A;
  A.moduli.push_back(2);
  for (auto m : N.structure.moduli) A.moduli.push_back(m);
  const QuantumFunctionOracle F = compose_oracle(A, f, [&G, &N, &z](const Tuple& t) {
    const Element x = N.from_tuple(G, Tuple(t.begin() + 1, t.end()));
    return t[0] ? G.multiply(x, z) : x;
  });
  for (std::size_t attempt = 0; attempt <= sim.config().max_retries; ++attempt) {
    const auto kernel = abelian_hsp(F, sim);
    auto it = std::find_if(kernel.begin(), kernel.end(), [](const Tuple& t) { return t[0] == 1; });
    if (it == kernel.end()) return pick;  // a kernel estimate is never too small
    Element u = N.from_tuple(G, Tuple(it->begin() + 1, it->end()));
    if (f.eval(G.multiply(G.invert(u), z)) == id) {
      pick.u = std::move(u);
      return pick;
    }
  }
  fail(ErrorCode::RoundBudgetExceeded, "coset probe failed verification repeatedly");
}

// ---------------------------------------------------------------------------

/// Abelian G: decompose G, then one Abelian HSP over its cyclic factors.
inline SubgroupResult solve_abelian(const BlackBoxGroup& G, Labeler& f, Simulator& sim) {
  const QueryStats start = detail::snapshot(G, f, sim);
  if (!is_abelian(G, G.generators())) fail(ErrorCode::NotAbelian, "group is not Abelian");
  const AbelianDecomposition dec = decompose_abelian(G, G.generators(), sim.config().enum_bound);
  SubgroupResult res;
  res.method = "abelian";
  res.gens = intersect_with_normal(G, dec, f, sim);
  res.stats = detail::snapshot(G, f, sim) - start;
  return res;
}

/// Hidden subgroup for groups with a small commutator subgroup G'.
inline SubgroupResult solve_small_commutator(const BlackBoxGroup& G, Labeler& f, Simulator& sim,
                                             std::size_t commutator_bound = std::size_t{1} << 12) {
  const QueryStats start = detail::snapshot(G, f, sim);
  SubgroupResult res;
  res.method = "commutator";
  const std::size_t bound = sim.config().enum_bound;

  // (1) G' as the normal closure of generator commutators.
  const auto& S = G.generators();
  std::vector<Element> seeds;
  for (std::size_t i = 0; i < S.size(); ++i) {
    for (std::size_t j = i + 1; j < S.size(); ++j) seeds.push_back(G.commutator(S[i], S[j]));
  }
  NormalGenerators derived;
  try {
    derived = normal_closure(G, seeds, std::min(bound, commutator_bound));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BoundExceeded) throw;
    fail(ErrorCode::CommutatorBoundExceeded, "|G'| exceeds " + std::to_string(commutator_bound));
  }
  std::vector<Element> D = derived.closure->elements();
  std::sort(D.begin(), D.end(), [&G](const Element& a, const Element& b) { return G.canonical(a) < G.canonical(b); });
  res.diagnostics.commutator_order = D.size();

  // (2) H ∩ G' by inspection.
  const Label id = f.eval(G.identity());
  std::vector<Element> inter;
  for (const auto& x : D) {
    if (f.eval(x) == id) inter.push_back(x);
  }
  res.diagnostics.intersection = detail::prune_generators(G, inter, bound);

  // (3), (4) F hides HG', normal with Abelian quotient.
  detail::CommutatorCosetLabeler F(G, f, D);
  const NormalGenerators HD = hidden_normal_subgroup(G, F, sim);

  // (5) one element of H in each xG'.
  for (const auto& x : HD.gens) {
    for (const auto& g : D) {
      const Element y = G.multiply(x, g);
      if (f.eval(y) == id) {
        res.diagnostics.picks.push_back(y);
        break;
      }
    }
  }

  // (6) H1 = <picks, H ∩ G'>.
  std::vector<Element> all = res.diagnostics.picks;
  all.insert(all.end(), res.diagnostics.intersection.begin(), res.diagnostics.intersection.end());
  res.gens = detail::prune_generators(G, all, bound);
  res.stats = detail::snapshot(G, f, sim) - start;

  res.diagnostics.query_budget =
      budget::B1(D.size(), S.size(), G.exponent_hint(), budget::ceil_log2(G.order_hint()), sim.config());
  if (res.stats.f_queries > res.diagnostics.query_budget) {
    throw std::logic_error("commutator solver exceeded its query budget");
  }
  return res;
}

namespace detail {

inline SubgroupResult assemble_elem2(const BlackBoxGroup& G, const AbelianDecomposition& N, Labeler& f, Simulator& sim,
                                     std::vector<Element> V, std::string method, const QueryStats& start) {
  SubgroupResult res;
  res.method = std::move(method);
  const std::size_t bound = sim.config().enum_bound;
  res.diagnostics.normal_order = N.to_tuple.size();
  res.diagnostics.V = V;
  {
    EpsilonScope scope(sim, sim.config().epsilon / (2.0 * static_cast<double>(V.size())));
    res.diagnostics.intersection = intersect_with_normal(G, N, f, sim);
    for (std::size_t i = 1; i < V.size(); ++i) {
      const CosetPick p = coset_intersection_pick(G, N, f, V[i], sim);
      if (p.u) res.diagnostics.picks.push_back(G.multiply(G.invert(*p.u), p.z));
    }
  }
  std::vector<Element> all = res.diagnostics.picks;
  all.insert(all.end(), res.diagnostics.intersection.begin(), res.diagnostics.intersection.end());
  res.gens = prune_generators(G, all, bound);
  res.stats = snapshot(G, f, sim) - start;
  res.diagnostics.query_budget = budget::B2(V.size(), N.structure.rank(), sim.config());
  if (res.stats.f_queries > res.diagnostics.query_budget) throw std::logic_error("elem-2 solver exceeded its query budget");
  return res;
}

/// w^-1 x in N, decided with constructive membership over a basis of N
/// (unique mode). Failing to commute with N already rules membership out.
inline bool in_normal(const BlackBoxGroup& G, const AbelianDecomposition& N, const Element& x, Simulator& sim) {
  try {
    return membership_unique(G, N.basis, x, sim).is_member();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotCommuting) return false;
    throw;
  }
}

}  // namespace detail

/// Elementary Abelian normal 2-subgroup N with small G/N: coset
/// representatives by a worklist, one probe per representative.
inline SubgroupResult solve_elem2_small_quotient(const BlackBoxGroup& G, std::span<const Element> N_gens, Labeler& f,
                                                 Simulator& sim, std::size_t quotient_bound = std::size_t{1} << 12) {
  const QueryStats start = detail::snapshot(G, f, sim);
  const AbelianDecomposition N = detail::checked_elem2_normal(G, N_gens, sim.config().enum_bound);

  // Each membership test gets an equal share of half the failure budget.
  const auto& S = G.generators();
  const double q = static_cast<double>(std::min<std::uint64_t>(quotient_bound, G.order_hint() / N.to_tuple.size()));
  const double tests = std::max(1.0, q * q * static_cast<double>(S.size()));
  std::vector<Element> V{G.identity()};
  {
    EpsilonScope scope(sim, sim.config().epsilon / (2.0 * tests));
    for (std::size_t i = 0; i < V.size(); ++i) {
      for (const auto& s : S) {
        const Element vg = G.multiply(V[i], s);
        bool fresh = true;
        for (const auto& w : V) {
          if (detail::in_normal(G, N, G.multiply(G.invert(w), vg), sim)) {
            fresh = false;
            break;
          }
        }
        if (!fresh) continue;
        V.push_back(vg);
        if (V.size() > quotient_bound) fail(ErrorCode::QuotientBoundExceeded, "|G/N| exceeds " + std::to_string(quotient_bound));
      }
    }
  }
  SubgroupResult res = detail::assemble_elem2(G, N, f, sim, std::move(V), "elem2-small", start);
  res.diagnostics.quotient_order = res.diagnostics.V.size();
  return res;
}

/// Elementary Abelian normal 2-subgroup N with G/N cyclic: V is built from
/// generators of the Sylow subgroups of G/N, so |V| = 1 + sum_p h_p where
/// p^{h_p} exactly divides |G/N|.
inline SubgroupResult solve_elem2_cyclic(const BlackBoxGroup& G, std::span<const Element> N_gens, Labeler& f,
                                         Simulator& sim) {
  const QueryStats start = detail::snapshot(G, f, sim);
  const AbelianDecomposition N = detail::checked_elem2_normal(G, N_gens, sim.config().enum_bound);
  CosetLabeler modN(G, N_gens, sim.config().enum_bound);
  const auto& S = G.generators();

  std::vector<Element> V{G.identity()};
  std::uint64_t n = 1;
  {
    EpsilonScope scope(sim, sim.config().epsilon / 2);
    // |G/N| = lcm of generator orders when the quotient is cyclic.
    for (const auto& s : S) n = std::lcm(n, find_order(G, s, modN, sim));
    const auto attempts = static_cast<std::size_t>(std::ceil(std::log2(1.0 / sim.config().epsilon))) + 2;
    detail::RandomElements random(G, sim.rng());
    Element product = G.identity();
    for (const auto& [p, q] : detail::factor_prime_powers(n)) {
      std::optional<Element> xp;
      for (std::size_t a = 0; a < attempts && !xp; ++a) {
        const Element g = random.next();
        const std::uint64_t o = find_order(G, g, modN, sim);
        if (o % q == 0) xp = G.power(g, static_cast<std::int64_t>(o / q));
      }
      if (!xp) fail(ErrorCode::NotCyclicQuotient, "no generator found for the Sylow " + std::to_string(p) + "-subgroup");
      product = G.multiply(product, *xp);
      for (std::uint64_t pj = 1; pj < q; pj *= p) V.push_back(G.power(*xp, static_cast<std::int64_t>(pj)));
    }
    // Certify: every generator of G lies in <prod x_p> modulo N.
    const std::vector<Element> cyc{product};
    for (const auto& s : S) {
      bool member = false;
      try {
        member = constructive_membership(G, cyc, s, modN, sim).is_member();
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotCommuting) throw;
      }
      if (!member) fail(ErrorCode::NotCyclicQuotient, "G/N is not cyclic");
    }
  }
  SubgroupResult res = detail::assemble_elem2(G, N, f, sim, std::move(V), "elem2-cyclic", start);
  res.diagnostics.quotient_order = n;
  return res;
}

}  // namespace hsplab
