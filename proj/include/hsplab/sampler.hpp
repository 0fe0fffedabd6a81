#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hsplab/abelian.hpp"
#include "hsplab/error.hpp"
#include "hsplab/group.hpp"
#include "hsplab/oracle.hpp"
#include "hsplab/rng.hpp"

namespace hsplab {

enum class SamplerKind { ideal, statevector };

struct SolverConfig {
  double epsilon = 1.0 / 1024;   // failure budget per solve, 0 < epsilon < 1/2
  std::size_t max_rounds = 4096; // Fourier samples per Abelian HSP call
  std::size_t max_retries = 8;   // re-runs after a verification failure
  std::uint64_t seed = 1;
  SamplerKind sampler = SamplerKind::ideal;
  std::size_t enum_bound = default_enum_bound();
};

inline std::uint64_t floor_log2(std::uint64_t n) {
  std::uint64_t l = 0;
  while (n > 1) {
    n >>= 1;
    ++l;
  }
  return l;
}

/// Rounds without growth before the running character subgroup is accepted.
/// A stall can happen at each of at most floor(log2 |A|) proper levels, so
/// r = ceil(log2(levels / eps)) keeps the total failure probability <= eps.
inline std::size_t stopping_rounds(double epsilon, std::uint64_t group_order) {
  const double levels = static_cast<double>(std::max<std::uint64_t>(1, floor_log2(group_order)));
  return static_cast<std::size_t>(std::ceil(std::log2(levels / epsilon)));
}

// ---------------------------------------------------------------------------

/// A function on an Abelian group whose values stand for unit vectors:
/// equal labels are equal states, distinct labels orthogonal ones. `query`
/// is one oracle call (the batch is the superposition); an empty batch still
/// charges the call, which is how the ideal sampler accounts for a sample it
/// does not simulate gate by gate. `simulate` is free.
class QuantumFunctionOracle {
 public:
  using BatchFn = std::function<std::vector<Label>(std::span<const Tuple>)>;

  QuantumFunctionOracle(AbelianStructure domain, BatchFn query, BatchFn simulate)
      : domain_(std::move(domain)), query_(std::move(query)), simulate_(std::move(simulate)) {}

  const AbelianStructure& domain() const noexcept { return domain_; }
  std::vector<Label> query(std::span<const Tuple> xs) const { return query_(xs); }
  std::vector<Label> simulate(std::span<const Tuple> xs) const { return simulate_(xs); }

  /// Ideal-sampler analysis, computed on first use.
  struct Partition {
    std::vector<std::uint32_t> class_of;         // per domain index
    std::vector<std::uint32_t> subgroup_of;      // per class: index into subgroups
    std::vector<std::vector<Tuple>> dual_gens;   // per subgroup: generators of its annihilator
    std::vector<std::vector<std::uint64_t>> dual_orders;
    std::vector<std::vector<Tuple>> subgroup_gens;
  };
  std::shared_ptr<Partition>& partition_cache() const { return partition_; }

 private:
  AbelianStructure domain_;
  BatchFn query_;
  BatchFn simulate_;
  mutable std::shared_ptr<Partition> partition_;
};

/// f∘embed: the oracle that maps a tuple to a group element and labels it.
inline QuantumFunctionOracle compose_oracle(AbelianStructure domain, Labeler& f,
                                            std::function<Element(const Tuple&)> embed) {
  auto batch = [embed](std::span<const Tuple> xs) {
    std::vector<Element> es;
    es.reserve(xs.size());
    for (const auto& x : xs) es.push_back(embed(x));
    return es;
  };
  return QuantumFunctionOracle(
      std::move(domain),
      [&f, batch](std::span<const Tuple> xs) {
        const auto es = batch(xs);
        return f.query(es);
      },
      [&f, batch](std::span<const Tuple> xs) {
        const auto es = batch(xs);
        return f.simulate(es);
      });
}

/// Amplitudes over basis states |x>|label> (x by domain index), grouped by
/// the second register.
struct Superposition {
  AbelianStructure domain;
  std::map<Label, std::vector<std::complex<double>>> blocks;

  double norm2() const {
    double s = 0;
    for (const auto& [label, amps] : blocks) {
      for (const auto& a : amps) s += std::norm(a);
    }
    return s;
  }
};

/// Exact QFT over Z_{m1} x ... x Z_{mk} on one block, factor by factor.
inline void apply_qft(const AbelianStructure& A, std::vector<std::complex<double>>& amps) {
  const std::uint64_t n = A.order();
  std::uint64_t stride = n;
  for (std::size_t f = 0; f < A.rank(); ++f) {
    const std::uint64_t m = A.moduli[f];
    stride /= m;
    if (m == 1) continue;
    std::vector<std::complex<double>> twiddle(m);
    for (std::uint64_t j = 0; j < m; ++j) twiddle[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<std::complex<double>> fiber(m), out(m);
    for (std::uint64_t base = 0; base < n; ++base) {
      if ((base / stride) % m != 0) continue;  // first element of each fiber
      for (std::uint64_t x = 0; x < m; ++x) fiber[x] = amps[base + x * stride];
      for (std::uint64_t y = 0; y < m; ++y) {
        std::complex<double> s = 0;
        for (std::uint64_t x = 0; x < m; ++x) s += fiber[x] * twiddle[(x * y) % m];
        out[y] = s * scale;
      }
      for (std::uint64_t y = 0; y < m; ++y) amps[base + y * stride] = out[y];
    }
  }
}

/// Session state for one solver run: configuration, the seeded generator
/// and the sampler backend. Identical seeds give identical transcripts.
class Simulator {
 public:
  static constexpr std::uint64_t kStatevectorCap = std::uint64_t{1} << 16;

  explicit Simulator(SolverConfig cfg) : cfg_(cfg), rng_(cfg.seed) {}

  const SolverConfig& config() const noexcept { return cfg_; }
  void set_epsilon(double eps) { cfg_.epsilon = eps; }
  Rng& rng() noexcept { return rng_; }
  std::uint64_t samples_drawn() const noexcept { return samples_; }

  /// One Fourier-sampling round: a uniform draw from H^perp when f hides H.
  CharacterVector sample_character(const QuantumFunctionOracle& f) {
    ++samples_;
    return cfg_.sampler == SamplerKind::statevector ? sample_statevector(f) : sample_ideal(f);
  }

  /// The five-step circuit on an explicit state vector; returns the final
  /// state before measurement.
  Superposition run_circuit(const QuantumFunctionOracle& f) {
    const AbelianStructure& A = f.domain();
    const std::uint64_t n = A.order();
    if (n > kStatevectorCap) fail(ErrorCode::TooLarge, "statevector sampler limited to 2^16 basis states");
    Superposition psi{A, {}};
    // |0>|0^m>
    auto& init = psi.blocks[Label{}];
    init.assign(n, 0);
    init[0] = 1;
    // QFT on the first register: uniform superposition.
    apply_qft(A, init);
    // Oracle call on the whole superposition.
    std::vector<Tuple> basis;
    basis.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) basis.push_back(A.at(i));
    const auto labels = f.query(basis);
    Superposition after{A, {}};
    const auto& amps = psi.blocks.begin()->second;
    for (std::uint64_t i = 0; i < n; ++i) {
      auto& block = after.blocks[labels[i]];
      if (block.empty()) block.assign(n, 0);
      block[i] += amps[i];
    }
    // QFT on the first register again.
    for (auto& [label, block] : after.blocks) apply_qft(A, block);
    return after;
  }

 private:
  CharacterVector sample_statevector(const QuantumFunctionOracle& f) {
    const Superposition psi = run_circuit(f);
    const AbelianStructure& A = f.domain();
    const std::uint64_t n = A.order();
    std::vector<double> prob(n, 0.0);
    for (const auto& [label, block] : psi.blocks) {
      for (std::uint64_t i = 0; i < n; ++i) prob[i] += std::norm(block[i]);
    }
    // Measure the first register.
    double u = rng_.unit();
    for (std::uint64_t i = 0; i < n; ++i) {
      if (u < prob[i]) return A.at(i);
      u -= prob[i];
    }
    for (std::uint64_t i = n; i-- > 0;) {
      if (prob[i] > 0) return A.at(i);
    }
    return A.zero();
  }

  /// Measuring the label register first leaves a uniform superposition over
  /// one level set x+K; its Fourier transform is uniform on K^perp. Requires
  /// every level set to be a coset.
  CharacterVector sample_ideal(const QuantumFunctionOracle& f) {
    const AbelianStructure& A = f.domain();
    auto& part = f.partition_cache();
    if (!part) part = analyse(f);
    f.query(std::span<const Tuple>{});  // the charged oracle call
    const std::uint64_t x = rng_.below(A.order());
    const auto sub = part->subgroup_of[part->class_of[x]];
    const auto& gens = part->dual_gens[sub];
    const auto& orders = part->dual_orders[sub];
    Tuple c = A.zero();
    for (std::size_t i = 0; i < gens.size(); ++i) c = A.add(c, A.scale(gens[i], rng_.below(orders[i])));
    return c;
  }

  static std::shared_ptr<QuantumFunctionOracle::Partition> analyse(const QuantumFunctionOracle& f) {
    const AbelianStructure& A = f.domain();
    const std::uint64_t n = A.order();
    std::vector<Tuple> basis;
    basis.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) basis.push_back(A.at(i));
    const auto labels = f.simulate(basis);

    auto part = std::make_shared<QuantumFunctionOracle::Partition>();
    part->class_of.assign(n, 0);
    std::unordered_map<Label, std::uint32_t, BitsHash> class_ids;
    std::vector<std::vector<std::uint64_t>> members;
    for (std::uint64_t i = 0; i < n; ++i) {
      auto [it, fresh] = class_ids.emplace(labels[i], static_cast<std::uint32_t>(members.size()));
      if (fresh) members.emplace_back();
      part->class_of[i] = it->second;
      members[it->second].push_back(i);
    }
    std::map<std::vector<std::uint64_t>, std::uint32_t> subgroup_ids;
    for (const auto& cls : members) {
      // K = L - x0 must be a subgroup.
      const Tuple x0 = A.at(cls.front());
      Tuple neg = A.scale(x0, A.exponent() - 1);
      std::vector<std::uint64_t> K;
      K.reserve(cls.size());
      for (auto i : cls) K.push_back(A.index(A.add(A.at(i), neg)));
      std::sort(K.begin(), K.end());
      auto it = subgroup_ids.find(K);
      if (it == subgroup_ids.end()) {
        std::vector<Tuple> gens;
        std::vector<char> in_span(n, 0), in_K(n, 0);
        for (auto i : K) in_K[i] = 1;
        std::vector<Tuple> span{A.zero()};
        in_span[A.index(A.zero())] = 1;
        for (auto i : K) {
          if (in_span[i]) continue;
          const Tuple g = A.at(i);
          gens.push_back(g);
          // span <- span + <g>
          const std::size_t old = span.size();
          Tuple step = g;
          while (!in_span[A.index(step)]) {
            for (std::size_t s = 0; s < old; ++s) {
              Tuple y = A.add(span[s], step);
              const auto yi = A.index(y);
              if (!in_K[yi]) fail(ErrorCode::OracleInconsistent, "level set is not a coset of a subgroup");
              if (!in_span[yi]) {
                in_span[yi] = 1;
                span.push_back(std::move(y));
              }
            }
            step = A.add(step, g);
          }
        }
        if (span.size() != K.size()) fail(ErrorCode::OracleInconsistent, "level set is not a coset of a subgroup");
        const auto id = static_cast<std::uint32_t>(part->dual_gens.size());
        auto dual = dual_subgroup(A, gens);
        std::vector<std::uint64_t> orders;
        for (const auto& d : dual) orders.push_back(A.element_order(d));
        part->dual_gens.push_back(std::move(dual));
        part->dual_orders.push_back(std::move(orders));
        part->subgroup_gens.push_back(std::move(gens));
        it = subgroup_ids.emplace(std::move(K), id).first;
      }
      part->subgroup_of.push_back(it->second);
    }
    return part;
  }

  SolverConfig cfg_;
  Rng rng_;
  std::uint64_t samples_ = 0;
};

/// Narrows the simulator's failure budget for the lifetime of the scope.
class EpsilonScope {
 public:
  EpsilonScope(Simulator& sim, double eps) : sim_(sim), saved_(sim.config().epsilon) { sim_.set_epsilon(eps); }
  ~EpsilonScope() { sim_.set_epsilon(saved_); }
  EpsilonScope(const EpsilonScope&) = delete;
  EpsilonScope& operator=(const EpsilonScope&) = delete;

 private:
  Simulator& sim_;
  double saved_;
};

/// Free-function form: one draw with a throwaway simulator.
inline CharacterVector sample_character(const QuantumFunctionOracle& f, Simulator& sim) { return sim.sample_character(f); }

// ---------------------------------------------------------------------------

/// Generators of the subgroup hidden by f. Characters are drawn until the
/// subgroup they generate has not grown for `stopping_rounds` consecutive
/// draws; the hidden subgroup is then the joint kernel.
inline std::vector<Tuple> abelian_hsp(const QuantumFunctionOracle& f, Simulator& sim) {
  const AbelianStructure& A = f.domain();
  if (A.rank() == 0 || A.order() == 1) return {};
  const std::size_t r = stopping_rounds(sim.config().epsilon, A.order());
  Lattice characters(A.moduli);
  std::vector<CharacterVector> samples;
  std::size_t stalled = 0;
  for (std::size_t round = 0;; ++round) {
    if (round >= sim.config().max_rounds) {
      fail(ErrorCode::RoundBudgetExceeded, "abelian_hsp exceeded " + std::to_string(sim.config().max_rounds) + " rounds");
    }
    const CharacterVector c = sim.sample_character(f);
    std::vector<BigInt> v(c.begin(), c.end());
    if (characters.add(v)) {
      samples.push_back(c);
      stalled = 0;
    } else if (++stalled >= r) {
      break;
    }
  }
  return solve_character_kernel(A, samples);
}

/// Most Fourier samples abelian_hsp can draw on a group of this order.
inline std::uint64_t abelian_hsp_sample_bound(double epsilon, std::uint64_t group_order) {
  return (floor_log2(group_order) + 1) * (stopping_rounds(epsilon, group_order) + 1);
}

/// Power table g^0 .. g^{m-1}.
inline std::vector<Element> power_table(const BlackBoxGroup& G, const Element& g, std::uint64_t m) {
  std::vector<Element> t;
  t.reserve(m);
  t.push_back(G.identity());
  for (std::uint64_t k = 1; k < m; ++k) t.push_back(G.multiply(t.back(), g));
  return t;
}

/// Order of g, or of gN when `modulo` labels cosets of N (hidden by f or
/// given by generators). Realized as the Abelian HSP on Z_m with
/// k -> label(g^k); the answer is verified by one label comparison and the
/// search re-run with fresh randomness if the check fails.
inline std::uint64_t find_order(const BlackBoxGroup& G, const Element& g, Labeler& modulo, Simulator& sim) {
  const std::uint64_t m = G.exponent_hint();
  if (m == 0 || m == std::numeric_limits<std::uint64_t>::max()) fail(ErrorCode::NoOrderBound, "no usable exponent bound");
  if (m > (std::uint64_t{1} << 24)) fail(ErrorCode::NoOrderBound, "exponent bound too large to simulate: " + std::to_string(m));
  auto table = std::make_shared<std::vector<Element>>();
  const QuantumFunctionOracle f = compose_oracle(AbelianStructure{{m}}, modulo, [&G, &g, table, m](const Tuple& k) {
    if (table->empty()) *table = power_table(G, g, m);
    return (*table)[k[0]];
  });
  const Label id = modulo.eval(G.identity());
  for (std::size_t attempt = 0; attempt <= sim.config().max_retries; ++attempt) {
    const auto kernel = abelian_hsp(f, sim);
    std::uint64_t d = m;
    for (const auto& t : kernel) d = std::gcd(d, t[0]);
    if (modulo.eval(G.power(g, static_cast<std::int64_t>(d))) == id) return d;
  }
  fail(ErrorCode::RoundBudgetExceeded, "order finding failed verification repeatedly");
}

inline std::uint64_t find_order(const BlackBoxGroup& G, const Element& g, Simulator& sim) {
  CanonicalLabeler unique(G);
  return find_order(G, g, unique, sim);
}

}  // namespace hsplab
