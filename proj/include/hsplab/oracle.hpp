#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hsplab/bits.hpp"
#include "hsplab/group.hpp"
#include "hsplab/rng.hpp"

namespace hsplab {

/// A function on group elements that returns opaque labels. `query`
/// stands for one oracle call; it may be applied to a whole superposition
/// of inputs (the batch) and still counts as a single call. `simulate` is
/// the simulator's own view of the same function and is never charged to a
/// solver.
class Labeler {
 public:
  virtual ~Labeler() = default;
  virtual std::vector<Label> query(std::span<const Element> xs) = 0;
  virtual std::vector<Label> simulate(std::span<const Element> xs) = 0;

  Label eval(const Element& x) { return query(std::span<const Element>(&x, 1)).front(); }
  Label peek(const Element& x) { return simulate(std::span<const Element>(&x, 1)).front(); }

  /// Charged calls so far; 0 for labelers that are not oracles.
  virtual std::uint64_t query_count() const { return 0; }
  virtual std::uint64_t sim_count() const { return 0; }
};

/// Keyed bijection on bitstrings of a fixed length (a 4-step unbalanced
/// Feistel network). Used to hide label structure from solvers.
class LabelScrambler {
 public:
  explicit LabelScrambler(std::uint64_t key) : key_(key) {}

  Bits operator()(const Bits& x) const {
    const std::size_t n = x.size();
    const std::size_t la = n / 2;
    Bits a = x.slice(0, la);
    Bits b = x.slice(la, n - la);
    for (std::uint64_t round = 0; round < 4; ++round) {
      if (round % 2 == 0) {
        a = a ^ mask(b, a.size(), round);
      } else {
        b = b ^ mask(a, b.size(), round);
      }
    }
    return a.concat(b);
  }

 private:
  Bits mask(const Bits& from, std::size_t width, std::uint64_t round) const {
    std::uint64_t state = key_ ^ (round * 0x9e3779b97f4a7c15ull) ^ from.size();
    for (auto byte : from.bytes()) state = splitmix64(state) ^ byte;
    Bits out(width);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < width; ++i) {
      if (i % 64 == 0) word = splitmix64(state);
      out.set(i, (word >> (i % 64)) & 1u);
    }
    return out;
  }

  std::uint64_t key_;
};

/// Harness-built hiding function: eval(g) is the (scrambled) minimum
/// canonical encoding over the left coset gH, so it is constant exactly on
/// left cosets of H = <H_gens>. Counts one query per call.
class HidingOracle final : public Labeler {
 public:
  HidingOracle(const BlackBoxGroup& G, std::span<const Element> H_gens, std::uint64_t seed, bool scramble = true,
               std::size_t bound = default_enum_bound())
      : G_(&G),
        witness_(H_gens.begin(), H_gens.end()),
        subgroup_(enumerate_closure(G, H_gens, bound)),
        scrambler_(seed),
        scramble_(scramble) {}

  std::size_t label_length() const { return G_->encoding_length(); }

  std::vector<Label> query(std::span<const Element> xs) override {
    ++query_count_;
    return evaluate(xs);
  }
  std::vector<Label> simulate(std::span<const Element> xs) override { return evaluate(xs); }

  /// Number of oracle calls (classical or superposed).
  std::uint64_t query_count() const override { return query_count_; }
  /// Number of individual function values computed, charged or not.
  std::uint64_t sim_count() const override { return sim_count_; }

  /// Generators of the hidden subgroup; harness-only.
  const std::vector<Element>& witness() const noexcept { return witness_; }
  const std::vector<Element>& witness_elements() const noexcept { return subgroup_; }

 private:
  std::vector<Label> evaluate(std::span<const Element> xs) {
    std::vector<Label> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
      ++sim_count_;
      const Element key = G_->canonical(x);
      auto it = memo_.find(key);
      if (it == memo_.end()) {
        Label raw = coset_min(*G_, x, subgroup_);
        it = memo_.emplace(key, scramble_ ? scrambler_(raw) : raw).first;
      }
      out.push_back(it->second);
    }
    return out;
  }

  const BlackBoxGroup* G_;
  std::vector<Element> witness_;
  std::vector<Element> subgroup_;
  LabelScrambler scrambler_;
  bool scramble_;
  std::unordered_map<Element, Label, BitsHash> memo_;
  std::uint64_t query_count_ = 0;
  std::uint64_t sim_count_ = 0;
};

/// Labels are the canonical encodings themselves: the quantum state |g>
/// of a uniquely encoded group element.
class CanonicalLabeler final : public Labeler {
 public:
  explicit CanonicalLabeler(const BlackBoxGroup& G) : G_(&G) {}
  std::vector<Label> query(std::span<const Element> xs) override { return simulate(xs); }
  std::vector<Label> simulate(std::span<const Element> xs) override {
    std::vector<Label> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(G_->canonical(x));
    return out;
  }

 private:
  const BlackBoxGroup* G_;
};

/// Canonical coset label for an enumerated subgroup N: the minimum encoding
/// of {x n : n in N}. Equal labels iff equal cosets.
inline Label coset_label(const BlackBoxGroup& G, const Element& x, std::span<const Element> N_elements) {
  return coset_min(G, x, N_elements);
}

/// Exact stand-in for the coset state |xN> of a normal subgroup given by
/// generators.
class CosetLabeler final : public Labeler {
 public:
  CosetLabeler(const BlackBoxGroup& G, std::span<const Element> N_gens, std::size_t bound = default_enum_bound())
      : G_(&G), N_(enumerate_closure(G, N_gens, bound)) {}

  const std::vector<Element>& subgroup() const noexcept { return N_; }

  std::vector<Label> query(std::span<const Element> xs) override { return simulate(xs); }
  std::vector<Label> simulate(std::span<const Element> xs) override {
    std::vector<Label> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
      const Element key = G_->canonical(x);
      auto it = memo_.find(key);
      if (it == memo_.end()) it = memo_.emplace(key, coset_label(*G_, x, N_)).first;
      out.push_back(it->second);
    }
    return out;
  }

 private:
  const BlackBoxGroup* G_;
  std::vector<Element> N_;
  std::unordered_map<Element, Label, BitsHash> memo_;
};

/// Counters reported per solver run.
struct QueryStats {
  std::uint64_t f_queries = 0;
  std::uint64_t group_ops = 0;
  std::uint64_t rng_draws = 0;
  std::uint64_t sim_queries = 0;

  friend QueryStats operator-(const QueryStats& a, const QueryStats& b) {
    return {a.f_queries - b.f_queries, a.group_ops - b.group_ops, a.rng_draws - b.rng_draws, a.sim_queries - b.sim_queries};
  }
  friend bool operator==(const QueryStats&, const QueryStats&) = default;
};

}  // namespace hsplab
