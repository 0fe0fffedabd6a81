#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "hsplab/error.hpp"
#include "hsplab/group.hpp"
#include "hsplab/oracle.hpp"
#include "hsplab/rng.hpp"

// Exhaustive ground truth. Everything here enumerates and is exponential
// in the input size by design.

namespace hsplab {

/// {g in G : f(g) = f(e)}, using the simulator view of f (uncharged).
inline std::vector<Element> brute_force_hsp(const BlackBoxGroup& G, std::span<const Element> G_elements, Labeler& f) {
  const Label id = f.peek(G.identity());
  const auto labels = f.simulate(G_elements);
  std::vector<Element> out;
  for (std::size_t i = 0; i < G_elements.size(); ++i) {
    if (labels[i] == id) out.push_back(G_elements[i]);
  }
  return out;
}

/// f(x) = f(y) iff x^-1 y in H, over all pairs.
inline bool verify_hiding(const BlackBoxGroup& G, std::span<const Element> G_elements, Labeler& f,
                          std::span<const Element> H_elements) {
  ElementSet H;
  for (const auto& h : H_elements) H.insert(G, h);
  const auto labels = f.simulate(G_elements);
  // Group by label; every class must be exactly one left coset of H.
  std::map<Label, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < G_elements.size(); ++i) classes[labels[i]].push_back(i);
  for (const auto& [label, idx] : classes) {
    if (idx.size() != H.size()) return false;
    const Element xinv = G.invert(G_elements[idx.front()]);
    for (auto i : idx) {
      if (!H.contains(G, G.multiply(xinv, G_elements[i]))) return false;
    }
  }
  return true;
}

/// Canonical-key set of <gens>.
inline std::set<Bits> subgroup_keys(const BlackBoxGroup& G, std::span<const Element> gens,
                                    std::size_t bound = default_enum_bound()) {
  const ElementSet s = closure_set(G, gens, bound);
  return {s.keys().begin(), s.keys().end()};
}

inline std::set<Bits> element_keys(const BlackBoxGroup& G, std::span<const Element> elems) {
  std::set<Bits> out;
  for (const auto& e : elems) out.insert(G.canonical(e));
  return out;
}

struct Subgroup {
  std::vector<Element> gens;
  std::set<Bits> keys;
};

/// Subgroups of G. Exhaustive when |G| <= exhaustive_limit: joins of found
/// subgroups until nothing new appears (every subgroup is the join of
/// cyclic ones, so this is complete).
/// Otherwise up to max_count distinct random closures, seeded by rng.
inline std::vector<Subgroup> subgroups_of(const BlackBoxGroup& G, std::span<const Element> G_elements,
                                          std::size_t max_count, Rng* rng = nullptr,
                                          std::size_t exhaustive_limit = std::size_t{1} << 10) {
  std::vector<Subgroup> out;
  std::set<std::set<Bits>> seen;
  auto add = [&](std::vector<Element> gens) {
    auto keys = subgroup_keys(G, gens);
    if (seen.insert(keys).second) {
      out.push_back({std::move(gens), std::move(keys)});
      return true;
    }
    return false;
  };

  if (G_elements.size() <= exhaustive_limit) {
    // Cyclic subgroups, then pairwise joins to a fixpoint. Joins of two
    // cyclic subgroups cover every two-element closure.
    add({});
    for (const auto& g : G_elements) add({g});
    for (std::size_t done = 1; done < out.size();) {
      const std::size_t n = out.size();
      for (std::size_t j = done; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
          const auto& a = out[i].keys;
          const auto& b = out[j].keys;
          if (std::includes(a.begin(), a.end(), b.begin(), b.end()) || std::includes(b.begin(), b.end(), a.begin(), a.end())) continue;
          std::vector<Element> gens = out[i].gens;
          gens.insert(gens.end(), out[j].gens.begin(), out[j].gens.end());
          add(std::move(gens));
        }
      }
      done = n;
    }
    std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
      return a.keys.size() != b.keys.size() ? a.keys.size() < b.keys.size() : a.keys < b.keys;
    });
    if (out.size() > max_count) out.resize(max_count);
    return out;
  }

  if (!rng) fail(ErrorCode::BoundExceeded, "group too large for exhaustive subgroup enumeration");
  add({});
  for (std::size_t tries = 0; out.size() < max_count && tries < 50 * max_count; ++tries) {
    const std::size_t k = 1 + rng->below(3);
    std::vector<Element> gens;
    for (std::size_t i = 0; i < k; ++i) gens.push_back(G_elements[rng->below(G_elements.size())]);
    add(std::move(gens));
  }
  return out;
}

/// Seeded random subgroups (always the random path).
inline std::vector<Subgroup> random_subgroups(const BlackBoxGroup& G, std::span<const Element> G_elements,
                                              std::size_t count, Rng& rng, std::size_t max_gens = 3) {
  std::vector<Subgroup> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = rng.below(max_gens + 1);
    std::vector<Element> gens;
    for (std::size_t j = 0; j < k; ++j) gens.push_back(G_elements[rng.below(G_elements.size())]);
    auto keys = subgroup_keys(G, gens);
    out.push_back({std::move(gens), std::move(keys)});
  }
  return out;
}

struct ChiSquareResult {
  double statistic = 0;
  std::size_t dof = 0;
  double p_value = 1;
};

/// Pearson chi-square of observed counts against the uniform distribution
/// on `support` outcomes; samples outside the support count as a certain
/// rejection.
template <class T>
ChiSquareResult chi_square_uniform(std::span<const T> samples, std::span<const T> support) {
  ChiSquareResult r;
  if (support.size() <= 1) {
    for (const auto& s : samples) {
      if (support.empty() || !(s == support.front())) return {std::numeric_limits<double>::infinity(), 0, 0};
    }
    return r;
  }
  std::map<T, std::size_t> counts;
  for (const auto& s : support) counts[s] = 0;
  for (const auto& s : samples) {
    auto it = counts.find(s);
    if (it == counts.end()) return {std::numeric_limits<double>::infinity(), support.size() - 1, 0};
    ++it->second;
  }
  const double expected = static_cast<double>(samples.size()) / static_cast<double>(support.size());
  for (const auto& [k, c] : counts) {
    const double d = static_cast<double>(c) - expected;
    r.statistic += d * d / expected;
  }
  r.dof = support.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

/// Two-sample chi-square homogeneity test on a common support.
template <class T>
ChiSquareResult chi_square_two_sample(std::span<const T> a, std::span<const T> b) {
  std::map<T, std::pair<double, double>> counts;
  for (const auto& x : a) counts[x].first += 1;
  for (const auto& x : b) counts[x].second += 1;
  ChiSquareResult r;
  if (counts.size() <= 1) return r;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size()), n = na + nb;
  for (const auto& [k, c] : counts) {
    const double tot = c.first + c.second;
    const double ea = tot * na / n, eb = tot * nb / n;
    r.statistic += (c.first - ea) * (c.first - ea) / ea + (c.second - eb) * (c.second - eb) / eb;
  }
  r.dof = counts.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

struct VerificationReport {
  std::string instance;
  std::uint64_t expected_order = 0;
  std::uint64_t result_order = 0;
  bool equal = false;
  std::uint64_t f_queries = 0;
  double wall_seconds = 0;
};

/// Compares <result_gens> with the brute-force hidden subgroup.
inline VerificationReport verify_result(const BlackBoxGroup& G, std::span<const Element> G_elements, Labeler& f,
                                        std::span<const Element> result_gens, std::string instance = {}) {
  VerificationReport rep;
  rep.instance = std::move(instance);
  const auto expected = element_keys(G, brute_force_hsp(G, G_elements, f));
  const auto got = subgroup_keys(G, result_gens);
  rep.expected_order = expected.size();
  rep.result_order = got.size();
  rep.equal = expected == got;
  rep.f_queries = f.query_count();
  return rep;
}

}  // namespace hsplab
