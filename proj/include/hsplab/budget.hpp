#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "hsplab/sampler.hpp"

// Closed-form worst-case f-query counts for the solvers. Each bound mirrors
// the call structure of the code, with every verification retry taken
// (R = max_retries + 1 attempts) and every Abelian HSP run to its longest
// possible stopping time. Group sizes enter through log2 bounds.
//
//   hsp(e, L)      = (L + 1)(ceil(log2(max(1, L) / e)) + 1)   samples on |A| <= 2^L
//   order(m, e)    = 1 + R (hsp(e, lg m) + 1)
//   member(t, m, e, L_k)   (orders of the t elements known)
//                  = t(t + 1) + order(m, e/2) + 1 + R (hsp(e/2, L_k) + 1)
//   normal(r, m, lgG, e)
//                  = r(r - 1) + 1 + R [ r order(m, e_p) + hsp(e_p, r lg m) + r ]
//                    + r member(r, m, e/(2r), lgG + lg m),   e_p = e / (2(r + 1))
//
//   B1 = 1 + |G'| + |G'| normal(r, m, lgG, eps) + lgG |G'|
//   B2 = 1 + R (hsp(eps_f, n) + n) + (|V| - 1)(1 + R (hsp(eps_f, n + 1) + 1)),
//        eps_f = eps / (2 |V|)
//
// with r = number of generators of G, m = exponent bound, lg = ceil(log2),
// lgG >= log2 |G|, and N = Z_2^n in B2. F-queries of the commutator solver
// cost |G'| f-queries each, which is the |G'| factor in B1.

namespace hsplab::budget {

inline std::uint64_t ceil_log2(std::uint64_t n) {
  std::uint64_t l = 0;
  while ((std::uint64_t{1} << l) < n && l < 63) ++l;
  return l;
}

/// Fourier samples of one abelian_hsp call on a group of order <= 2^L.
inline std::uint64_t hsp(double eps, std::uint64_t L, std::size_t max_rounds) {
  if (L == 0) return 0;
  const double levels = static_cast<double>(std::max<std::uint64_t>(1, L));
  const auto r = static_cast<std::uint64_t>(std::ceil(std::log2(levels / eps)));
  return std::min<std::uint64_t>((L + 1) * (r + 1), max_rounds);
}

inline std::uint64_t order(std::uint64_t m, double eps, const SolverConfig& cfg) {
  const std::uint64_t R = cfg.max_retries + 1;
  return 1 + R * (hsp(eps, ceil_log2(m), cfg.max_rounds) + 1);
}

inline std::uint64_t member_known(std::uint64_t t, std::uint64_t m, double eps, std::uint64_t Lk, const SolverConfig& cfg) {
  const std::uint64_t R = cfg.max_retries + 1;
  return t * (t + 1) + order(m, eps / 2, cfg) + 1 + R * (hsp(eps / 2, Lk, cfg.max_rounds) + 1);
}

/// F-queries of hidden_normal_subgroup.
inline std::uint64_t normal(std::uint64_t r, std::uint64_t m, std::uint64_t lgG, double eps, const SolverConfig& cfg) {
  const std::uint64_t R = cfg.max_retries + 1;
  const std::uint64_t lm = ceil_log2(m);
  const double e = eps / 2;
  const double ep = e / static_cast<double>(r + 1);
  const std::uint64_t presentation =
      r * (r - (r > 0 ? 1 : 0)) + 1 + R * (r * order(m, ep, cfg) + hsp(ep, r * lm, cfg.max_rounds) + r);
  const double eq = e / static_cast<double>(std::max<std::uint64_t>(1, r));
  return presentation + r * member_known(r, m, eq, lgG + lm, cfg);
}

/// f-queries of solve_small_commutator.
inline std::uint64_t B1(std::uint64_t commutator_order, std::uint64_t r, std::uint64_t m, std::uint64_t lgG,
                        const SolverConfig& cfg) {
  return 1 + commutator_order + commutator_order * normal(r, m, lgG, cfg.epsilon, cfg) + lgG * commutator_order;
}

/// f-queries of solve_elem2_small_quotient / solve_elem2_cyclic with N = Z_2^n.
inline std::uint64_t B2(std::uint64_t V_size, std::uint64_t n, const SolverConfig& cfg) {
  const std::uint64_t R = cfg.max_retries + 1;
  const double ef = cfg.epsilon / (2.0 * static_cast<double>(std::max<std::uint64_t>(1, V_size)));
  return 1 + R * (hsp(ef, n, cfg.max_rounds) + n) + (V_size > 0 ? V_size - 1 : 0) * (1 + R * (hsp(ef, n + 1, cfg.max_rounds) + 1));
}

}  // namespace hsplab::budget
