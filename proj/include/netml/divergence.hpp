#pragma once

// Bernoulli Kullback-Leibler divergence and the weighted matrix divergences
// and norms built from it.  All matrix sums run over unordered pairs i < j.

#include <netml/common.hpp>
#include <netml/sym_matrix.hpp>

#include <cmath>
#include <string>

namespace netml {

namespace detail {

inline void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::domain_error(std::string(name) + " = " + std::to_string(v) +
                            " outside [0, 1]");
}

inline std::string pair_label(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

}  // namespace detail

// KL divergence between Bernoulli(q) and Bernoulli(qp):
//   K(q, qp) = q log(q/qp) + (1-q) log((1-q)/(1-qp)),  0 log 0 = 0.
// If qp is 0 or 1 while q differs by more than kEqTol, the divergence is
// infinite and we refuse with an explicit error rather than return inf.
inline double bernoulli_kl(double q, double qp) {
  detail::check_unit_interval(q, "q");
  detail::check_unit_interval(qp, "qp");
  const bool at_zero = qp <= 0.0;
  const bool at_one = qp >= 1.0;
  if (at_zero || at_one) {
    const double target = at_zero ? 0.0 : 1.0;
    if (std::abs(q - target) <= kEqTol) return 0.0;
    throw DivergenceInfiniteError(
        "divergence infinite: reference probability " + std::to_string(qp) +
        " is degenerate but q = " + std::to_string(q));
  }
  double kl = 0.0;
  if (q > 0.0) kl += q * std::log(q / qp);
  if (q < 1.0) kl += (1.0 - q) * std::log((1.0 - q) / (1.0 - qp));
  return kl;
}

// Weighted matrix KL divergence: sum over i < j of w_ij * K(p_ij, q_ij).
// Zero-weight entries are skipped entirely, so degenerate q entries are
// allowed wherever w is zero.  An infinite term names the offending pair.
inline double kl_weighted(const SymZeroDiagMatrix& p,
                          const SymZeroDiagMatrix& q,
                          const SymZeroDiagMatrix& w) {
  const int n = p.n();
  if (q.n() != n || w.n() != n)
    throw std::invalid_argument("kl_weighted: dimension mismatch");
  double total = 0.0;
  for (std::int64_t t = 0; t < p.pairs(); ++t) {
    const double wt = w.at_pair(t);
    if (wt == 0.0) continue;
    if (!(wt >= 0.0 && wt <= 1.0))
      throw std::domain_error("weight outside [0, 1]");
    try {
      total += wt * bernoulli_kl(p.at_pair(t), q.at_pair(t));
    } catch (const DivergenceInfiniteError&) {
      auto [i, j] = pair_from_index(n, t);
      throw DivergenceInfiniteError("divergence infinite at pair " +
                                    detail::pair_label(i, j));
    }
  }
  return total;
}

// Weighted squared Frobenius distance over unordered pairs:
//   sum over i < j of w_ij * (p_ij - q_ij)^2.
// With w identically one this is the plain squared distance.
inline double frob_weighted(const SymZeroDiagMatrix& p,
                            const SymZeroDiagMatrix& q,
                            const SymZeroDiagMatrix& w) {
  const int n = p.n();
  if (q.n() != n || w.n() != n)
    throw std::invalid_argument("frob_weighted: dimension mismatch");
  double total = 0.0;
  for (std::int64_t t = 0; t < p.pairs(); ++t) {
    const double d = p.at_pair(t) - q.at_pair(t);
    total += w.at_pair(t) * d * d;
  }
  return total;
}

}  // namespace netml
