#pragma once

// Reference quantities for risk accounting: the best block-constant
// approximation of a known truth under the observation-weighted KL
// divergence, its thresholded lift, and executable checks of the two
// inequalities the error analysis rests on.
//
// Unlike the estimator, the approximation here is unconstrained in [0, 1]:
// it measures how well a block structure can represent the truth, not how
// well one can be fitted from data.

#include <netml/common.hpp>
#include <netml/divergence.hpp>
#include <netml/sym_matrix.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace netml {

struct OracleResult {
  BlockModel model;                // best block-constant approximation
  SymZeroDiagMatrix theta_tilde;   // its pairwise expansion
  double kl_to_truth = 0.0;        // weighted KL from the truth
};

struct ThresholdedOracle {
  BlockMatrix q;                   // entries lifted to at least gamma
  SymZeroDiagMatrix theta;         // pairwise expansion under the labeling
  std::int64_t n_small = 0;        // pairs whose unthresholded value < gamma
};

struct LemmaReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Best block probabilities for a *fixed* labeling: minimizing
//   sum Pi_ij K(theta_ij, Q_ab)  over Q_ab in [0, 1]
// cell by cell gives the Pi-weighted mean of theta over the cell (the
// weighted KL barycenter).  Cells with no observation weight fall back to
// the unweighted mean; cells with no pairs at all get 1/2.
inline BlockMatrix oracle_block_q(const SymZeroDiagMatrix& theta,
                                  const SymZeroDiagMatrix& pi,
                                  const Labeling& z) {
  const int n = theta.n();
  if (pi.n() != n || z.n() != n)
    throw std::invalid_argument("oracle_block_q: dimension mismatch");
  if (!theta.is_probability() || !pi.is_probability())
    throw std::domain_error("entries must lie in [0, 1]");
  const int k = z.k;
  BlockMatrix sum_w(k), sum_wt(k), count(k), sum_t(k);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int a = z[i], b = z[j];
      const double w = pi(i, j), t = theta(i, j);
      sum_w.set(a, b, sum_w(a, b) + w);
      sum_wt.set(a, b, sum_wt(a, b) + w * t);
      count.set(a, b, count(a, b) + 1.0);
      sum_t.set(a, b, sum_t(a, b) + t);
    }
  BlockMatrix q(k);
  for (int a = 1; a <= k; ++a)
    for (int b = a; b <= k; ++b) {
      if (sum_w(a, b) > 0.0)
        q.set(a, b, sum_wt(a, b) / sum_w(a, b));
      else if (count(a, b) > 0.0)
        q.set(a, b, sum_t(a, b) / count(a, b));
      else
        q.set(a, b, 0.5);  // no pairs: value never enters any objective
    }
  return q;
}

// Best block-constant approximation of the truth: exhaustive search over all
// labelings (budget-guarded) with the barycenter profile above, minimizing
// the observation-weighted KL from theta.  Ties keep the lexicographically
// smallest labeling.
inline OracleResult oracle_theta_tilde(const SymZeroDiagMatrix& theta,
                                       const SymZeroDiagMatrix& pi, int k) {
  const int n = theta.n();
  if (pi.n() != n)
    throw std::invalid_argument("oracle_theta_tilde: dimension mismatch");
  if (k < 1) throw std::invalid_argument("need k >= 1");
  const double count =
      std::pow(static_cast<double>(k), static_cast<double>(n));
  if (count > kEnumerationBudget)
    throw EnumerationBudgetError(
        "oracle search over " + std::to_string(k) + "^" + std::to_string(n) +
        " labelings exceeds the budget of " +
        std::to_string(static_cast<long long>(kEnumerationBudget)));

  std::vector<int> z(static_cast<std::size_t>(n), 1);
  std::vector<int> best_z;
  BlockMatrix best_q;
  double best_kl = std::numeric_limits<double>::infinity();
  for (;;) {
    const Labeling lab(z, k);
    BlockMatrix q = oracle_block_q(theta, pi, lab);
    const SymZeroDiagMatrix approx =
        theta_from_blockmodel(BlockModel(q, lab));
    const double kl = kl_weighted(theta, approx, pi);
    if (kl < best_kl) {
      best_kl = kl;
      best_z = z;
      best_q = q;
    }
    int pos = n - 1;
    while (pos >= 0 && z[static_cast<std::size_t>(pos)] == k) {
      z[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++z[static_cast<std::size_t>(pos)];
  }

  OracleResult r;
  r.model = BlockModel(best_q, Labeling(best_z, k));
  r.theta_tilde = theta_from_blockmodel(r.model);
  r.kl_to_truth = best_kl;
  return r;
}

// Lift block probabilities to at least gamma and count how many pairs sat
// below the threshold.  Requires gamma <= 1/2 (the regime where lifting a
// small probability can only be paid for by the counted pairs).
inline ThresholdedOracle threshold_oracle(const BlockModel& oracle_model,
                                          double gamma) {
  if (!(gamma > 0.0 && gamma <= 0.5))
    throw std::domain_error("threshold needs 0 < gamma <= 1/2");
  const int k = oracle_model.q.k();
  BlockMatrix lifted(k);
  for (int a = 1; a <= k; ++a)
    for (int b = a; b <= k; ++b)
      lifted.set(a, b, std::max(oracle_model.q(a, b), gamma));

  ThresholdedOracle out;
  out.q = lifted;
  out.theta = theta_from_blockmodel(BlockModel(lifted, oracle_model.z));
  const SymZeroDiagMatrix original = theta_from_blockmodel(oracle_model);
  for (std::int64_t t = 0; t < original.pairs(); ++t)
    if (original.at_pair(t) < gamma) ++out.n_small;
  return out;
}

// Check that thresholding costs at most 2 * gamma per lifted pair:
//   K_Pi(theta, lifted) - K_Pi(theta, original) <= 2 * gamma * n_small.
inline LemmaReport check_threshold_lemma(const SymZeroDiagMatrix& theta,
                                         const SymZeroDiagMatrix& pi,
                                         const OracleResult& oracle,
                                         const ThresholdedOracle& lifted,
                                         double gamma, double tol = 1e-12) {
  if (!(gamma > 0.0 && gamma <= 0.5))
    throw std::domain_error("threshold needs 0 < gamma <= 1/2");
  LemmaReport rep;
  rep.lhs = kl_weighted(theta, lifted.theta, pi) -
            kl_weighted(theta, oracle.theta_tilde, pi);
  rep.rhs = 2.0 * gamma * static_cast<double>(lifted.n_small);
  rep.holds = rep.lhs <= rep.rhs + tol;
  return rep;
}

// Check the norm-divergence comparison
//   ||p - q||^2_{2,w} <= 8 * max(||p||_inf, ||q||_inf) * K_w(p, q).
// Both matrices must lie strictly inside (0, 1) so the divergence is finite.
inline LemmaReport check_kl_frobenius(const SymZeroDiagMatrix& p,
                                      const SymZeroDiagMatrix& q,
                                      const SymZeroDiagMatrix& w,
                                      double tol = 1e-12) {
  if (q.n() != p.n() || w.n() != p.n())
    throw std::invalid_argument("check_kl_frobenius: dimension mismatch");
  for (std::int64_t t = 0; t < p.pairs(); ++t)
    if (p.at_pair(t) <= 0.0 || p.at_pair(t) >= 1.0 || q.at_pair(t) <= 0.0 ||
        q.at_pair(t) >= 1.0)
      throw std::domain_error(
          "norm-divergence check needs entries strictly inside (0, 1)");
  LemmaReport rep;
  rep.lhs = frob_weighted(p, q, w);
  rep.rhs = 8.0 * std::max(p.inf_norm(), q.inf_norm()) * kl_weighted(p, q, w);
  rep.holds = rep.lhs <= rep.rhs + tol;
  return rep;
}

}  // namespace netml
