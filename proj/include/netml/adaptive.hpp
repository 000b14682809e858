#pragma once

// Data-driven choice of the clamp interval and of the block count, plus the
// block approximation of a smooth graphon that underlies the rate analysis.

#include <netml/common.hpp>
#include <netml/fit.hpp>
#include <netml/graphon.hpp>
#include <netml/sampling.hpp>
#include <netml/sym_matrix.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace netml {

struct SparsityEstimate {
  double d_hat = 0.0;      // mean edge indicator over the held-out pairs
  double rho_hat = 0.0;    // (log n)^{1/5} * d_hat
  double gamma_hat = 0.0;  // (log n)^{-1/5} * d_hat
};

// Estimate the edge density from a held-out subset of exactly n pairs drawn
// without replacement, and widen it into a clamp interval by slowly varying
// log factors.  An all-zero sample leaves no usable interval and is refused.
inline SparsityEstimate estimate_sparsity(const SymZeroDiagMatrix& a,
                                          const PairSet& omega, int n) {
  if (a.n() != n) throw std::invalid_argument("node count mismatch");
  if (static_cast<int>(omega.size()) != n)
    throw std::invalid_argument("held-out pair set must have exactly " +
                                std::to_string(n) + " pairs");
  if (n < 3) throw std::domain_error("need n >= 3");
  double sum = 0.0;
  for (const auto& [i, j] : omega) sum += a(i, j);
  SparsityEstimate est;
  est.d_hat = sum / static_cast<double>(n);
  if (est.d_hat == 0.0)
    throw DegenerateSampleError(
        "no edges among the held-out pairs: density estimate is zero");
  const double lf = std::pow(std::log(static_cast<double>(n)), 0.2);
  est.rho_hat = lf * est.d_hat;
  est.gamma_hat = est.d_hat / lf;
  return est;
}

// Fit configuration for the adaptive path: everything but the clamp bounds,
// which come from the data.
struct AdaptiveFitConfig {
  int k = 1;
  int restarts = 10;
  int max_sweeps = 100;
  std::uint64_t seed = 0;
  Objective objective = Objective::kl;
  bool exact = false;  // use exhaustive search instead of local search
};

// Two-step estimator: estimate the density on the held-out pairs, then fit
// on the remaining pairs with the estimated clamp interval.  The held-out
// pairs are excluded from fitting by zeroing them in the mask; callers
// report full-matrix risk, including the held-out pairs.
//
// Under a partial observation mask the density is estimated from the
// observed held-out pairs only (with full observation this is exactly the
// mean over all of them).
inline FitResult fit_adaptive(const SymZeroDiagMatrix& a,
                              const SymZeroDiagMatrix& x, const PairSet& omega,
                              const AdaptiveFitConfig& cfg) {
  const int n = a.n();
  if (static_cast<int>(omega.size()) != n)
    throw std::invalid_argument("held-out pair set must have exactly " +
                                std::to_string(n) + " pairs");

  double sum = 0.0, observed = 0.0;
  for (const auto& [i, j] : omega) {
    if (x(i, j) == 0.0) continue;
    sum += a(i, j);
    observed += 1.0;
  }
  if (observed == 0.0)
    throw DegenerateSampleError("no held-out pair is observed");
  const double d_hat = sum / observed;
  if (d_hat == 0.0)
    throw DegenerateSampleError(
        "no edges among the held-out pairs: density estimate is zero");
  const double lf = std::pow(std::log(static_cast<double>(n)), 0.2);
  const double rho_hat = lf * d_hat;
  const double gamma_hat = d_hat / lf;
  if (rho_hat >= 1.0)
    throw std::domain_error("estimated upper clamp " +
                            std::to_string(rho_hat) +
                            " is not below 1; graph too dense for the "
                            "adaptive interval");

  SymZeroDiagMatrix x_fit = x;
  for (const auto& [i, j] : omega) x_fit.set(i, j, 0.0);

  FitConfig fit_cfg;
  fit_cfg.k = cfg.k;
  fit_cfg.gamma = gamma_hat;
  fit_cfg.rho = rho_hat;
  fit_cfg.restarts = cfg.restarts;
  fit_cfg.max_sweeps = cfg.max_sweeps;
  fit_cfg.seed = cfg.seed;
  fit_cfg.objective = cfg.objective;
  return cfg.exact ? fit_exact(a, x_fit, fit_cfg)
                   : fit_local_search(a, x_fit, fit_cfg);
}

// Lower clamp that balances the approximation and stochastic error terms:
//   gamma(rho) = n^{-2/3} rho^{2/3} (k^2 + n log k)^{1/3}.
// Undefined at k = 1, where log k vanishes and no tradeoff exists.
inline double gamma_tradeoff(int n, int k, double rho) {
  if (n < 2) throw std::domain_error("need n >= 2");
  if (k < 2) throw std::domain_error("tradeoff undefined for k < 2");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::domain_error("rho must lie in (0, 1)");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return std::pow(nn, -2.0 / 3.0) * std::pow(rho, 2.0 / 3.0) *
         std::cbrt(kk * kk + nn * std::log(kk));
}

// Block count balancing bias against variance for an alpha-smooth graphon:
//   k = ceil(n^{1/(1 + a)} * rho^{1/(2 + 2a)}),  a = min(alpha, 1),
// floored at 1.
inline int choose_k(int n, double rho, double alpha) {
  if (n < 2) throw std::domain_error("need n >= 2");
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::domain_error("rho must lie in (0, 1]");
  if (!(alpha > 0.0)) throw std::domain_error("smoothness must be positive");
  const double a = std::min(alpha, 1.0);
  const double v = std::pow(static_cast<double>(n), 1.0 / (1.0 + a)) *
                   std::pow(rho, 1.0 / (2.0 + 2.0 * a));
  return std::max(1, static_cast<int>(std::ceil(v)));
}

struct BlockApprox {
  SymZeroDiagMatrix theta;  // block-constant surrogate of the graphon model
  Labeling z_star;          // latent positions binned into k equal bins
  double kl_bound_rhs = 0.0;
};

// Block-constant surrogate obtained by binning latent positions into k equal
// bins and evaluating the graphon at the bin right endpoints, together with
// the guaranteed bound on its KL distance from the true matrix:
//   K(theta, surrogate) <= 4 n^2 rho M^2 / (c_inf (1 - rho)) * k^{-2 min(alpha,1)}.
// Requires smoothness metadata, a positive infimum, and rho <= 1 - inf W.
inline BlockApprox graphon_block_approx(const Graphon& w, double rho,
                                        const LatentPositions& zeta, int k) {
  const int n = static_cast<int>(zeta.size());
  if (n < 2) throw std::invalid_argument("need at least 2 latent positions");
  if (k < 1) throw std::invalid_argument("need k >= 1");
  if (!w.has_holder())
    throw std::domain_error(
        "graphon carries no smoothness metadata; bound unavailable");
  const double c_inf = w.infimum();
  if (!(c_inf > 0.0))
    throw std::domain_error("graphon infimum must be positive");
  if (!(rho > 0.0 && rho <= 1.0 - c_inf))
    throw std::domain_error("need 0 < rho <= 1 - inf W");

  std::vector<int> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double zi = zeta[static_cast<std::size_t>(i)];
    if (!(zi >= 0.0 && zi <= 1.0))
      throw std::domain_error("latent position outside [0, 1]");
    // bin a covers [(a-1)/k, a/k), except the last bin which includes 1
    int bin = 1 + static_cast<int>(std::floor(zi * k));
    if (bin > k) bin = k;
    z[static_cast<std::size_t>(i)] = bin;
  }

  BlockApprox out;
  out.z_star = Labeling(std::move(z), k);
  SymZeroDiagMatrix theta(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      theta.set(i, j, rho * w(static_cast<double>(out.z_star[i]) / k,
                              static_cast<double>(out.z_star[j]) / k));
  out.theta = std::move(theta);

  const double alpha = std::min(w.holder_alpha(), 1.0);
  const double m = w.holder_m();
  out.kl_bound_rhs = 4.0 * static_cast<double>(n) * n * rho * m * m /
                     (c_inf * (1.0 - rho)) *
                     std::pow(static_cast<double>(k), -2.0 * alpha);
  return out;
}

}  // namespace netml
