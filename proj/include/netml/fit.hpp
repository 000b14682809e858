#pragma once

// Maximum-likelihood fitting of block models to a partially observed graph.
//
// For binary A and mask X, maximizing the observed-pair Bernoulli likelihood
// of (Q, z) is the same as minimizing
//     sum over i < j of X_ij * K(A_ij, Q_{z(i) z(j)}),
// where K is the Bernoulli KL divergence.  For a fixed labeling z the inner
// optimum over Q is the observed block mean
//     Q_ab = sum(X A) / sum(X)   over pairs with labels {a, b},
// clamped to the constraint interval [gamma, rho]; the same mean also
// minimizes the least-squares objective, so both criteria share one profile
// step.  Searching over labelings is done either exhaustively (small k^n)
// or by multi-restart greedy descent.

#include <netml/common.hpp>
#include <netml/divergence.hpp>
#include <netml/rng.hpp>
#include <netml/sym_matrix.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace netml {

enum class Objective { kl, ls };

inline Objective objective_from_string(const std::string& s) {
  if (s == "kl") return Objective::kl;
  if (s == "ls") return Objective::ls;
  throw ConfigError("unknown objective '" + s + "' (expected kl or ls)");
}

struct FitConfig {
  int k = 1;
  double gamma = 0.0;   // lower clamp for block probabilities
  double rho = 1.0;     // upper clamp
  int restarts = 10;    // local search restarts
  int max_sweeps = 100; // per restart
  std::uint64_t seed = 0;
  Objective objective = Objective::kl;

  void validate() const {
    if (k < 1) throw std::invalid_argument("fit needs k >= 1");
    if (!(gamma > 0.0 && gamma <= rho && rho < 1.0))
      throw std::invalid_argument("need 0 < gamma <= rho < 1");
    if (restarts < 1) throw std::invalid_argument("need restarts >= 1");
    if (max_sweeps < 1) throw std::invalid_argument("need max_sweeps >= 1");
  }
};

struct FitResult {
  BlockModel model;
  SymZeroDiagMatrix theta_hat;  // entries in [gamma, rho]
  double objective_value = 0.0;
  int n_sweeps = 0;        // sweeps used by the winning restart
  int n_restarts_used = 0; // restarts actually run
  bool converged = false;  // winning restart stopped before max_sweeps
};

// Per-block-pair observation counts: for unordered labels {a, b},
//   sum_w  = number of observed pairs, sum_wa = observed edges among them.
// Both are integer-valued, so updates are exact in double arithmetic.
class BlockPairStats {
 public:
  BlockPairStats(int k) : k_(k), w_(sz(k), 0.0), wa_(sz(k), 0.0) {}

  double sum_w(int a, int b) const { return w_[idx(a, b)]; }
  double sum_wa(int a, int b) const { return wa_[idx(a, b)]; }

  void add(int a, int b, double w, double wa) {
    w_[idx(a, b)] += w;
    wa_[idx(a, b)] += wa;
  }

  int k() const { return k_; }

 private:
  static std::size_t sz(int k) { return static_cast<std::size_t>(k) * k; }
  // symmetric storage: mirror writes via canonical (min, max) cell
  std::size_t idx(int a, int b) const {
    if (a > b) std::swap(a, b);
    return static_cast<std::size_t>(a - 1) * k_ + (b - 1);
  }

  int k_;
  std::vector<double> w_, wa_;
};

// Accumulate block-pair stats of (A, X) under labeling z.
inline BlockPairStats block_stats(const SymZeroDiagMatrix& a,
                                  const SymZeroDiagMatrix& x,
                                  const Labeling& z) {
  const int n = a.n();
  if (x.n() != n || z.n() != n)
    throw std::invalid_argument("block_stats: dimension mismatch");
  BlockPairStats stats(z.k);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double xw = x(i, j);
      if (xw == 0.0) continue;
      stats.add(z[i], z[j], xw, xw * a(i, j));
    }
  return stats;
}

namespace detail {

inline double clamp01(double v, double lo, double hi) {
  return std::min(hi, std::max(lo, v));
}

// Profiled block probability for one cell: observed mean clamped to
// [gamma, rho]; cells with no observed pairs fall back to the midpoint.
inline double profile_cell(double sum_w, double sum_wa, double gamma,
                           double rho) {
  if (sum_w <= 0.0) return 0.5 * (gamma + rho);
  return clamp01(sum_wa / sum_w, gamma, rho);
}

// Objective contribution of one cell at block probability q in (0, 1).
// KL: sum X K(A, q) over the cell's pairs reduces to edge/non-edge counts
// because K(1, q) = -log q and K(0, q) = -log(1 - q).
inline double cell_score(double sum_w, double sum_wa, double q,
                         Objective obj) {
  if (sum_w <= 0.0) return 0.0;
  const double ones = sum_wa, zeros = sum_w - sum_wa;
  if (obj == Objective::kl)
    return -ones * std::log(q) - zeros * std::log1p(-q);
  return ones * (1.0 - q) * (1.0 - q) + zeros * q * q;
}

// Cell score at the cell's own profiled probability.
inline double profiled_cell_score(double sum_w, double sum_wa, double gamma,
                                  double rho, Objective obj) {
  return cell_score(sum_w, sum_wa, profile_cell(sum_w, sum_wa, gamma, rho),
                    obj);
}

// Total profiled objective of a labeling, from its stats.
inline double profiled_objective(const BlockPairStats& stats, double gamma,
                                 double rho, Objective obj) {
  double total = 0.0;
  const int k = stats.k();
  for (int a = 1; a <= k; ++a)
    for (int b = a; b <= k; ++b)
      total += profiled_cell_score(stats.sum_w(a, b), stats.sum_wa(a, b),
                                   gamma, rho, obj);
  return total;
}

inline void check_binary_inputs(const SymZeroDiagMatrix& a,
                                const SymZeroDiagMatrix& x) {
  if (!a.is_binary()) throw std::domain_error("adjacency must be 0/1-valued");
  if (!x.is_binary()) throw std::domain_error("mask must be 0/1-valued");
  if (x.n() != a.n()) throw std::invalid_argument("mask dimension mismatch");
}

inline double pow_labelings(int k, int n) {
  return std::pow(static_cast<double>(k), static_cast<double>(n));
}

}  // namespace detail

// Profiled block probabilities for a fixed labeling: observed block means
// clamped to [gamma, rho], midpoint (gamma + rho) / 2 for cells with no
// observed pairs.  This single profile step is optimal for both the KL and
// the least-squares objective.
inline BlockMatrix profile_q(const SymZeroDiagMatrix& a,
                             const SymZeroDiagMatrix& x, const Labeling& z,
                             double gamma, double rho) {
  detail::check_binary_inputs(a, x);
  if (!(gamma > 0.0 && gamma <= rho && rho < 1.0))
    throw std::invalid_argument("need 0 < gamma <= rho < 1");
  const BlockPairStats stats = block_stats(a, x, z);
  BlockMatrix q(z.k);
  for (int c = 1; c <= z.k; ++c)
    for (int d = c; d <= z.k; ++d)
      q.set(c, d, detail::profile_cell(stats.sum_w(c, d), stats.sum_wa(c, d),
                                       gamma, rho));
  return q;
}

// Observed-pair objective of an arbitrary block model:
//   kl: sum X_ij K(A_ij, Q_{z(i) z(j)})   (the negative log-likelihood up to
//       the entropy of A, which is zero for binary A),
//   ls: sum X_ij (A_ij - Q_{z(i) z(j)})^2.
// A block probability of exactly 0 or 1 that disagrees with an observed
// entry makes the KL objective infinite and raises an error naming the pair.
inline double objective(const SymZeroDiagMatrix& a, const SymZeroDiagMatrix& x,
                        const BlockModel& bm, Objective obj) {
  detail::check_binary_inputs(a, x);
  if (bm.n() != a.n())
    throw std::invalid_argument("block model dimension mismatch");
  const int n = a.n();
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (x(i, j) == 0.0) continue;
      const double q = bm.entry(i, j);
      if (obj == Objective::ls) {
        const double d = a(i, j) - q;
        total += d * d;
        continue;
      }
      try {
        total += bernoulli_kl(a(i, j), q);
      } catch (const DivergenceInfiniteError&) {
        throw DivergenceInfiniteError("objective infinite at pair " +
                                      detail::pair_label(i, j));
      }
    }
  return total;
}

namespace detail {

// Assemble a FitResult from a labeling: profile Q, expand theta_hat, and
// recompute the objective through the reference entrywise path.
inline FitResult make_result(const SymZeroDiagMatrix& a,
                             const SymZeroDiagMatrix& x, Labeling z,
                             const FitConfig& cfg) {
  BlockMatrix q = profile_q(a, x, z, cfg.gamma, cfg.rho);
  BlockModel model(std::move(q), std::move(z));
  FitResult r;
  r.theta_hat = theta_from_blockmodel(model);
  r.objective_value = objective(a, x, model, cfg.objective);
  r.model = std::move(model);
  return r;
}

}  // namespace detail

// Exact estimator: enumerate every labeling z in {1..k}^n in lexicographic
// order, profile Q for each, and keep the smallest objective.  Ties keep the
// first (lexicographically smallest) labeling.  Refuses when k^n exceeds the
// enumeration budget.
inline FitResult fit_exact(const SymZeroDiagMatrix& a,
                           const SymZeroDiagMatrix& x, const FitConfig& cfg) {
  cfg.validate();
  detail::check_binary_inputs(a, x);
  const int n = a.n(), k = cfg.k;
  const double count = detail::pow_labelings(k, n);
  if (count > kEnumerationBudget)
    throw EnumerationBudgetError(
        "exhaustive search over " + std::to_string(k) + "^" +
        std::to_string(n) + " = " + std::to_string(count) +
        " labelings exceeds the budget of " +
        std::to_string(static_cast<long long>(kEnumerationBudget)));

  std::vector<int> z(static_cast<std::size_t>(n), 1);
  std::vector<int> best_z;
  double best_obj = std::numeric_limits<double>::infinity();
  for (;;) {
    const Labeling lab(z, k);
    const BlockPairStats stats = block_stats(a, x, lab);
    const double obj =
        detail::profiled_objective(stats, cfg.gamma, cfg.rho, cfg.objective);
    if (obj < best_obj) {
      best_obj = obj;
      best_z = z;
    }
    // next labeling in lexicographic order (rightmost position fastest)
    int pos = n - 1;
    while (pos >= 0 && z[static_cast<std::size_t>(pos)] == k) {
      z[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++z[static_cast<std::size_t>(pos)];
  }
  FitResult r = detail::make_result(a, x, Labeling(best_z, k), cfg);
  r.n_restarts_used = 1;
  r.converged = true;
  return r;
}

// Initial labeling of restart r: each node uniform on 1..k, drawn from the
// restart's own stream so restarts are independent and reproducible.
// Exposed so tests can verify the descent property against the start point.
inline Labeling initial_labeling(std::uint64_t seed, int restart, int n,
                                 int k) {
  CounterRng rng(seed, tag::fit, static_cast<std::uint64_t>(restart));
  std::vector<int> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] =
        1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return Labeling(std::move(z), k);
}

namespace detail {

// One greedy restart: sweep nodes in random order, moving each node to the
// block that most decreases the profiled objective, until a full sweep makes
// no move or the sweep budget runs out.  Moves update only the O(k) affected
// block-pair cells; counts are integers in doubles, so apply/revert is exact.
struct RestartOutcome {
  Labeling z;
  double obj;
  int sweeps;
  bool converged;
};

inline RestartOutcome greedy_restart(const SymZeroDiagMatrix& a,
                                     const SymZeroDiagMatrix& x,
                                     const FitConfig& cfg, int restart) {
  const int n = a.n(), k = cfg.k;
  CounterRng rng(cfg.seed, tag::fit, static_cast<std::uint64_t>(restart));
  std::vector<int> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] =
        1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));

  BlockPairStats stats(k);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double xw = x(i, j);
      if (xw == 0.0) continue;
      stats.add(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)],
                xw, xw * a(i, j));
    }

  // Node i's observed pair counts into each block under the current z.
  std::vector<double> cnt(static_cast<std::size_t>(k) + 1);
  std::vector<double> edg(static_cast<std::size_t>(k) + 1);

  // Scores of the cells a move from block c to d can touch: (c, *), (d, *).
  const auto affected_score = [&](int c, int d) {
    double s = 0.0;
    for (int b = 1; b <= k; ++b) {
      s += profiled_cell_score(stats.sum_w(c, b), stats.sum_wa(c, b),
                               cfg.gamma, cfg.rho, cfg.objective);
      if (b != c)
        s += profiled_cell_score(stats.sum_w(d, b), stats.sum_wa(d, b),
                                 cfg.gamma, cfg.rho, cfg.objective);
    }
    return s;
  };

  // Shift node i's pairs between cells as if it moved from c to d.
  const auto apply_move = [&](int c, int d) {
    for (int b = 1; b <= k; ++b) {
      if (b == c || b == d) continue;
      stats.add(c, b, -cnt[static_cast<std::size_t>(b)],
                -edg[static_cast<std::size_t>(b)]);
      stats.add(d, b, cnt[static_cast<std::size_t>(b)],
                edg[static_cast<std::size_t>(b)]);
    }
    stats.add(c, c, -cnt[static_cast<std::size_t>(c)],
              -edg[static_cast<std::size_t>(c)]);
    stats.add(c, d, cnt[static_cast<std::size_t>(c)] - cnt[static_cast<std::size_t>(d)],
              edg[static_cast<std::size_t>(c)] - edg[static_cast<std::size_t>(d)]);
    stats.add(d, d, cnt[static_cast<std::size_t>(d)],
              edg[static_cast<std::size_t>(d)]);
  };

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  int sweeps = 0;
  bool converged = false;
  while (sweeps < cfg.max_sweeps) {
    shuffle_sequence(order.data(), order.size(), rng);
    bool moved = false;
    for (int i : order) {
      const int c = z[static_cast<std::size_t>(i)];
      std::fill(cnt.begin(), cnt.end(), 0.0);
      std::fill(edg.begin(), edg.end(), 0.0);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double xw = x(i, j);
        if (xw == 0.0) continue;
        const auto b = static_cast<std::size_t>(z[static_cast<std::size_t>(j)]);
        cnt[b] += xw;
        edg[b] += xw * a(i, j);
      }
      int best_d = c;
      double best_delta = 0.0;  // ties keep the current block
      for (int d = 1; d <= k; ++d) {
        if (d == c) continue;
        const double before = affected_score(c, d);
        apply_move(c, d);
        const double delta = affected_score(c, d) - before;
        apply_move(d, c);  // exact revert: counts are integer-valued
        if (delta < best_delta) {
          best_delta = delta;
          best_d = d;
        }
      }
      if (best_d != c) {
        apply_move(c, best_d);
        z[static_cast<std::size_t>(i)] = best_d;
        moved = true;
      }
    }
    ++sweeps;
    if (!moved) {
      converged = true;
      break;
    }
  }

  return RestartOutcome{
      Labeling(std::move(z), k),
      profiled_objective(stats, cfg.gamma, cfg.rho, cfg.objective), sweeps,
      converged};
}

}  // namespace detail

// Multi-restart greedy search over labelings.  Each restart owns its RNG
// stream keyed by (seed, restart index), so the outcome is a deterministic
// function of the inputs regardless of evaluation order; the best restart
// wins, with ties broken by the lowest restart index.
inline FitResult fit_local_search(const SymZeroDiagMatrix& a,
                                  const SymZeroDiagMatrix& x,
                                  const FitConfig& cfg) {
  cfg.validate();
  detail::check_binary_inputs(a, x);
  std::optional<detail::RestartOutcome> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    detail::RestartOutcome out = detail::greedy_restart(a, x, cfg, r);
    if (!best || out.obj < best->obj) best = std::move(out);
  }
  FitResult result = detail::make_result(a, x, std::move(best->z), cfg);
  result.n_sweeps = best->sweeps;
  result.converged = best->converged;
  result.n_restarts_used = cfg.restarts;
  return result;
}

// Least-squares variant: identical search structure (and identical profile
// step) with the squared-error objective.
inline FitResult fit_least_squares(const SymZeroDiagMatrix& a,
                                   const SymZeroDiagMatrix& x,
                                   FitConfig cfg) {
  cfg.objective = Objective::ls;
  return fit_local_search(a, x, cfg);
}

}  // namespace netml
