#pragma once

// Generative models: graphons, latent positions, and edge sampling.
//
// A graphon is a symmetric function W : [0,1]^2 -> [0, inf).  Together with
// a sparsity level rho and latent positions zeta it induces the
// connection-probability matrix Theta_ij = rho * W(zeta_i, zeta_j).
// The built-in catalog covers step functions (piecewise-constant, includes
// planted partitions and constants) and affine functions
// W(x, y) = c0 + c1 (x + y) / 2.

#include <netml/rng.hpp>
#include <netml/sym_matrix.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace netml {

class Graphon {
 public:
  enum class Kind { step, affine };

  // Piecewise-constant graphon: bins [b_0, b_1), ..., [b_{k-1}, b_k] with
  // b_0 = 0, b_k = 1 and interior breaks strictly increasing; W on bin pair
  // (a, b) equals q(a, b).  Bins are right-open except the last.
  static Graphon step(BlockMatrix q, std::vector<double> breaks) {
    if (static_cast<int>(breaks.size()) != q.k() - 1)
      throw std::invalid_argument("step graphon needs k-1 interior breaks");
    for (std::size_t t = 0; t < breaks.size(); ++t) {
      const double lo = t == 0 ? 0.0 : breaks[t - 1];
      if (!(breaks[t] > lo && breaks[t] < 1.0))
        throw std::invalid_argument(
            "breaks must be strictly increasing inside (0, 1)");
    }
    Graphon w;
    w.kind_ = Kind::step;
    w.q_ = std::move(q);
    w.breaks_ = std::move(breaks);
    return w;
  }

  // Affine graphon c0 + c1 (x + y) / 2 with c0 >= 0 and values in [0, 1]
  // on the unit square (Hoelder-smooth with exponent 1, constant |c1| / 2).
  static Graphon affine(double c0, double c1) {
    if (c0 < 0.0 || c0 + c1 < 0.0)
      throw std::invalid_argument("affine graphon must be nonnegative");
    Graphon w;
    w.kind_ = Kind::affine;
    w.c0_ = c0;
    w.c1_ = c1;
    return w;
  }

  static Graphon constant(double c) {
    return step(BlockMatrix(1, c), {});
  }

  // Planted partition on k equal bins: `within` on the diagonal, `cross`
  // elsewhere.
  static Graphon planted_partition(int k, double within, double cross) {
    BlockMatrix q(k, cross);
    for (int a = 1; a <= k; ++a) q.set(a, a, within);
    std::vector<double> breaks;
    for (int a = 1; a < k; ++a)
      breaks.push_back(static_cast<double>(a) / k);
    return step(std::move(q), std::move(breaks));
  }

  Kind kind() const { return kind_; }

  double operator()(double x, double y) const {
    if (kind_ == Kind::affine) return c0_ + c1_ * (x + y) / 2.0;
    return q_(bin(x), bin(y));
  }

  // Bin of x under the step breaks (1-based), right-open except the last.
  int bin(double x) const {
    const int k = q_.k();
    for (int a = 1; a < k; ++a)
      if (x < breaks_[static_cast<std::size_t>(a - 1)]) return a;
    return k;
  }

  double infimum() const {
    if (kind_ == Kind::affine) return std::min(c0_, c0_ + c1_);
    return q_.min_entry();
  }

  double supremum() const {
    if (kind_ == Kind::affine) return std::max(c0_, c0_ + c1_);
    return q_.max_entry();
  }

  // Smoothness metadata, where known: affine graphons (and constants) carry
  // exponent alpha = 1 with constant M; general step graphons do not.
  bool has_holder() const {
    if (kind_ == Kind::affine) return true;
    return q_.k() == 1;  // constants are 1-smooth with M = 0
  }
  double holder_alpha() const { return 1.0; }
  double holder_m() const {
    if (kind_ == Kind::affine) return std::abs(c1_) / 2.0;
    return 0.0;
  }

  // Step accessors (valid for Kind::step).
  const BlockMatrix& q() const { return q_; }
  const std::vector<double>& breaks() const { return breaks_; }

 private:
  Graphon() = default;

  Kind kind_ = Kind::affine;
  double c0_ = 0.0, c1_ = 0.0;  // affine
  BlockMatrix q_;               // step
  std::vector<double> breaks_;  // step, k-1 interior cut points
};

// Latent positions: one point in [0, 1] per node.
using LatentPositions = std::vector<double>;

// Draw n latent positions i.i.d. uniform on [0, 1).  Node i's value depends
// only on (seed, i), never on iteration order.
inline LatentPositions sample_zeta(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_zeta needs n >= 1");
  LatentPositions zeta(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    zeta[static_cast<std::size_t>(i)] =
        keyed_uniform(seed, tag::latent, static_cast<std::uint64_t>(i));
  return zeta;
}

// Connection probabilities rho * W(zeta_i, zeta_j).  Requires every entry to
// be a probability: rho > 0 and rho * sup W <= 1.
inline SymZeroDiagMatrix theta_from_graphon(const Graphon& w, double rho,
                                            const LatentPositions& zeta) {
  const int n = static_cast<int>(zeta.size());
  if (n < 2) throw std::invalid_argument("need at least 2 latent positions");
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::domain_error("rho must lie in (0, 1]");
  if (rho * w.supremum() > 1.0 + 1e-15)
    throw std::domain_error("rho * sup W exceeds 1: not a probability");
  for (double z : zeta)
    if (!(z >= 0.0 && z <= 1.0))
      throw std::domain_error("latent position outside [0, 1]");
  SymZeroDiagMatrix theta(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      theta.set(i, j, rho * w(zeta[static_cast<std::size_t>(i)],
                              zeta[static_cast<std::size_t>(j)]));
  return theta;
}

// Sample a simple undirected graph: A_ij ~ Bernoulli(theta_ij) independently
// over pairs i < j, symmetric, zero diagonal.  Each pair's draw depends only
// on (seed, packed pair index).
inline SymZeroDiagMatrix sample_adjacency(const SymZeroDiagMatrix& theta,
                                          std::uint64_t seed) {
  if (!theta.is_probability())
    throw std::domain_error("connection probabilities must lie in [0, 1]");
  const int n = theta.n();
  SymZeroDiagMatrix a(n);
  for (std::int64_t t = 0; t < theta.pairs(); ++t) {
    const double u =
        keyed_uniform(seed, tag::adjacency, static_cast<std::uint64_t>(t));
    a.set_pair(t, u < theta.at_pair(t) ? 1.0 : 0.0);
  }
  return a;
}

}  // namespace netml
