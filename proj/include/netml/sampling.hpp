#pragma once

// Observation designs: which pairs of the adjacency matrix are revealed.
//
// A design specifies entrywise observation probabilities Pi_ij; the mask X
// is sampled entrywise-independently as X_ij ~ Bernoulli(Pi_ij).  The
// exo-centered mask (all pairs touching a fixed node subset) is generated
// directly and is *not* entrywise independent; harness output labels such
// runs "design: dependent-mask".

#include <netml/rng.hpp>
#include <netml/sym_matrix.hpp>

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace netml {

// A set of unordered node pairs (0-based, i < j), kept sorted.
using PairSet = std::vector<std::pair<int, int>>;

// Entrywise-independent observation designs.
struct UniformDesign {
  double p;  // every pair observed with probability p
};
struct DyadDesign {
  BlockMatrix p;  // Pi_ij = P_{z(i) z(j)}
  Labeling z;
};
struct ExplicitDesign {
  SymZeroDiagMatrix pi;
};
using SamplingDesign = std::variant<UniformDesign, DyadDesign, ExplicitDesign>;

// Expand a design to its observation-probability matrix.
inline SymZeroDiagMatrix design_to_pi(const SamplingDesign& design, int n) {
  if (std::holds_alternative<UniformDesign>(design)) {
    const double p = std::get<UniformDesign>(design).p;
    if (!(p >= 0.0 && p <= 1.0))
      throw std::domain_error("observation probability outside [0, 1]");
    return SymZeroDiagMatrix(n, p);
  }
  if (std::holds_alternative<DyadDesign>(design)) {
    const auto& d = std::get<DyadDesign>(design);
    if (d.z.n() != n)
      throw std::invalid_argument("dyad design labeling has wrong length");
    if (!d.p.is_probability())
      throw std::domain_error("dyad probabilities outside [0, 1]");
    return theta_from_blockmodel(BlockModel(d.p, d.z));
  }
  const auto& pi = std::get<ExplicitDesign>(design).pi;
  if (pi.n() != n)
    throw std::invalid_argument("explicit design has wrong dimension");
  if (!pi.is_probability())
    throw std::domain_error("observation probabilities outside [0, 1]");
  return pi;
}

// Sample the observation mask X_ij ~ Bernoulli(Pi_ij), independent over
// pairs.  Uses its own domain tag, so with equal seeds the mask stream never
// collides with the adjacency stream.
inline SymZeroDiagMatrix sample_mask(const SymZeroDiagMatrix& pi,
                                     std::uint64_t seed) {
  if (!pi.is_probability())
    throw std::domain_error("observation probabilities must lie in [0, 1]");
  const int n = pi.n();
  SymZeroDiagMatrix x(n);
  for (std::int64_t t = 0; t < pi.pairs(); ++t) {
    const double u =
        keyed_uniform(seed, tag::mask, static_cast<std::uint64_t>(t));
    x.set_pair(t, u < pi.at_pair(t) ? 1.0 : 0.0);
  }
  return x;
}

// Deterministic egocentric mask: X_ij = 1 iff i or j lies in the sampled
// node set (1-based node indices).  Entries sharing a sampled node are
// dependent; this is not an entrywise-independent design.
inline SymZeroDiagMatrix mask_exo_centered(int n,
                                           const std::vector<int>& sampled_nodes) {
  if (n < 2) throw std::invalid_argument("mask needs at least 2 nodes");
  std::vector<bool> in_set(static_cast<std::size_t>(n), false);
  for (int node : sampled_nodes) {
    if (node < 1 || node > n)
      throw std::out_of_range("sampled node " + std::to_string(node) +
                              " outside 1.." + std::to_string(n));
    in_set[static_cast<std::size_t>(node - 1)] = true;
  }
  SymZeroDiagMatrix x(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (in_set[static_cast<std::size_t>(i)] ||
          in_set[static_cast<std::size_t>(j)])
        x.set(i, j, 1.0);
  return x;
}

// Sample a uniformly random subset of exactly n distinct pairs (i, j), i < j,
// without replacement (Floyd's algorithm over packed pair indices).
// Returns the pairs sorted lexicographically.
inline PairSet sample_omega(int n, std::uint64_t seed) {
  if (n < 4)
    throw std::domain_error("pair subset sampling needs n >= 4");
  const std::int64_t total = pair_count(n);
  const std::int64_t m = n;  // subset size equals the node count
  CounterRng rng(seed, tag::omega, 0);
  std::set<std::int64_t> chosen;
  for (std::int64_t j = total - m; j < total; ++j) {
    const auto t = static_cast<std::int64_t>(
        rng.below(static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  PairSet omega;
  omega.reserve(static_cast<std::size_t>(m));
  for (std::int64_t t : chosen) omega.push_back(pair_from_index(n, t));
  return omega;
}

}  // namespace netml
