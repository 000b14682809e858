#pragma once

// Core value types: symmetric zero-diagonal matrices over node pairs,
// small symmetric block matrices, block labelings, and block models.
//
// Conventions used throughout the library:
//   * nodes are indexed 0..n-1 in code; error messages and text formats
//     report 1-based indices,
//   * block labels are 1..k (validated), matching the labeling contract,
//   * every sum over matrix entries runs over unordered pairs i < j only.

#include <netml/common.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace netml {

// Number of unordered pairs of n nodes.
constexpr std::int64_t pair_count(int n) {
  return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

// Packed index of pair (i, j), i < j, in lexicographic order:
// (0,1), (0,2), ..., (0,n-1), (1,2), ...
constexpr std::int64_t pair_index(int n, int i, int j) {
  return static_cast<std::int64_t>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
}

// Inverse of pair_index.
inline std::pair<int, int> pair_from_index(int n, std::int64_t idx) {
  int i = 0;
  std::int64_t row = n - 1;  // pairs in row i
  while (idx >= row) {
    idx -= row;
    --row;
    ++i;
  }
  return {i, static_cast<int>(i + 1 + idx)};
}

// Symmetric n x n matrix with zero diagonal, stored as the packed upper
// triangle.  Used for edge indicators, observation masks, observation
// probabilities, and connection-probability matrices alike.
class SymZeroDiagMatrix {
 public:
  SymZeroDiagMatrix() : n_(0) {}

  explicit SymZeroDiagMatrix(int n, double fill = 0.0)
      : n_(n), v_(static_cast<std::size_t>(pair_count(n)), fill) {
    if (n < 2) throw std::invalid_argument("matrix needs at least 2 nodes");
  }

  static SymZeroDiagMatrix ones(int n) { return SymZeroDiagMatrix(n, 1.0); }

  static SymZeroDiagMatrix from_upper(int n, std::vector<double> upper) {
    SymZeroDiagMatrix m(n);
    if (upper.size() != m.v_.size())
      throw std::invalid_argument("upper triangle has wrong length");
    m.v_ = std::move(upper);
    return m;
  }

  int n() const { return n_; }
  std::int64_t pairs() const { return static_cast<std::int64_t>(v_.size()); }

  // Entry (i, j), i != j, in either order.
  double operator()(int i, int j) const { return v_[idx(i, j)]; }
  void set(int i, int j, double value) { v_[idx(i, j)] = value; }

  double at_pair(std::int64_t p) const { return v_[static_cast<std::size_t>(p)]; }
  void set_pair(std::int64_t p, double value) {
    v_[static_cast<std::size_t>(p)] = value;
  }

  const std::vector<double>& upper() const { return v_; }

  bool is_probability() const {
    for (double x : v_)
      if (!(x >= 0.0 && x <= 1.0)) return false;
    return true;
  }

  bool is_binary() const {
    for (double x : v_)
      if (x != 0.0 && x != 1.0) return false;
    return true;
  }

  // Largest absolute entry (diagonal is zero by construction).
  double inf_norm() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  friend bool operator==(const SymZeroDiagMatrix& a,
                         const SymZeroDiagMatrix& b) {
    return a.n_ == b.n_ && a.v_ == b.v_;
  }

 private:
  std::size_t idx(int i, int j) const {
    if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_)
      throw std::out_of_range("pair (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ") out of range");
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(pair_index(n_, i, j));
  }

  int n_;
  std::vector<double> v_;
};

// Dense symmetric k x k matrix of block parameters, indexed by block labels
// 1..k (both orders give the same entry).
class BlockMatrix {
 public:
  BlockMatrix() : k_(0) {}

  explicit BlockMatrix(int k, double fill = 0.0)
      : k_(k), v_(static_cast<std::size_t>(k) * k, fill) {
    if (k < 1) throw std::invalid_argument("block matrix needs k >= 1");
  }

  // Build from the upper triangle including the diagonal, row-major:
  // (1,1), (1,2), ..., (1,k), (2,2), ..., (k,k).
  static BlockMatrix from_upper(int k, const std::vector<double>& upper) {
    BlockMatrix q(k);
    if (upper.size() != static_cast<std::size_t>(k) * (k + 1) / 2)
      throw std::invalid_argument("block upper triangle has wrong length");
    std::size_t t = 0;
    for (int a = 1; a <= k; ++a)
      for (int b = a; b <= k; ++b) q.set(a, b, upper[t++]);
    return q;
  }

  int k() const { return k_; }

  double operator()(int a, int b) const {
    return v_[static_cast<std::size_t>(a - 1) * k_ + (b - 1)];
  }

  void set(int a, int b, double value) {
    v_[static_cast<std::size_t>(a - 1) * k_ + (b - 1)] = value;
    v_[static_cast<std::size_t>(b - 1) * k_ + (a - 1)] = value;
  }

  bool is_probability() const {
    for (double x : v_)
      if (!(x >= 0.0 && x <= 1.0)) return false;
    return true;
  }

  double max_entry() const {
    double m = v_.empty() ? 0.0 : v_[0];
    for (double x : v_) m = std::max(m, x);
    return m;
  }

  double min_entry() const {
    double m = v_.empty() ? 0.0 : v_[0];
    for (double x : v_) m = std::min(m, x);
    return m;
  }

  friend bool operator==(const BlockMatrix& a, const BlockMatrix& b) {
    return a.k_ == b.k_ && a.v_ == b.v_;
  }

 private:
  int k_;
  std::vector<double> v_;
};

// Assignment of each node to one of k blocks.  Labels run 1..k; blocks may
// be empty (the space of labelings is all functions, not just surjections).
struct Labeling {
  std::vector<int> assignments;  // assignments[i] in 1..k for node i
  int k = 0;

  Labeling() = default;
  Labeling(std::vector<int> z, int blocks)
      : assignments(std::move(z)), k(blocks) {
    validate();
  }

  int n() const { return static_cast<int>(assignments.size()); }
  int operator[](int i) const { return assignments[static_cast<std::size_t>(i)]; }

  void validate() const {
    if (k < 1) throw std::invalid_argument("labeling needs k >= 1");
    for (int v : assignments)
      if (v < 1 || v > k)
        throw std::invalid_argument("block label " + std::to_string(v) +
                                    " outside 1.." + std::to_string(k));
  }

  friend bool operator==(const Labeling& a, const Labeling& b) {
    return a.k == b.k && a.assignments == b.assignments;
  }
};

// Block model: symmetric block parameters plus a labeling.  Induces the
// pairwise matrix entry Q_{z(i) z(j)}.
struct BlockModel {
  BlockMatrix q;
  Labeling z;

  BlockModel() = default;
  BlockModel(BlockMatrix q_in, Labeling z_in)
      : q(std::move(q_in)), z(std::move(z_in)) {
    if (q.k() != z.k)
      throw std::invalid_argument("block matrix and labeling disagree on k");
  }

  int n() const { return z.n(); }
  double entry(int i, int j) const { return q(z[i], z[j]); }
};

// Expand a block model to its pairwise connection-probability matrix.
inline SymZeroDiagMatrix theta_from_blockmodel(const BlockModel& bm) {
  if (!bm.q.is_probability())
    throw std::invalid_argument("block parameters must lie in [0, 1]");
  const int n = bm.n();
  SymZeroDiagMatrix theta(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) theta.set(i, j, bm.entry(i, j));
  return theta;
}

}  // namespace netml
