// Best block-constant approximations of a known truth, their thresholded
// lifts, and the two inequality audits.

#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

#include <cmath>

using Catch::Matchers::WithinAbs;
using namespace netml;

namespace {

SymZeroDiagMatrix planted_theta_n4() {
  BlockMatrix q(2, 0.05);
  q.set(1, 1, 0.95);
  q.set(2, 2, 0.95);
  return theta_from_blockmodel(BlockModel(q, Labeling({1, 1, 2, 2}, 2)));
}

}  // namespace

TEST_CASE("oracle_block_q is the observation-weighted block mean") {
  SymZeroDiagMatrix theta(3);
  theta.set(0, 1, 0.2);
  theta.set(0, 2, 0.4);
  theta.set(1, 2, 0.6);
  const Labeling z({1, 1, 1}, 1);
  CHECK_THAT(oracle_block_q(theta, SymZeroDiagMatrix::ones(3), z)(1, 1),
             WithinAbs(0.4, 1e-15));
  SymZeroDiagMatrix pi = SymZeroDiagMatrix::ones(3);
  pi.set(1, 2, 0.0);
  CHECK_THAT(oracle_block_q(theta, pi, z)(1, 1), WithinAbs(0.3, 1e-15));
}

TEST_CASE("oracle_block_q on a block-constant truth is a fixed point") {
  const SymZeroDiagMatrix theta = planted_theta_n4();
  const auto pi = testutil::random_matrix(4, 21, 0, 0.1, 1.0);
  const BlockMatrix q = oracle_block_q(theta, pi, Labeling({1, 1, 2, 2}, 2));
  CHECK_THAT(q(1, 1), WithinAbs(0.95, 1e-15));
  CHECK_THAT(q(2, 2), WithinAbs(0.95, 1e-15));
  CHECK_THAT(q(1, 2), WithinAbs(0.05, 1e-15));
}

TEST_CASE("oracle_block_q falls back to unweighted means when unobserved") {
  SymZeroDiagMatrix theta(4);
  theta.set(0, 1, 0.2);
  theta.set(2, 3, 0.8);
  theta.set(0, 2, 0.3);
  theta.set(0, 3, 0.3);
  theta.set(1, 2, 0.5);
  theta.set(1, 3, 0.5);
  SymZeroDiagMatrix pi(4);  // nothing observed at all
  const BlockMatrix q = oracle_block_q(theta, pi, Labeling({1, 1, 2, 2}, 2));
  CHECK_THAT(q(1, 1), WithinAbs(0.2, 1e-15));
  CHECK_THAT(q(2, 2), WithinAbs(0.8, 1e-15));
  CHECK_THAT(q(1, 2), WithinAbs(0.4, 1e-15));
}

TEST_CASE("oracle_theta_tilde recovers a representable truth exactly") {
  // power-of-two probabilities make every weighted mean exact in floating
  // point, so recovery can be asserted bit-for-bit
  SymZeroDiagMatrix theta(4);
  theta.set(0, 1, 0.5);
  theta.set(2, 3, 0.25);
  for (const auto& [i, j] : {std::pair{0, 2}, {0, 3}, {1, 2}, {1, 3}})
    theta.set(i, j, 0.125);
  const auto pi = testutil::random_matrix(4, 22, 0, 0.2, 1.0);
  const OracleResult r = oracle_theta_tilde(theta, pi, 2);
  CHECK(r.theta_tilde == theta);
  CHECK(r.kl_to_truth == 0.0);
  // lexicographically smallest representing labeling
  CHECK(r.model.z.assignments == std::vector<int>{1, 1, 2, 2});
}

TEST_CASE("oracle_theta_tilde with one block is the weighted global mean") {
  const auto theta = testutil::random_matrix(5, 23, 0, 0.1, 0.9);
  const auto pi = testutil::random_matrix(5, 23, 1, 0.1, 1.0);
  const OracleResult r = oracle_theta_tilde(theta, pi, 1);
  double num = 0.0, den = 0.0;
  for (std::int64_t t = 0; t < theta.pairs(); ++t) {
    num += pi.at_pair(t) * theta.at_pair(t);
    den += pi.at_pair(t);
  }
  for (std::int64_t t = 0; t < theta.pairs(); ++t)
    CHECK_THAT(r.theta_tilde.at_pair(t), WithinAbs(num / den, 1e-15));
}

TEST_CASE("oracle_theta_tilde beats random block-constant challengers") {
  const Graphon w = Graphon::affine(0.2, 0.6);
  const std::vector<double> zeta = sample_zeta(6, 24);
  const SymZeroDiagMatrix theta = theta_from_graphon(w, 1.0, zeta);
  const auto pi = testutil::random_matrix(6, 24, 1, 0.2, 1.0);
  const OracleResult r = oracle_theta_tilde(theta, pi, 2);
  for (std::uint64_t c = 0; c < 1000; ++c) {
    BlockMatrix q(2);
    CounterRng rng(25, testutil::kTestTag, c);
    q.set(1, 1, 0.001 + 0.998 * rng.uniform());
    q.set(1, 2, 0.001 + 0.998 * rng.uniform());
    q.set(2, 2, 0.001 + 0.998 * rng.uniform());
    const Labeling z = testutil::random_labeling(6, 2, 26, c);
    const SymZeroDiagMatrix b = theta_from_blockmodel(BlockModel(q, z));
    CHECK(r.kl_to_truth <= kl_weighted(theta, b, pi) + 1e-12);
  }
}

TEST_CASE("oracle search refuses oversized label spaces") {
  const SymZeroDiagMatrix theta(25, 0.3);
  CHECK_THROWS_AS(oracle_theta_tilde(theta, SymZeroDiagMatrix::ones(25), 2),
                  EnumerationBudgetError);
}

TEST_CASE("oracle barycenter beats a fine grid on every block value") {
  const auto theta = testutil::random_matrix(6, 27, 0, 0.05, 0.95);
  const auto pi = testutil::random_matrix(6, 27, 1, 0.0, 1.0);
  const Labeling z = testutil::random_labeling(6, 2, 27, 2);
  const BlockMatrix q = oracle_block_q(theta, pi, z);
  const double base =
      kl_weighted(theta, theta_from_blockmodel(BlockModel(q, z)), pi);
  double best = base;
  for (int aa = 1; aa <= 2; ++aa)
    for (int bb = aa; bb <= 2; ++bb) {
      BlockMatrix trial = q;
      for (double v = 1e-3; v < 1.0; v += 1e-3) {
        trial.set(aa, bb, v);
        best = std::min(
            best,
            kl_weighted(theta, theta_from_blockmodel(BlockModel(trial, z)),
                        pi));
      }
      trial.set(aa, bb, q(aa, bb));
    }
  CHECK(base <= best + 1e-6);
}

TEST_CASE("restricting attention to observed pairs can only help") {
  // weighted divergence to the weighted optimum <= weighted divergence to
  // the fully-observed optimum <= unweighted divergence to it
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto theta = testutil::random_matrix(5, seed, 8, 0.05, 0.95);
    const auto pi = testutil::random_matrix(5, seed, 9, 0.0, 1.0);
    const OracleResult weighted = oracle_theta_tilde(theta, pi, 2);
    const OracleResult full =
        oracle_theta_tilde(theta, SymZeroDiagMatrix::ones(5), 2);
    const double mid = kl_weighted(theta, full.theta_tilde, pi);
    CHECK(weighted.kl_to_truth <= mid + 1e-12);
    CHECK(mid <= kl_weighted(theta, full.theta_tilde,
                             SymZeroDiagMatrix::ones(5)) +
                     1e-12);
  }
}

TEST_CASE("threshold_oracle lifts exactly the small entries") {
  BlockMatrix q(2, 0.2);
  q.set(1, 1, 0.02);
  const BlockModel model(q, Labeling({1, 1, 2, 2}, 2));
  const ThresholdedOracle t = threshold_oracle(model, 0.05);
  CHECK(t.q(1, 1) == 0.05);
  CHECK(t.q(1, 2) == 0.2);
  CHECK(t.q(2, 2) == 0.2);
  CHECK(t.n_small == 1);  // only the (1,2) within-pair sat below 0.05
  for (std::int64_t p = 0; p < t.theta.pairs(); ++p)
    CHECK(t.theta.at_pair(p) >= 0.05);
}

TEST_CASE("threshold_oracle counts every pair under a uniform lift") {
  BlockMatrix q(1, 0.05);
  const BlockModel model(q, Labeling({1, 1, 1, 1}, 1));
  const ThresholdedOracle t = threshold_oracle(model, 0.1);
  CHECK(t.q(1, 1) == 0.1);
  CHECK(t.n_small == 6);
  // values already above the threshold are untouched
  const ThresholdedOracle id = threshold_oracle(model, 0.01);
  CHECK(id.q(1, 1) == 0.05);
  CHECK(id.n_small == 0);
  CHECK_THROWS_AS(threshold_oracle(model, 0.6), std::domain_error);
  CHECK_THROWS_AS(threshold_oracle(model, 0.0), std::domain_error);
}

TEST_CASE("threshold lemma: exact hand case and no-lift case") {
  const SymZeroDiagMatrix theta = planted_theta_n4();
  const SymZeroDiagMatrix pi = SymZeroDiagMatrix::ones(4);
  const OracleResult oracle = oracle_theta_tilde(theta, pi, 2);
  // gamma below every entry: nothing lifts, both sides zero
  const ThresholdedOracle none = threshold_oracle(oracle.model, 0.01);
  const LemmaReport r0 = check_threshold_lemma(theta, pi, oracle, none, 0.01);
  CHECK(r0.lhs == 0.0);
  CHECK(r0.rhs == 0.0);
  CHECK(r0.holds);
  // gamma = 0.1 lifts the four cross pairs from 0.05
  const ThresholdedOracle some = threshold_oracle(oracle.model, 0.1);
  CHECK(some.n_small == 4);
  const LemmaReport r1 = check_threshold_lemma(theta, pi, oracle, some, 0.1);
  // lhs = 4 * K(0.05, 0.1) since theta == theta_tilde here
  CHECK_THAT(r1.lhs, WithinAbs(4.0 * bernoulli_kl(0.05, 0.1), 1e-12));
  CHECK_THAT(r1.rhs, WithinAbs(0.8, 1e-15));
  CHECK(r1.holds);
}

TEST_CASE("threshold lemma holds across random instances") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto theta = testutil::random_matrix(6, seed, 10, 0.0, 1.0);
    const auto pi = testutil::random_matrix(6, seed, 11, 0.0, 1.0);
    const OracleResult oracle = oracle_theta_tilde(theta, pi, 2);
    CounterRng rng(seed, testutil::kTestTag, 12);
    const double gamma = 0.01 + 0.49 * rng.uniform();
    const ThresholdedOracle lifted = threshold_oracle(oracle.model, gamma);
    const LemmaReport rep =
        check_threshold_lemma(theta, pi, oracle, lifted, gamma);
    REQUIRE(rep.holds);
  }
}

TEST_CASE("norm-divergence comparison: scalar case and random audit") {
  SymZeroDiagMatrix p(2), q(2), w(2);
  p.set(0, 1, 0.5);
  q.set(0, 1, 0.25);
  w.set(0, 1, 1.0);
  const LemmaReport rep = check_kl_frobenius(p, q, w);
  CHECK_THAT(rep.lhs, WithinAbs(0.0625, 1e-15));
  CHECK_THAT(rep.rhs, WithinAbs(8.0 * 0.5 * 0.14384103622589042, 1e-14));
  CHECK(rep.holds);

  // identical matrices: both sides vanish
  const LemmaReport zero = check_kl_frobenius(p, p, w);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.holds);

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto a = testutil::random_matrix(5, seed, 13, 0.01, 0.99);
    const auto b = testutil::random_matrix(5, seed, 14, 0.01, 0.99);
    const auto mask = testutil::random_matrix(5, seed, 15, 0.0, 1.0);
    REQUIRE(check_kl_frobenius(a, b, mask).holds);
  }
}

TEST_CASE("norm-divergence comparison rejects boundary entries") {
  SymZeroDiagMatrix p(2), q(2), w(2);
  p.set(0, 1, 0.0);  // boundary
  q.set(0, 1, 0.25);
  w.set(0, 1, 1.0);
  CHECK_THROWS_AS(check_kl_frobenius(p, q, w), std::domain_error);
  p.set(0, 1, 0.5);
  q.set(0, 1, 1.0);  // boundary on the other side
  CHECK_THROWS_AS(check_kl_frobenius(p, q, w), std::domain_error);
}
