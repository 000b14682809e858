// Monte-Carlo harness: configuration parsing, grid execution, the CSV
// report format, and the rate summary.

#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace netml;

namespace {

ExperimentConfig parse(const std::string& text) {
  return experiment_from_config(Config::parse_text(text));
}

const char* kPlantedExact =
    "model.kind = blockmodel\n"
    "blockmodel.q = 1.0, 0.0, 1.0\n"
    "fit.k = 2\n"
    "fit.gamma = 0.05\n"
    "fit.rho = 0.95\n"
    "fit.exact = true\n"
    "n = 6\n"
    "trials = 1\n";

std::string temp_csv_path(const char* name) {
  return std::string("netml_test_") + name + ".csv";
}

}  // namespace

TEST_CASE("experiment config: minimal block model and defaults") {
  const ExperimentConfig e = parse(kPlantedExact);
  CHECK(e.model == ModelKind::blockmodel);
  CHECK(e.block_q(1, 1) == 1.0);
  CHECK(e.block_q(1, 2) == 0.0);
  CHECK(e.rho == 1.0);  // defaults to the largest block probability
  CHECK(e.missing == MissingKind::full);
  CHECK(e.grid_n == std::vector<int>{6});
  CHECK(e.grid_p == std::vector<double>{1.0});
  CHECK(e.trials == 1);
  CHECK(e.exact);
  CHECK_FALSE(e.timing);
}

TEST_CASE("experiment config rejects malformed inputs") {
  // unknown key
  CHECK_THROWS_AS(parse(std::string(kPlantedExact) + "shenanigans = 1\n"),
                  ConfigError);
  // both k and alpha
  CHECK_THROWS_AS(parse(std::string(kPlantedExact) + "fit.alpha = 1\n"),
                  ConfigError);
  // neither k nor alpha
  CHECK_THROWS_AS(parse("blockmodel.q = 0.5\n"
                        "fit.gamma = 0.1\nfit.rho = 0.5\nn = 6\n"),
                  ConfigError);
  // grid.p without a uniform design
  CHECK_THROWS_AS(parse(std::string(kPlantedExact) + "grid.p = 0.5, 1\n"),
                  ConfigError);
  // uniform design without a probability
  CHECK_THROWS_AS(parse("blockmodel.q = 0.5\nfit.k = 1\n"
                        "fit.gamma = 0.1\nfit.rho = 0.5\n"
                        "missing.kind = uniform\nn = 6\n"),
                  ConfigError);
  // probability out of range
  CHECK_THROWS_AS(parse("blockmodel.q = 0.5\nfit.k = 1\n"
                        "fit.gamma = 0.1\nfit.rho = 0.5\n"
                        "missing.kind = uniform\nmissing.p = 0\nn = 6\n"),
                  ConfigError);
  // n too small
  CHECK_THROWS_AS(parse("blockmodel.q = 0.5\nfit.k = 1\n"
                        "fit.gamma = 0.1\nfit.rho = 0.5\nn = 1\n"),
                  ConfigError);
  // missing grid entirely
  CHECK_THROWS_AS(parse("blockmodel.q = 0.5\nfit.k = 1\n"
                        "fit.gamma = 0.1\nfit.rho = 0.5\n"),
                  ConfigError);
  // trials must be positive
  CHECK_THROWS_AS(parse(std::string(kPlantedExact) + "trials = 0\n"),
                  ConfigError);
  // non-boolean flag
  CHECK_THROWS_AS(parse(std::string(kPlantedExact) + "timing = maybe\n"),
                  ConfigError);
  // block probabilities out of range
  CHECK_THROWS_AS(parse("blockmodel.q = 1.5\nfit.k = 1\n"
                        "fit.gamma = 0.1\nfit.rho = 0.5\nn = 6\n"),
                  ConfigError);
  // dyad design needs its probabilities
  CHECK_THROWS_AS(parse("blockmodel.q = 0.5\nfit.k = 1\n"
                        "fit.gamma = 0.1\nfit.rho = 0.5\n"
                        "missing.kind = dyad\nn = 6\n"),
                  ConfigError);
  // known bounds need both clamps
  CHECK_THROWS_AS(parse("blockmodel.q = 0.5\nfit.k = 1\nfit.gamma = 0.1\n"
                        "n = 6\n"),
                  ConfigError);
  // graphon model needs rho
  CHECK_THROWS_AS(parse("model.kind = graphon\ngraphon.kind = constant\n"
                        "graphon.params = 0.5\nfit.k = 1\n"
                        "fit.gamma = 0.1\nfit.rho = 0.5\nn = 6\n"),
                  ConfigError);
  // unknown enumerations
  CHECK_THROWS_AS(parse(std::string(kPlantedExact) + "missing.kind = odd\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse(std::string(kPlantedExact) + "fit.bounds = odd\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse(std::string(kPlantedExact) + "fit.objective = odd\n"),
                  ConfigError);
}

TEST_CASE("run_experiment validates a hand-built config") {
  ExperimentConfig e;
  e.block_q = BlockMatrix::from_upper(1, {0.5});
  e.fit_k = 1;
  e.fit_gamma = 0.1;
  e.fit_rho = 0.9;
  e.trials = 1;
  CHECK_THROWS_AS(run_experiment(e), ConfigError);  // empty grid
  e.grid_n = {6};
  e.grid_p = {1.0};
  e.trials = 0;
  CHECK_THROWS_AS(run_experiment(e), ConfigError);
}

TEST_CASE("a deterministic planted run reproduces the clamp residual") {
  const ExperimentConfig e = parse(kPlantedExact);
  const RiskReport report = run_experiment(e);
  CHECK(report.design_label == "independent");
  REQUIRE(report.rows.size() == 1);
  const RiskRow& r = report.rows[0];
  CHECK(r.n == 6);
  CHECK(r.p == 1.0);
  CHECK(r.k == 2);
  CHECK(r.trial == 0);
  CHECK(r.error.empty());
  REQUIRE(r.frob_risk.has_value());
  // truth is 1 within / 0 across; the clamped fit sits at 0.95 / 0.05, so
  // each of the 15 pairs misses by exactly 0.05
  CHECK_THAT(*r.frob_risk, WithinAbs(0.0375, 1e-15));
  REQUIRE(r.frob_risk_weighted.has_value());
  CHECK_THAT(*r.frob_risk_weighted, WithinAbs(0.0375, 1e-15));
  REQUIRE(r.objective.has_value());
  CHECK_THAT(*r.objective, WithinAbs(0.7693994158132587, 1e-12));
  // the unconstrained approximation represents the truth exactly
  REQUIRE(r.kl_oracle_gap.has_value());
  CHECK(*r.kl_oracle_gap == 0.0);
  CHECK(r.wall_time == 0.0);
}

TEST_CASE("reruns emit byte-identical reports") {
  const std::string text =
      "model.kind = blockmodel\n"
      "blockmodel.q = 0.6, 0.2, 0.6\n"
      "fit.k = 2\n"
      "fit.gamma = 0.05\n"
      "fit.rho = 0.8\n"
      "missing.kind = uniform\n"
      "grid.p = 0.6, 1\n"
      "grid.n = 8, 12\n"
      "trials = 3\n"
      "seed = 41\n";
  const ExperimentConfig e = parse(text);
  std::ostringstream first, second;
  emit_csv(run_experiment(e), first);
  emit_csv(run_experiment(e), second);
  CHECK(first.str() == second.str());
  REQUIRE(run_experiment(e).rows.size() == 12);

  // a different master seed changes the data
  ExperimentConfig other = e;
  other.master_seed = 42;
  std::ostringstream third;
  emit_csv(run_experiment(other), third);
  CHECK(first.str() != third.str());
}

TEST_CASE("csv emission round-trips through the parser") {
  const ExperimentConfig e = parse(
      "model.kind = blockmodel\n"
      "blockmodel.q = 0.7, 0.2, 0.7\n"
      "fit.k = 2\nfit.gamma = 0.05\nfit.rho = 0.9\n"
      "missing.kind = uniform\nmissing.p = 0.8\n"
      "n = 10\ntrials = 2\nseed = 7\n");
  const RiskReport report = run_experiment(e);
  const std::string path = temp_csv_path("roundtrip");
  emit_csv(report, path);
  const RiskReport back = read_csv(path);
  std::ostringstream a, b;
  emit_csv(report, a);
  emit_csv(back, b);
  CHECK(a.str() == b.str());
  REQUIRE(back.rows.size() == report.rows.size());
  // values survive to the emitted precision of 12 significant digits
  REQUIRE(back.rows[0].frob_risk.has_value());
  CHECK_THAT(*back.rows[0].frob_risk,
             WithinRel(*report.rows[0].frob_risk, 1e-11));
  std::remove(path.c_str());
}

TEST_CASE("csv header is stable and empty reports are header-only") {
  RiskReport empty;
  std::ostringstream out;
  emit_csv(empty, out);
  CHECK(out.str() ==
        "n,p,rho,k,trial,frob_risk,frob_risk_weighted,kl_oracle_gap,"
        "objective,wall_time\n");
}

TEST_CASE("read_csv rejects foreign files") {
  const std::string path = temp_csv_path("bad");
  {
    std::ofstream out(path);
    out << "completely,different,header\n";
  }
  CHECK_THROWS(read_csv(path));
  {
    std::ofstream out(path);
    out << kRiskCsvHeader << "\n6,1,1,2,0,too,few\n";
  }
  CHECK_THROWS(read_csv(path));
  std::remove(path.c_str());
  CHECK_THROWS(read_csv("does_not_exist_anywhere.csv"));
}

TEST_CASE("a failing trial becomes an error row and halts its cell") {
  // empty truth: the adaptive density estimate has nothing to work with
  ExperimentConfig e;
  e.block_q = BlockMatrix::from_upper(1, {0.0});
  e.fit_k = 1;
  e.bounds = BoundsMode::adaptive;
  e.grid_n = {8};
  e.grid_p = {1.0};
  e.trials = 5;
  const RiskReport report = run_experiment(e);
  REQUIRE(report.rows.size() == 1);  // remaining trials abandoned
  const RiskRow& r = report.rows[0];
  CHECK_FALSE(r.error.empty());
  CHECK_FALSE(r.frob_risk.has_value());
  CHECK_FALSE(r.frob_risk_weighted.has_value());
  CHECK_FALSE(r.kl_oracle_gap.has_value());
  CHECK_FALSE(r.objective.has_value());

  // the error row serializes with empty risk fields and survives a roundtrip
  const std::string path = temp_csv_path("error");
  emit_csv(report, path);
  const RiskReport back = read_csv(path);
  REQUIRE(back.rows.size() == 1);
  CHECK_FALSE(back.rows[0].frob_risk.has_value());
  std::remove(path.c_str());
}

TEST_CASE("oracle gap is omitted when enumeration is infeasible") {
  const ExperimentConfig e = parse(
      "model.kind = blockmodel\n"
      "blockmodel.q = 0.6, 0.2, 0.6\n"
      "fit.k = 2\nfit.gamma = 0.05\nfit.rho = 0.8\n"
      "n = 24\ntrials = 1\nseed = 3\n");
  const RiskReport report = run_experiment(e);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].error.empty());
  CHECK(report.rows[0].frob_risk.has_value());
  CHECK_FALSE(report.rows[0].kl_oracle_gap.has_value());
}

TEST_CASE("dependent observation designs are labeled as such") {
  const ExperimentConfig e = parse(
      "model.kind = blockmodel\n"
      "blockmodel.q = 0.6, 0.2, 0.6\n"
      "fit.k = 2\nfit.gamma = 0.05\nfit.rho = 0.8\n"
      "missing.kind = exo\n"
      "missing.sampled_nodes = 1, 2, 3\n"
      "n = 10\ntrials = 2\nseed = 11\n");
  const RiskReport report = run_experiment(e);
  CHECK(report.design_label == "dependent-mask");
  REQUIRE(report.rows.size() == 2);
  for (const RiskRow& r : report.rows) {
    CHECK(r.error.empty());
    CHECK(r.frob_risk.has_value());
  }
}

TEST_CASE("graphon models draw fresh latent positions per trial") {
  const ExperimentConfig e = parse(
      "model.kind = graphon\n"
      "graphon.kind = affine\n"
      "graphon.params = 0.3, 0.5\n"
      "rho = 0.4\n"
      "fit.k = 2\nfit.gamma = 0.05\nfit.rho = 0.4\n"
      "n = 10\ntrials = 3\nseed = 13\n");
  const RiskReport report = run_experiment(e);
  REQUIRE(report.rows.size() == 3);
  for (const RiskRow& r : report.rows) {
    CHECK(r.error.empty());
    REQUIRE(r.frob_risk.has_value());
    CHECK(*r.frob_risk > 0.0);
    CHECK(r.rho == 0.4);
  }
  // different trials see different truths, so risks differ
  CHECK(report.rows[0].frob_risk != report.rows[1].frob_risk);
}

TEST_CASE("halving observation cannot shrink the mean risk here") {
  const ExperimentConfig e = parse(
      "model.kind = blockmodel\n"
      "blockmodel.q = 0.3, 0.3, 0.3\n"
      "fit.k = 2\nfit.gamma = 0.05\nfit.rho = 0.6\n"
      "missing.kind = uniform\n"
      "grid.p = 0.5, 1\n"
      "n = 24\ntrials = 30\nseed = 2\n");
  const RiskReport report = run_experiment(e);
  REQUIRE(report.rows.size() == 60);
  const RateCheck rc = rate_check(report, RateAxis::p);
  REQUIRE(rc.axis == std::vector<double>{0.5, 1.0});
  CHECK(rc.mean_risk[1] <= rc.mean_risk[0]);
  CHECK(rc.slope < 0.0);
}

TEST_CASE("rate summary reproduces exact synthetic scalings") {
  RiskReport synth;
  for (int i = 0; i < 3; ++i) {
    RiskRow r;
    r.n = 10 << i;  // 10, 20, 40
    r.p = 1.0;
    r.frob_risk = 0.4 / (1 << i);  // exactly proportional to 1/n
    synth.rows.push_back(r);
  }
  const RateCheck rc = rate_check(synth, RateAxis::n);
  REQUIRE(rc.axis == std::vector<double>{10.0, 20.0, 40.0});
  REQUIRE(rc.ratios.size() == 2);
  CHECK_THAT(rc.ratios[0], WithinAbs(0.5, 1e-15));
  CHECK_THAT(rc.ratios[1], WithinAbs(0.5, 1e-15));
  CHECK_THAT(rc.slope, WithinAbs(-1.0, 1e-12));

  // flat risks give slope zero
  for (RiskRow& r : synth.rows) r.frob_risk = 0.25;
  const RateCheck flat = rate_check(synth, RateAxis::n);
  CHECK_THAT(flat.slope, WithinAbs(0.0, 1e-12));
  CHECK_THAT(flat.ratios[0], WithinAbs(1.0, 1e-15));

  // error rows are skipped; a single surviving axis value is not enough
  RiskReport sparse;
  for (int i = 0; i < 2; ++i) {
    RiskRow r;
    r.n = 10 + 10 * i;
    if (i == 0) r.frob_risk = 0.5;  // the other row stays absent
    sparse.rows.push_back(r);
  }
  CHECK_THROWS(rate_check(sparse, RateAxis::n));

  // zero means cannot be log-scaled
  RiskReport zeros = synth;
  zeros.rows[0].frob_risk = 0.0;
  CHECK_THROWS(rate_check(zeros, RateAxis::n));
}
