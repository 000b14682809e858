#pragma once

// Monte-Carlo harness: sweep a grid of (n, p) cells, repeatedly generate a
// graph under the configured model, hide entries under the configured
// observation design, fit, and record risks in a CSV report.
//
// The whole run is a pure function of (config, master seed): per-trial seeds
// are derived from the cell index and trial index, and all sampling is
// counter-based, so reruns produce byte-identical CSV output.  Real wall
// times can be recorded on request (`timing = on`), which is the one switch
// that sacrifices byte-identical reruns.

#include <netml/adaptive.hpp>
#include <netml/common.hpp>
#include <netml/divergence.hpp>
#include <netml/fit.hpp>
#include <netml/graphon.hpp>
#include <netml/io.hpp>
#include <netml/oracle.hpp>
#include <netml/rng.hpp>
#include <netml/sampling.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace netml {

namespace tag {
inline constexpr std::uint64_t harness = 0x48;  // per-trial seed derivation
}

enum class ModelKind { blockmodel, graphon };
enum class MissingKind { full, uniform, dyad, exo };
enum class BoundsMode { known, adaptive, tradeoff };

struct ExperimentConfig {
  ModelKind model = ModelKind::blockmodel;
  BlockMatrix block_q;           // blockmodel: balanced labeling per n
  std::optional<Graphon> graphon;
  double rho = 0.0;              // sparsity level (graphon scale; reported)

  MissingKind missing = MissingKind::full;
  BlockMatrix dyad_p;            // dyad design, balanced labeling per n
  std::vector<int> exo_nodes;    // 1-based

  int fit_k = 0;                 // 0: derive via choose_k from fit_alpha
  double fit_alpha = 0.0;
  BoundsMode bounds = BoundsMode::known;
  double fit_gamma = 0.0, fit_rho = 0.0;  // known/tradeoff modes
  Objective objective = Objective::kl;
  int restarts = 10;
  int max_sweeps = 100;
  bool exact = false;

  std::vector<int> grid_n;
  std::vector<double> grid_p;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::string output = "risk.csv";
  bool timing = false;
};

struct RiskRow {
  int n = 0;
  double p = 1.0;
  double rho = 0.0;
  int k = 0;
  int trial = 0;
  std::optional<double> frob_risk;           // ||theta* - theta_hat||^2
  std::optional<double> frob_risk_weighted;  // weighted by Pi
  std::optional<double> kl_oracle_gap;       // absent when k^n over budget
  std::optional<double> objective;
  double wall_time = 0.0;
  std::string error;  // nonempty on an aborted trial; not a CSV column
};

struct RiskReport {
  std::vector<RiskRow> rows;
  // "independent" for entrywise-independent designs; "dependent-mask" when
  // mask entries are correlated (egocentric observation).
  std::string design_label = "independent";
};

// Balanced contiguous labeling: first ~n/k nodes in block 1, and so on.
inline Labeling balanced_labeling(int n, int k) {
  std::vector<int> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] =
        1 + static_cast<int>((static_cast<std::int64_t>(i) * k) / n);
  return Labeling(std::move(z), k);
}

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError("config key '" + key + "' has non-boolean value '" + v +
                    "'");
}

// Infer k from the length of an upper triangle including the diagonal.
inline int blocks_from_upper_length(std::size_t len, const std::string& key) {
  for (int k = 1; k <= 64; ++k)
    if (static_cast<std::size_t>(k) * (k + 1) / 2 == len) return k;
  throw ConfigError("config key '" + key + "' has " + std::to_string(len) +
                    " values; expected a triangular count k(k+1)/2");
}

inline Graphon graphon_from_config(const Config& c) {
  const std::string kind = c.get("graphon.kind");
  if (kind == "affine") {
    const auto params = c.get_list("graphon.params");
    if (params.size() != 2)
      throw ConfigError("graphon.params for affine needs: c0 c1");
    return Graphon::affine(params[0], params[1]);
  }
  if (kind == "constant") {
    const auto params = c.get_list("graphon.params");
    if (params.size() != 1)
      throw ConfigError("graphon.params for constant needs: c");
    return Graphon::constant(params[0]);
  }
  if (kind == "planted") {
    const auto params = c.get_list("graphon.params");
    if (params.size() != 3)
      throw ConfigError("graphon.params for planted needs: k within cross");
    const int k = static_cast<int>(params[0]);
    if (k < 1 || params[0] != k)
      throw ConfigError("planted block count must be a positive integer");
    return Graphon::planted_partition(k, params[1], params[2]);
  }
  if (kind == "step") {
    const auto qv = c.get_list("graphon.q");
    const int k = blocks_from_upper_length(qv.size(), "graphon.q");
    std::vector<double> breaks;
    if (k > 1) breaks = c.get_list("graphon.breaks");
    if (static_cast<int>(breaks.size()) != k - 1)
      throw ConfigError("graphon.breaks needs k-1 values");
    return Graphon::step(BlockMatrix::from_upper(k, qv), breaks);
  }
  throw ConfigError("unknown graphon.kind '" + kind +
                    "' (expected affine, constant, planted, or step)");
}

}  // namespace detail

// Parse and validate an experiment configuration.  Unknown keys are errors.
inline ExperimentConfig experiment_from_config(const Config& c) {
  ExperimentConfig e;

  const std::string model = c.get_or("model.kind", "blockmodel");
  if (model == "blockmodel") {
    e.model = ModelKind::blockmodel;
    const auto qv = c.get_list("blockmodel.q");
    const int k = c.has("blockmodel.k")
                      ? static_cast<int>(c.get_long("blockmodel.k"))
                      : detail::blocks_from_upper_length(qv.size(),
                                                         "blockmodel.q");
    e.block_q = BlockMatrix::from_upper(k, qv);
    if (!e.block_q.is_probability())
      throw ConfigError("blockmodel.q entries must lie in [0, 1]");
    e.rho = c.get_double_or("rho", e.block_q.max_entry());
  } else if (model == "graphon") {
    e.model = ModelKind::graphon;
    e.graphon = detail::graphon_from_config(c);
    e.rho = c.get_double("rho");
  } else {
    throw ConfigError("unknown model.kind '" + model + "'");
  }

  const std::string missing = c.get_or("missing.kind", "full");
  if (missing == "full") {
    e.missing = MissingKind::full;
  } else if (missing == "uniform") {
    e.missing = MissingKind::uniform;
  } else if (missing == "dyad") {
    e.missing = MissingKind::dyad;
    const auto pv = c.get_list("missing.P");
    const int kp = detail::blocks_from_upper_length(pv.size(), "missing.P");
    e.dyad_p = BlockMatrix::from_upper(kp, pv);
    if (!e.dyad_p.is_probability())
      throw ConfigError("missing.P entries must lie in [0, 1]");
  } else if (missing == "exo") {
    e.missing = MissingKind::exo;
    for (long v : c.get_int_list("missing.sampled_nodes"))
      e.exo_nodes.push_back(static_cast<int>(v));
  } else {
    throw ConfigError("unknown missing.kind '" + missing + "'");
  }

  const bool has_k = c.has("fit.k"), has_alpha = c.has("fit.alpha");
  if (has_k == has_alpha)
    throw ConfigError("exactly one of fit.k and fit.alpha is required");
  if (has_k) {
    e.fit_k = static_cast<int>(c.get_long("fit.k"));
    if (e.fit_k < 1) throw ConfigError("fit.k must be >= 1");
  } else {
    e.fit_alpha = c.get_double("fit.alpha");
    if (!(e.fit_alpha > 0.0)) throw ConfigError("fit.alpha must be positive");
  }

  const std::string bounds = c.get_or("fit.bounds", "known");
  if (bounds == "known") {
    e.bounds = BoundsMode::known;
    e.fit_gamma = c.get_double("fit.gamma");
    e.fit_rho = c.get_double("fit.rho");
  } else if (bounds == "adaptive") {
    e.bounds = BoundsMode::adaptive;
  } else if (bounds == "tradeoff") {
    e.bounds = BoundsMode::tradeoff;
    e.fit_rho = c.get_double("fit.rho");
  } else {
    throw ConfigError("unknown fit.bounds '" + bounds +
                      "' (expected known, adaptive, or tradeoff)");
  }

  e.objective = objective_from_string(c.get_or("fit.objective", "kl"));
  e.restarts = static_cast<int>(c.get_long_or("fit.restarts", 10));
  e.max_sweeps = static_cast<int>(c.get_long_or("fit.max_sweeps", 100));
  if (c.has("fit.exact"))
    e.exact = detail::parse_bool(c.get("fit.exact"), "fit.exact");

  if (c.has("grid.n"))
    for (long v : c.get_int_list("grid.n")) e.grid_n.push_back(static_cast<int>(v));
  else if (c.has("n"))
    e.grid_n.push_back(static_cast<int>(c.get_long("n")));
  else
    throw ConfigError("missing grid.n (or n)");
  for (int n : e.grid_n)
    if (n < 2) throw ConfigError("grid.n values must be >= 2");

  if (c.has("grid.p")) {
    e.grid_p = c.get_list("grid.p");
    if (e.missing != MissingKind::uniform)
      throw ConfigError("grid.p requires missing.kind = uniform");
  } else if (e.missing == MissingKind::uniform) {
    e.grid_p.push_back(c.get_double("missing.p"));
  } else {
    e.grid_p.push_back(1.0);
  }
  for (double p : e.grid_p)
    if (!(p > 0.0 && p <= 1.0))
      throw ConfigError("grid.p values must lie in (0, 1]");

  e.trials = static_cast<int>(c.get_long_or("trials", 1));
  if (e.trials < 1) throw ConfigError("trials must be >= 1");
  e.master_seed = static_cast<std::uint64_t>(c.get_long_or("seed", 0));
  e.output = c.get_or("output", "risk.csv");
  if (c.has("timing"))
    e.timing = detail::parse_bool(c.get("timing"), "timing");

  const auto unused = c.unused_keys();
  if (!unused.empty()) {
    std::string msg = "unrecognized config keys:";
    for (const auto& key : unused) msg += " '" + key + "'";
    throw ConfigError(msg);
  }
  if (e.grid_n.empty() || e.grid_p.empty())
    throw ConfigError("experiment grid is empty");
  return e;
}

namespace detail {

struct TrialOutput {
  FitResult fit;
  int k = 0;
};

inline TrialOutput run_fit(const ExperimentConfig& e, int n,
                           const SymZeroDiagMatrix& a,
                           const SymZeroDiagMatrix& x,
                           std::uint64_t trial_seed) {
  TrialOutput out;
  if (e.bounds == BoundsMode::adaptive) {
    const PairSet omega = sample_omega(n, trial_seed);
    AdaptiveFitConfig cfg;
    if (e.fit_k > 0) {
      cfg.k = e.fit_k;
    } else {
      // route the data-driven density into the block-count rule
      double sum = 0.0, seen = 0.0;
      for (const auto& [i, j] : omega)
        if (x(i, j) != 0.0) {
          sum += a(i, j);
          seen += 1.0;
        }
      if (seen == 0.0)
        throw DegenerateSampleError("no held-out pair is observed");
      const double d_hat = sum / seen;
      if (d_hat == 0.0)
        throw DegenerateSampleError(
            "no edges among the held-out pairs: density estimate is zero");
      const double rho_hat =
          std::pow(std::log(static_cast<double>(n)), 0.2) * d_hat;
      cfg.k = choose_k(n, std::min(rho_hat, 1.0), e.fit_alpha);
    }
    cfg.restarts = e.restarts;
    cfg.max_sweeps = e.max_sweeps;
    cfg.seed = trial_seed;
    cfg.objective = e.objective;
    cfg.exact = e.exact;
    out.fit = fit_adaptive(a, x, omega, cfg);
    out.k = cfg.k;
    return out;
  }

  FitConfig cfg;
  cfg.k = e.fit_k > 0 ? e.fit_k : choose_k(n, e.fit_rho, e.fit_alpha);
  cfg.rho = e.fit_rho;
  cfg.gamma = e.bounds == BoundsMode::tradeoff
                  ? gamma_tradeoff(n, cfg.k, e.fit_rho)
                  : e.fit_gamma;
  cfg.restarts = e.restarts;
  cfg.max_sweeps = e.max_sweeps;
  cfg.seed = trial_seed;
  cfg.objective = e.objective;
  out.fit = e.exact ? fit_exact(a, x, cfg) : fit_local_search(a, x, cfg);
  out.k = cfg.k;
  return out;
}

}  // namespace detail

// Run the full grid.  Any library error inside a trial produces an error row
// (risk fields absent, message preserved) and aborts the remaining trials of
// that cell; other cells still run.
inline RiskReport run_experiment(const ExperimentConfig& e) {
  if (e.grid_n.empty() || e.grid_p.empty())
    throw ConfigError("experiment grid is empty");
  if (e.trials < 1) throw ConfigError("trials must be >= 1");
  RiskReport report;
  if (e.missing == MissingKind::exo) report.design_label = "dependent-mask";

  int cell_index = -1;
  for (const int n : e.grid_n) {
    // Truth for block models does not depend on the trial.
    SymZeroDiagMatrix theta_fixed;
    if (e.model == ModelKind::blockmodel)
      theta_fixed = theta_from_blockmodel(
          BlockModel(e.block_q, balanced_labeling(n, e.block_q.k())));

    for (const double p : e.grid_p) {
      ++cell_index;
      for (int trial = 0; trial < e.trials; ++trial) {
        const std::uint64_t trial_seed =
            keyed_bits(e.master_seed, tag::harness,
                       static_cast<std::uint64_t>(cell_index),
                       static_cast<std::uint64_t>(trial));
        RiskRow row;
        row.n = n;
        row.p = p;
        row.rho = e.rho;
        row.trial = trial;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          SymZeroDiagMatrix theta =
              e.model == ModelKind::blockmodel
                  ? theta_fixed
                  : theta_from_graphon(*e.graphon, e.rho,
                                       sample_zeta(n, trial_seed));
          const SymZeroDiagMatrix a = sample_adjacency(theta, trial_seed);

          SymZeroDiagMatrix pi, x;
          switch (e.missing) {
            case MissingKind::full:
              pi = SymZeroDiagMatrix::ones(n);
              x = pi;
              break;
            case MissingKind::uniform:
              pi = design_to_pi(UniformDesign{p}, n);
              x = sample_mask(pi, trial_seed);
              break;
            case MissingKind::dyad:
              pi = design_to_pi(
                  DyadDesign{e.dyad_p,
                             balanced_labeling(n, e.dyad_p.k())},
                  n);
              x = sample_mask(pi, trial_seed);
              break;
            case MissingKind::exo:
              x = mask_exo_centered(n, e.exo_nodes);
              pi = x;  // the mask is deterministic given the node set
              break;
          }

          detail::TrialOutput out = detail::run_fit(e, n, a, x, trial_seed);
          row.k = out.k;
          const SymZeroDiagMatrix ones = SymZeroDiagMatrix::ones(n);
          row.frob_risk = frob_weighted(theta, out.fit.theta_hat, ones);
          row.frob_risk_weighted = frob_weighted(theta, out.fit.theta_hat, pi);
          row.objective = out.fit.objective_value;
          if (std::pow(static_cast<double>(out.k), static_cast<double>(n)) <=
              kEnumerationBudget)
            row.kl_oracle_gap =
                oracle_theta_tilde(theta, pi, out.k).kl_to_truth;
        } catch (const std::exception& err) {
          row.error = err.what();
          if (row.k == 0 && e.fit_k > 0) row.k = e.fit_k;
          if (e.timing)
            row.wall_time =
                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
          report.rows.push_back(std::move(row));
          break;  // abort remaining trials of this cell
        }
        if (e.timing)
          row.wall_time =
              std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

namespace detail {

inline std::string csv_value(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", *v);
  return buf;
}

inline std::string csv_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

inline constexpr const char* kRiskCsvHeader =
    "n,p,rho,k,trial,frob_risk,frob_risk_weighted,kl_oracle_gap,objective,"
    "wall_time";

// Write the report as CSV: fixed column order, values at 12 significant
// digits, absent values as empty fields, every line newline-terminated.
inline void emit_csv(const RiskReport& report, std::ostream& out) {
  out << kRiskCsvHeader << "\n";
  for (const RiskRow& r : report.rows) {
    out << r.n << ',' << detail::csv_value(r.p) << ','
        << detail::csv_value(r.rho) << ',' << r.k << ',' << r.trial << ','
        << detail::csv_value(r.frob_risk) << ','
        << detail::csv_value(r.frob_risk_weighted) << ','
        << detail::csv_value(r.kl_oracle_gap) << ','
        << detail::csv_value(r.objective) << ','
        << detail::csv_value(r.wall_time) << "\n";
  }
}

inline void emit_csv(const RiskReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  emit_csv(report, out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

// Parse a CSV produced by emit_csv.
inline RiskReport read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kRiskCsvHeader)
    throw std::runtime_error("'" + path + "': missing or unexpected header");
  RiskReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 10)
      throw std::runtime_error("'" + path + "': malformed row '" + line + "'");
    const auto opt = [&](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return detail::parse_double(s, "csv field in '" + path + "'");
    };
    RiskRow r;
    r.n = static_cast<int>(detail::parse_long(fields[0], "csv n"));
    r.p = detail::parse_double(fields[1], "csv p");
    r.rho = detail::parse_double(fields[2], "csv rho");
    r.k = static_cast<int>(detail::parse_long(fields[3], "csv k"));
    r.trial = static_cast<int>(detail::parse_long(fields[4], "csv trial"));
    r.frob_risk = opt(fields[5]);
    r.frob_risk_weighted = opt(fields[6]);
    r.kl_oracle_gap = opt(fields[7]);
    r.objective = opt(fields[8]);
    r.wall_time = detail::parse_double(fields[9], "csv wall_time");
    report.rows.push_back(std::move(r));
  }
  return report;
}

enum class RateAxis { n, p };

struct RateCheck {
  std::vector<double> axis;       // distinct axis values, ascending
  std::vector<double> mean_risk;  // mean frob_risk per axis value
  std::vector<double> ratios;     // mean_risk[i+1] / mean_risk[i]
  double slope = 0.0;             // least-squares slope of log-mean on log-axis
};

// Aggregate mean Frobenius risk along one grid axis and summarize how it
// scales: the log-log slope plus the adjacent-cell ratios.  Rows with an
// absent risk (error rows) are skipped.
inline RateCheck rate_check(const RiskReport& report, RateAxis axis) {
  std::map<double, std::pair<double, double>> groups;  // value -> (sum, count)
  for (const RiskRow& r : report.rows) {
    if (!r.frob_risk) continue;
    const double key = axis == RateAxis::n ? static_cast<double>(r.n) : r.p;
    auto& [sum, count] = groups[key];
    sum += *r.frob_risk;
    count += 1.0;
  }
  if (groups.size() < 2)
    throw std::runtime_error(
        "rate check needs at least 2 distinct axis values with data");

  RateCheck rc;
  for (const auto& [value, agg] : groups) {
    rc.axis.push_back(value);
    rc.mean_risk.push_back(agg.first / agg.second);
  }
  for (std::size_t i = 0; i + 1 < rc.mean_risk.size(); ++i) {
    if (!(rc.mean_risk[i] > 0.0) || !(rc.mean_risk[i + 1] > 0.0))
      throw std::runtime_error("rate check needs positive mean risks");
    rc.ratios.push_back(rc.mean_risk[i + 1] / rc.mean_risk[i]);
  }

  double mx = 0.0, my = 0.0;
  const auto m = static_cast<double>(rc.axis.size());
  for (std::size_t i = 0; i < rc.axis.size(); ++i) {
    mx += std::log(rc.axis[i]);
    my += std::log(rc.mean_risk[i]);
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < rc.axis.size(); ++i) {
    const double dx = std::log(rc.axis[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(rc.mean_risk[i]) - my);
  }
  rc.slope = sxy / sxx;
  return rc;
}

}  // namespace netml
