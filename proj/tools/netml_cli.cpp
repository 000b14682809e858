// Command-line front end: generate synthetic data, fit block models under
// missing observations, run the adaptive estimator, audit the supporting
// inequalities, sweep Monte-Carlo risk grids, and summarize risk scaling.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <CLI11.hpp>
#include <netml/netml.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr std::uint64_t kAuditTag = 0x55;

struct GenerateArgs {
  std::string config;
  std::string out_prefix;
  std::optional<std::int64_t> seed;
};

struct FitArgs {
  std::string input_a;
  std::string input_x;
  int k = 0;
  double gamma = 0.0;
  double rho = 0.0;
  std::string objective = "kl";
  int restarts = 10;
  int max_sweeps = 100;
  std::int64_t seed = 0;
  bool exact = false;
  std::string out;
};

struct AdaptiveArgs {
  std::string input_a;
  std::string input_x;
  std::int64_t omega_seed = 0;
  std::optional<int> k;
  std::optional<double> alpha;
  std::string objective = "kl";
  int restarts = 10;
  int max_sweeps = 100;
  std::int64_t seed = 0;
  bool exact = false;
  std::string out;
};

struct AuditArgs {
  int trials = 100;
  int n = 6;
  int k = 2;
  std::int64_t seed = 0;
  std::string out;
};

struct ExperimentArgs {
  std::string config;
  std::optional<std::int64_t> seed;
  std::string out;
  bool timing = false;
};

struct RateArgs {
  std::string input;
  std::string axis = "n";
};

netml::SymZeroDiagMatrix load_mask_or_ones(const std::string& path, int n) {
  if (path.empty()) return netml::SymZeroDiagMatrix::ones(n);
  netml::SymZeroDiagMatrix x = netml::read_symtri(path);
  if (x.n() != n)
    throw std::runtime_error("mask and adjacency disagree on node count");
  return x;
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  return file;
}

int run_generate(const GenerateArgs& args) {
  const netml::Config raw = netml::Config::parse_file(args.config);
  netml::ExperimentConfig cfg = netml::experiment_from_config(raw);
  if (args.seed) cfg.master_seed = static_cast<std::uint64_t>(*args.seed);
  if (cfg.grid_n.size() != 1 || cfg.grid_p.size() != 1)
    throw netml::ConfigError("generate needs a single-cell grid (one n, one p)");
  const int n = cfg.grid_n[0];
  const std::uint64_t seed = cfg.master_seed;

  netml::SymZeroDiagMatrix theta;
  if (cfg.model == netml::ModelKind::blockmodel) {
    theta = netml::theta_from_blockmodel(netml::BlockModel(
        cfg.block_q, netml::balanced_labeling(n, cfg.block_q.k())));
  } else {
    theta = netml::theta_from_graphon(*cfg.graphon, cfg.rho,
                                      netml::sample_zeta(n, seed));
  }
  const netml::SymZeroDiagMatrix a = netml::sample_adjacency(theta, seed);

  netml::SymZeroDiagMatrix pi, x;
  std::string design = "independent";
  switch (cfg.missing) {
    case netml::MissingKind::full:
      pi = netml::SymZeroDiagMatrix::ones(n);
      x = pi;
      break;
    case netml::MissingKind::uniform:
      pi = netml::design_to_pi(netml::UniformDesign{cfg.grid_p[0]}, n);
      x = netml::sample_mask(pi, seed);
      break;
    case netml::MissingKind::dyad:
      pi = netml::design_to_pi(
          netml::DyadDesign{cfg.dyad_p,
                            netml::balanced_labeling(n, cfg.dyad_p.k())},
          n);
      x = netml::sample_mask(pi, seed);
      break;
    case netml::MissingKind::exo:
      x = netml::mask_exo_centered(n, cfg.exo_nodes);
      pi = x;
      design = "dependent-mask";
      break;
  }

  netml::write_symtri(args.out_prefix + "_theta.symtri", theta);
  netml::write_symtri(args.out_prefix + "_adj.symtri", a);
  netml::write_symtri(args.out_prefix + "_mask.symtri", x);
  netml::write_symtri(args.out_prefix + "_pi.symtri", pi);
  std::cout << "design: " << design << "\n";
  std::cout << "wrote " << args.out_prefix << "_{theta,adj,mask,pi}.symtri (n="
            << n << ")\n";
  return 0;
}

int run_fit(const FitArgs& args) {
  const netml::SymZeroDiagMatrix a = netml::read_symtri(args.input_a);
  const netml::SymZeroDiagMatrix x = load_mask_or_ones(args.input_x, a.n());

  netml::FitConfig cfg;
  cfg.k = args.k;
  cfg.gamma = args.gamma;
  cfg.rho = args.rho;
  cfg.restarts = args.restarts;
  cfg.max_sweeps = args.max_sweeps;
  cfg.seed = static_cast<std::uint64_t>(args.seed);
  cfg.objective = netml::objective_from_string(args.objective);

  const netml::FitResult result = args.exact
                                      ? netml::fit_exact(a, x, cfg)
                                      : netml::fit_local_search(a, x, cfg);
  std::ofstream file;
  netml::write_fit_record(open_or_stdout(file, args.out), result);
  return 0;
}

int run_adaptive(const AdaptiveArgs& args) {
  const netml::SymZeroDiagMatrix a = netml::read_symtri(args.input_a);
  const int n = a.n();
  const netml::SymZeroDiagMatrix x = load_mask_or_ones(args.input_x, n);
  const netml::PairSet omega =
      netml::sample_omega(n, static_cast<std::uint64_t>(args.omega_seed));

  netml::AdaptiveFitConfig cfg;
  cfg.restarts = args.restarts;
  cfg.max_sweeps = args.max_sweeps;
  cfg.seed = static_cast<std::uint64_t>(args.seed);
  cfg.objective = netml::objective_from_string(args.objective);
  cfg.exact = args.exact;

  if (args.k) {
    cfg.k = *args.k;
  } else {
    // block count from the data-driven density estimate
    const netml::SparsityEstimate est = netml::estimate_sparsity(a, omega, n);
    cfg.k = netml::choose_k(n, std::min(est.rho_hat, 1.0), *args.alpha);
    std::cout << "d_hat " << est.d_hat << "\nrho_hat " << est.rho_hat
              << "\ngamma_hat " << est.gamma_hat << "\nchosen_k " << cfg.k
              << "\n";
  }

  const netml::FitResult result = netml::fit_adaptive(a, x, omega, cfg);
  std::ofstream file;
  netml::write_fit_record(open_or_stdout(file, args.out), result);
  return 0;
}

// One audit instance: probabilities bounded away from 0 and 1 so every
// divergence stays finite, observation weights free in [0, 1].
netml::SymZeroDiagMatrix random_probability_matrix(int n, std::uint64_t seed,
                                                   std::uint64_t stream,
                                                   double lo, double hi) {
  netml::CounterRng rng(seed, kAuditTag, stream);
  netml::SymZeroDiagMatrix m(n);
  for (std::int64_t t = 0; t < m.pairs(); ++t)
    m.set_pair(t, lo + (hi - lo) * rng.uniform());
  return m;
}

int run_audit(const AuditArgs& args) {
  if (args.n < 2 || args.k < 1 || args.trials < 1)
    throw netml::ConfigError("audit needs n >= 2, k >= 1, trials >= 1");
  std::ofstream file;
  std::ostream& out = open_or_stdout(file, args.out);
  out << "trial,lemma,lhs,rhs,holds\n";
  const auto seed = static_cast<std::uint64_t>(args.seed);
  bool all_hold = true;
  char buf[64];
  for (int t = 0; t < args.trials; ++t) {
    const auto stream = static_cast<std::uint64_t>(t);
    const netml::SymZeroDiagMatrix theta =
        random_probability_matrix(args.n, seed, 4 * stream, 0.05, 0.95);
    const netml::SymZeroDiagMatrix other =
        random_probability_matrix(args.n, seed, 4 * stream + 1, 0.05, 0.95);
    const netml::SymZeroDiagMatrix pi =
        random_probability_matrix(args.n, seed, 4 * stream + 2, 0.0, 1.0);
    netml::CounterRng rng(seed, kAuditTag, 4 * stream + 3);
    const double gamma = 0.05 + 0.45 * rng.uniform();

    const netml::LemmaReport frob = netml::check_kl_frobenius(theta, other, pi);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g", frob.lhs, frob.rhs);
    out << t << ",kl_frobenius," << buf << ',' << (frob.holds ? 1 : 0) << "\n";

    const netml::OracleResult oracle =
        netml::oracle_theta_tilde(theta, pi, args.k);
    const netml::ThresholdedOracle lifted =
        netml::threshold_oracle(oracle.model, gamma);
    const netml::LemmaReport thr =
        netml::check_threshold_lemma(theta, pi, oracle, lifted, gamma);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g", thr.lhs, thr.rhs);
    out << t << ",threshold," << buf << ',' << (thr.holds ? 1 : 0) << "\n";

    all_hold = all_hold && frob.holds && thr.holds;
  }
  if (!all_hold) throw std::runtime_error("an audited inequality failed");
  return 0;
}

int run_experiment_cmd(const ExperimentArgs& args) {
  const netml::Config raw = netml::Config::parse_file(args.config);
  netml::ExperimentConfig cfg = netml::experiment_from_config(raw);
  if (args.seed) cfg.master_seed = static_cast<std::uint64_t>(*args.seed);
  if (!args.out.empty()) cfg.output = args.out;
  if (args.timing) cfg.timing = true;

  const netml::RiskReport report = netml::run_experiment(cfg);
  netml::emit_csv(report, cfg.output);

  int errors = 0;
  for (const netml::RiskRow& row : report.rows)
    if (!row.error.empty()) {
      ++errors;
      std::cerr << "cell n=" << row.n << " p=" << row.p
                << " aborted at trial " << row.trial << ": " << row.error
                << "\n";
    }
  std::cout << "design: " << report.design_label << "\n";
  std::cout << "wrote " << report.rows.size() << " rows to " << cfg.output;
  if (errors > 0) std::cout << " (" << errors << " aborted cells)";
  std::cout << "\n";
  return 0;
}

int run_rate_check(const RateArgs& args) {
  const netml::RiskReport report = netml::read_csv(args.input);
  const netml::RateAxis axis =
      args.axis == "n" ? netml::RateAxis::n : netml::RateAxis::p;
  const netml::RateCheck rc = netml::rate_check(report, axis);
  char buf[64];
  for (std::size_t i = 0; i < rc.axis.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", rc.mean_risk[i]);
    std::cout << args.axis << "=" << rc.axis[i] << " mean_frob_risk=" << buf
              << "\n";
  }
  for (std::size_t i = 0; i < rc.ratios.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", rc.ratios[i]);
    std::cout << "ratio[" << rc.axis[i] << "->" << rc.axis[i + 1]
              << "] = " << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "%.12g", rc.slope);
  std::cout << "slope = " << buf << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "block-model estimation for partially observed random graphs"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* cgen = app.add_subcommand(
      "generate", "sample a graph, mask, and probabilities from a config");
  cgen->add_option("--config", gen.config, "experiment config file")
      ->required();
  cgen->add_option("--out-prefix", gen.out_prefix, "output path prefix")
      ->required();
  std::int64_t gen_seed = 0;
  CLI::Option* gen_seed_opt =
      cgen->add_option("--seed", gen_seed, "override the config seed");

  FitArgs fit;
  CLI::App* cfit = app.add_subcommand(
      "fit", "fit a block model to an observed adjacency matrix");
  cfit->add_option("--input-a", fit.input_a, "adjacency matrix (symtri)")
      ->required();
  cfit->add_option("--input-x", fit.input_x,
                   "observation mask (symtri); omit for full observation");
  cfit->add_option("--k", fit.k, "number of blocks")->required();
  cfit->add_option("--gamma", fit.gamma, "lower clamp")->required();
  cfit->add_option("--rho", fit.rho, "upper clamp")->required();
  cfit->add_option("--objective", fit.objective, "kl or ls");
  cfit->add_option("--restarts", fit.restarts, "local search restarts");
  cfit->add_option("--max-sweeps", fit.max_sweeps, "sweep budget per restart");
  cfit->add_option("--seed", fit.seed, "search seed");
  cfit->add_flag("--exact", fit.exact, "exhaustive search (budget-guarded)");
  cfit->add_option("--out", fit.out, "write the fit record here");

  AdaptiveArgs ada;
  CLI::App* cada = app.add_subcommand(
      "adaptive", "two-step fit with data-driven clamp bounds");
  cada->add_option("--input-a", ada.input_a, "adjacency matrix (symtri)")
      ->required();
  cada->add_option("--input-x", ada.input_x,
                   "observation mask (symtri); omit for full observation");
  cada->add_option("--omega-seed", ada.omega_seed,
                   "seed for the held-out pair subset")
      ->required();
  int ada_k = 0;
  double ada_alpha = 0.0;
  CLI::Option* ada_k_opt = cada->add_option("--k", ada_k, "number of blocks");
  CLI::Option* ada_alpha_opt = cada->add_option(
      "--alpha", ada_alpha, "smoothness; derives k from the density estimate");
  ada_k_opt->excludes(ada_alpha_opt);
  cada->add_option("--objective", ada.objective, "kl or ls");
  cada->add_option("--restarts", ada.restarts, "local search restarts");
  cada->add_option("--max-sweeps", ada.max_sweeps, "sweep budget per restart");
  cada->add_option("--seed", ada.seed, "search seed");
  cada->add_flag("--exact", ada.exact, "exhaustive search (budget-guarded)");
  cada->add_option("--out", ada.out, "write the fit record here");

  AuditArgs audit;
  CLI::App* caudit = app.add_subcommand(
      "audit", "check the supporting inequalities on random instances");
  caudit->add_option("--trials", audit.trials, "number of random instances");
  caudit->add_option("--n", audit.n, "nodes per instance");
  caudit->add_option("--k", audit.k, "blocks for the oracle search");
  caudit->add_option("--seed", audit.seed, "instance seed");
  caudit->add_option("--out", audit.out, "write the audit CSV here");

  ExperimentArgs exp;
  CLI::App* cexp = app.add_subcommand(
      "experiment", "run a Monte-Carlo risk grid and write a CSV report");
  cexp->add_option("--config", exp.config, "experiment config file")
      ->required();
  std::int64_t exp_seed = 0;
  CLI::Option* exp_seed_opt =
      cexp->add_option("--seed", exp_seed, "override the config seed");
  cexp->add_option("--out", exp.out, "override the config output path");
  cexp->add_flag("--timing", exp.timing,
                 "record real wall times (breaks byte-identical reruns)");

  RateArgs rate;
  CLI::App* crate = app.add_subcommand(
      "rate-check", "summarize how mean risk scales along a grid axis");
  crate->add_option("--input", rate.input, "risk CSV from `experiment`")
      ->required();
  crate->add_option("--axis", rate.axis, "n or p")
      ->check(CLI::IsMember({"n", "p"}));

  try {
    app.parse(argc, argv);
    if (*gen_seed_opt) gen.seed = gen_seed;
    if (*exp_seed_opt) exp.seed = exp_seed;
    if (*ada_k_opt) ada.k = ada_k;
    if (*ada_alpha_opt) ada.alpha = ada_alpha;

    if (cgen->parsed()) return run_generate(gen);
    if (cfit->parsed()) return run_fit(fit);
    if (cada->parsed()) {
      if (!ada.k && !ada.alpha)
        throw netml::ConfigError("adaptive needs --k or --alpha");
      return run_adaptive(ada);
    }
    if (caudit->parsed()) return run_audit(audit);
    if (cexp->parsed()) return run_experiment_cmd(exp);
    if (crate->parsed()) return run_rate_check(rate);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const netml::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const netml::EnumerationBudgetError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
