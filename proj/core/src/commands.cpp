#include "spath/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spath/csv_io.hpp"
#include "spath/errors.hpp"
#include "spath/version.hpp"

namespace spath {

PriorSpec RunConfig::make_prior(double data_tau) const {
  PriorSpec prior;
  prior.alpha = alpha;
  prior.beta_rate = beta_rate;
  prior.eta_mass = eta_mass;
  prior.eta_upper = std::isnan(eta_upper) ? 2.0 * data_tau : eta_upper;
  prior.validate();
  return prior;
}

std::vector<double> RunConfig::make_grid(const PriorSpec& prior) const {
  if (grid_points < 2) throw std::invalid_argument("grid must have at least 2 points");
  const double upper = std::isnan(grid_upper) ? prior.eta_upper : grid_upper;
  if (!(upper > 0.0) || upper > prior.eta_upper) {
    throw std::invalid_argument("grid upper bound must lie in (0, eta_upper]");
  }
  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  for (int k = 0; k < grid_points; ++k) {
    grid[std::size_t(k)] = upper * double(k) / double(grid_points - 1);
  }
  return grid;
}

std::vector<std::string> RunConfig::echo_comments(const PriorSpec& prior, double data_tau) const {
  std::vector<std::string> out;
  out.push_back(std::string(kVersion));
  std::ostringstream cfg;
  cfg << "seed=" << seed << " sampler=" << sampler_name(sampler) << " cycles=" << cycles
      << " burn_in=" << burn_in;
  out.push_back(cfg.str());
  std::ostringstream pr;
  pr << "alpha=" << format_double(prior.alpha) << " beta_rate=" << format_double(prior.beta_rate)
     << " eta_mass=" << format_double(prior.eta_mass)
     << " eta_upper=" << format_double(prior.eta_upper) << " tau=" << format_double(data_tau);
  out.push_back(pr.str());
  return out;
}

namespace {

std::string with_thousands(const BigInt& value) {
  const std::string digits = value.str();
  std::string out;
  const int first = int(digits.size()) % 3 == 0 ? 3 : int(digits.size()) % 3;
  for (int i = 0; i < int(digits.size()); ++i) {
    if (i != 0 && (i - first) % 3 == 0) out.push_back(',');
    out.push_back(digits[std::size_t(i)]);
  }
  return out;
}

SurvivalDataset load_dataset(const std::string& path, std::optional<double> tau) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  return read_survival_csv(in, tau);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

void write_comments(std::ostream& out, std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << "\n";
}

}  // namespace

std::string resolve_output_path(const std::string& flag, const std::string& default_name) {
  if (!flag.empty()) return flag;
  const char* dir = std::getenv("SPATH_OUTPUT_DIR");
  if (dir != nullptr && *dir != '\0') return std::string(dir) + "/" + default_name;
  return default_name;
}

void cmd_count(std::ostream& out, int n, int bell_cap) {
  if (n < 1) throw std::invalid_argument("count: n must be >= 1");
  if (n > bell_cap) {
    throw std::invalid_argument("count: n = " + std::to_string(n) +
                                " exceeds the partition-count cap " + std::to_string(bell_cap));
  }
  const BigInt paths = count_paths(n);
  const BigInt partitions = count_partitions(n);
  const double ratio = 100.0 * double(paths) / double(partitions);
  char ratio_buf[32];
  std::snprintf(ratio_buf, sizeof(ratio_buf), "%.3f", ratio);
  out << n << "\t" << with_thousands(paths) << "\t" << with_thousands(partitions) << "\t"
      << ratio_buf << "\n";
}

int cmd_simulate(const SimulateOptions& options) {
  const SurvivalDataset data = (options.count == 0)
                                   ? SurvivalDataset::empty(options.tau)
                                   : simulate_piecewise_exponential(options.pieces, options.count,
                                                                    options.tau, options.seed);
  const std::string path = resolve_output_path(options.out, "simulated.csv");
  auto out = open_output(path);
  std::vector<std::string> comments;
  comments.push_back(std::string(kVersion));
  std::ostringstream cfg;
  cfg << "seed=" << options.seed << " n=" << options.count
      << " tau=" << format_double(options.tau) << " rates=";
  for (std::size_t k = 0; k < options.pieces.size(); ++k) {
    if (k) cfg << ';';
    cfg << format_double(options.pieces[k].start) << ':'
        << format_double(options.pieces[k].rate);
  }
  comments.push_back(cfg.str());
  write_survival_csv(out, data, comments);
  return 0;
}

namespace {

void write_hazard_curve(std::ostream& out, const HazardCurve& curve,
                        std::span<const std::string> comments) {
  write_comments(out, comments);
  out << "t,estimate,mc_se\n";
  for (std::size_t gi = 0; gi < curve.grid.size(); ++gi) {
    out << format_double(curve.grid[gi]) << ',' << format_double(curve.estimate[gi]) << ','
        << format_double(curve.mc_se[gi]) << "\n";
  }
}

}  // namespace

int cmd_fit(const FitOptions& options) {
  const SurvivalDataset data = load_dataset(options.input, options.run.tau);
  const PriorSpec prior = options.run.make_prior(data.tau());
  const std::vector<double> grid = options.run.make_grid(prior);
  auto comments = options.run.echo_comments(prior, data.tau());

  if (data.covariate_dim() == 0) {
    const PosteriorModel model(data, prior);
    ChainConfig config;
    config.kind = options.run.sampler;
    config.cycles = options.run.cycles;
    config.burn_in = options.run.burn_in;
    config.seed = options.run.seed;
    config.grid = grid;
    const ChainResult result = run_chain(config, model);

    if (options.oracle_check) {
      const auto exact = estimate_hazard_exact(grid, model, options.oracle_cap);
      double max_z = 0.0;
      for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const double z = std::fabs(result.curve.estimate[gi] - exact[gi]) /
                         (result.curve.mc_se[gi] + 1e-12);
        max_z = std::max(max_z, z);
      }
      std::ostringstream oc;
      oc << "oracle_check_max_z=" << format_double(max_z);
      comments.push_back(oc.str());
      if (max_z > 3.0) {
        throw NumericError("fit: MCMC estimate deviates from the exact oracle (max z = " +
                           format_double(max_z) + ")");
      }
    }
    auto out = open_output(resolve_output_path(options.out, "hazard.csv"));
    write_hazard_curve(out, result.curve, comments);
    return 0;
  }

  // covariates present: proportional-hazards run
  if (options.oracle_check) {
    throw std::invalid_argument("fit: --oracle-check is not available with covariates");
  }
  CoxConfig config;
  config.cycles = options.run.cycles;
  config.burn_in = options.run.burn_in;
  config.seed = options.run.seed;
  config.grid = grid;
  const CoxResult result = run_cox_chain(config, data, prior);
  const std::string curve_path = resolve_output_path(options.out, "hazard.csv");
  {
    auto out = open_output(curve_path);
    write_hazard_curve(out, result.baseline, comments);
  }
  {
    auto out = open_output(curve_path + ".theta.csv");
    write_comments(out, comments);
    std::ostringstream acc;
    acc << "theta_acceptance_rate=" << format_double(result.acceptance_rate);
    out << "# " << acc.str() << "\n";
    out << "component,mean,sd,q025,q975\n";
    for (std::size_t k = 0; k < result.theta_mean.size(); ++k) {
      out << (k + 1) << ',' << format_double(result.theta_mean[k]) << ','
          << format_double(result.theta_sd[k]) << ',' << format_double(result.theta_q025[k])
          << ',' << format_double(result.theta_q975[k]) << "\n";
    }
  }
  return 0;
}

int cmd_compare(const CompareOptions& options) {
  if (options.reps < 1) throw std::invalid_argument("compare: reps must be >= 1");
  const SurvivalDataset data = load_dataset(options.input, options.run.tau);
  const PriorSpec prior = options.run.make_prior(data.tau());
  const PosteriorModel model(data, prior);

  ChainConfig base;
  base.cycles = options.run.cycles;
  base.burn_in = options.run.burn_in;
  base.seed = options.run.seed;
  const auto rows = compare_samplers(model, options.reps, base, options.t_points);

  if (options.reps == 1) {
    std::cerr << "warning: reps=1, standard errors are unavailable\n";
  }
  auto comments = options.run.echo_comments(prior, data.tau());
  std::ostringstream rc;
  rc << "reps=" << options.reps;
  comments.push_back(rc.str());

  auto out = open_output(resolve_output_path(options.out, "compare.csv"));
  write_comments(out, comments);
  out << "t,sampler,mean,se,reps\n";
  for (const auto& row : rows) {
    out << format_double(row.t) << ',' << sampler_name(row.kind) << ','
        << format_double(row.mean) << ',' << (row.reps > 1 ? format_double(row.sd) : "") << ','
        << row.reps << "\n";
  }
  return 0;
}

int cmd_oracle(const OracleOptions& options) {
  const SurvivalDataset data = load_dataset(options.input, options.run.tau);
  const PriorSpec prior = options.run.make_prior(data.tau());
  const std::vector<double> grid = options.run.make_grid(prior);
  const PosteriorModel model(data, prior);
  const int n = model.n();
  if (n > options.path_cap) {
    throw std::invalid_argument(
        "oracle: n = " + std::to_string(n) + " exceeds the exact-enumeration cap " +
        std::to_string(options.path_cap) + "; run `fit` with a sampler instead");
  }
  const auto exact = estimate_hazard_exact(grid, model, options.path_cap);
  auto comments = options.run.echo_comments(prior, data.tau());

  std::vector<double> partition;
  if (options.partition_check) {
    if (n > options.partition_cap) {
      throw std::invalid_argument("oracle: n = " + std::to_string(n) +
                                  " exceeds the partition-enumeration cap " +
                                  std::to_string(options.partition_cap));
    }
    partition = estimate_hazard_partition_exact(grid, model, options.partition_cap);
    double max_rel = 0.0;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const double scale = std::max(std::fabs(exact[gi]), 1e-300);
      max_rel = std::max(max_rel, std::fabs(exact[gi] - partition[gi]) / scale);
    }
    std::ostringstream dev;
    dev << "partition_oracle_max_rel_dev=" << format_double(max_rel);
    comments.push_back(dev.str());
    std::cout << "# " << dev.str() << "\n";
  }

  auto out = open_output(resolve_output_path(options.out, "oracle.csv"));
  write_comments(out, comments);
  out << "t,estimate";
  if (options.partition_check) out << ",partition_estimate";
  out << "\n";
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    out << format_double(grid[gi]) << ',' << format_double(exact[gi]);
    if (options.partition_check) out << ',' << format_double(partition[gi]);
    out << "\n";
  }
  return 0;
}

namespace {

void add_run_options(CLI::App* cmd, RunConfig& run) {
  cmd->add_option("--alpha", run.alpha, "Index alpha < 1 of the prior family");
  cmd->add_option("--beta-rate", run.beta_rate, "Rate 1/beta; 0 selects the stable law");
  cmd->add_option("--eta-mass", run.eta_mass, "Total mass c of eta");
  cmd->add_option("--eta-upper", run.eta_upper, "Upper end L of eta's support (default 2*tau)");
  cmd->add_option("--sampler", run.sampler, "Sampler: ap | gp | gwcr")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, SamplerKind>{{"ap", SamplerKind::accelerated_path},
                                             {"gp", SamplerKind::gibbs_path},
                                             {"gwcr", SamplerKind::gwcr}}));
  cmd->add_option("--cycles", run.cycles, "Retained Monte Carlo cycles M");
  cmd->add_option("--burn-in", run.burn_in, "Discarded warm-up cycles");
  cmd->add_option("--seed", run.seed, "RNG seed (echoed into outputs)");
  cmd->add_option("--grid-points", run.grid_points, "Evaluation grid size");
  cmd->add_option("--grid-upper", run.grid_upper, "Evaluation grid upper end (default eta_upper)");
  cmd->add_option_function<double>(
      "--tau", [&run](const double& v) { run.tau = v; },
      "Termination time (default: max observed time)");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Bayes estimation of monotone hazard rates by S-path Monte Carlo"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "key=value config file ([section] per subcommand)");
  app.require_subcommand(1);

  std::vector<int> count_ns;
  int count_cap = 300;
  auto* count = app.add_subcommand("count", "Exact path and partition counts");
  count->fallthrough();
  count->add_option("n", count_ns, "Sample sizes")->required();
  count->add_option("--cap", count_cap, "Largest n accepted");

  SimulateOptions sim;
  std::vector<double> sim_rates{1.0, 0.5};
  std::vector<double> sim_cuts{1.0};
  auto* simulate = app.add_subcommand("simulate", "Piecewise-exponential synthetic data");
  simulate->fallthrough();
  simulate->add_option("-n,--count", sim.count, "Number of subjects");
  simulate->add_option("--tau", sim.tau, "Termination time");
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--rates", sim_rates, "Hazard level per piece");
  simulate->add_option("--cuts", sim_cuts, "Piece boundaries after time 0");
  simulate->add_option("-o,--out", sim.out, "Output CSV path");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "MCMC hazard estimate from a CSV dataset");
  fit_cmd->fallthrough();
  fit_cmd->add_option("input", fit.input, "Input CSV")->required();
  add_run_options(fit_cmd, fit.run);
  fit_cmd->add_option("-o,--out", fit.out, "Output CSV path");
  fit_cmd->add_flag("--oracle-check", fit.oracle_check,
                    "Compare against the exact estimator (small n)");
  fit_cmd->add_option("--oracle-cap", fit.oracle_cap, "Enumeration cap for --oracle-check");

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Replicated sampler comparison table");
  cmp_cmd->fallthrough();
  cmp_cmd->add_option("input", cmp.input, "Input CSV")->required();
  add_run_options(cmp_cmd, cmp.run);
  cmp_cmd->add_option("--reps", cmp.reps, "Independent replications per sampler");
  cmp_cmd->add_option("--t", cmp.t_points, "Evaluation time points");
  cmp_cmd->add_option("-o,--out", cmp.out, "Output CSV path");

  OracleOptions oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact enumeration estimate (small n)");
  oracle_cmd->fallthrough();
  oracle_cmd->add_option("input", oracle.input, "Input CSV")->required();
  add_run_options(oracle_cmd, oracle.run);
  oracle_cmd->add_option("-o,--out", oracle.out, "Output CSV path");
  oracle_cmd->add_flag("--partition-check", oracle.partition_check,
                       "Also run the partition-sum oracle and report the deviation");
  oracle_cmd->add_option("--path-cap", oracle.path_cap, "Path enumeration cap");
  oracle_cmd->add_option("--partition-cap", oracle.partition_cap, "Partition enumeration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (count->parsed()) {
      std::cout << "n\tpaths\tpartitions\tratio_pct\n";
      for (int n : count_ns) cmd_count(std::cout, n, count_cap);
      return 0;
    }
    if (simulate->parsed()) {
      if (sim_rates.size() != sim_cuts.size() + 1) {
        throw std::invalid_argument("simulate: need one more rate than cuts");
      }
      sim.pieces.clear();
      sim.pieces.push_back({0.0, sim_rates[0]});
      for (std::size_t k = 0; k < sim_cuts.size(); ++k) {
        sim.pieces.push_back({sim_cuts[k], sim_rates[k + 1]});
      }
      return cmd_simulate(sim);
    }
    if (fit_cmd->parsed()) return cmd_fit(fit);
    if (cmp_cmd->parsed()) return cmd_compare(cmp);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle);
    throw std::invalid_argument("no subcommand selected");
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace spath
