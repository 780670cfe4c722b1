#ifndef SPATH_COMMANDS_HPP
#define SPATH_COMMANDS_HPP

#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spath/cox.hpp"
#include "spath/samplers.hpp"

namespace spath {

/// Prior and run parameters shared by fit / compare / oracle. NaN fields
/// resolve to data-dependent defaults (eta_upper = 2*tau, grid upper =
/// eta_upper).
struct RunConfig {
  double alpha = 0.0;
  double beta_rate = 1.0;
  double eta_mass = 1.0;
  double eta_upper = std::nan("");
  SamplerKind sampler = SamplerKind::accelerated_path;
  long cycles = 1000;
  long burn_in = 1000;
  std::uint64_t seed = 1;
  int grid_points = 200;
  double grid_upper = std::nan("");
  std::optional<double> tau;

  PriorSpec make_prior(double data_tau) const;
  std::vector<double> make_grid(const PriorSpec& prior) const;
  std::vector<std::string> echo_comments(const PriorSpec& prior, double data_tau) const;
};

/// One Table-style row per n: exact path and partition counts and their
/// percentage ratio. Throws std::invalid_argument beyond `bell_cap`.
void cmd_count(std::ostream& out, int n, int bell_cap = 300);

struct SimulateOptions {
  std::vector<HazardPiece> pieces{{0.0, 1.0}, {1.0, 0.5}};
  int count = 100;
  double tau = 3.0;
  std::uint64_t seed = 1;
  std::string out;
};
int cmd_simulate(const SimulateOptions& options);

struct FitOptions {
  std::string input;
  RunConfig run;
  std::string out;
  bool oracle_check = false;
  int oracle_cap = 12;
};
int cmd_fit(const FitOptions& options);

struct CompareOptions {
  std::string input;
  RunConfig run;
  std::vector<double> t_points{0.5, 0.99, 1.01, 2.0};
  int reps = 8;
  std::string out;
};
int cmd_compare(const CompareOptions& options);

struct OracleOptions {
  std::string input;
  RunConfig run;
  std::string out;
  bool partition_check = false;
  int path_cap = 12;
  int partition_cap = 9;
};
int cmd_oracle(const OracleOptions& options);

/// Full argv-level entry point.
/// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.
int run_cli(int argc, const char* const* argv);

/// Output location: explicit path, else $SPATH_OUTPUT_DIR/<name>, else ./<name>.
std::string resolve_output_path(const std::string& flag, const std::string& default_name);

}  // namespace spath

#endif
