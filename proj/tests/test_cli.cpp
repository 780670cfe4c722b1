#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spath/commands.hpp"
#include "spath/csv_io.hpp"
#include "spath/errors.hpp"
#include "support.hpp"

using namespace spath;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("spath_test_" + std::to_string(std::rand()) + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"spath"};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_cli(int(argv.size()), argv.data());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::vector<double>> parse_numeric_rows(const std::string& content,
                                                    char expect_cols = 0) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(line[0])) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      row.push_back(field.empty() ? std::nan("") : std::stod(field));
    }
    if (expect_cols) REQUIRE(int(row.size()) == int(expect_cols));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("cmd_count rows match the reference table") {
  std::ostringstream out;
  cmd_count(out, 7);
  CHECK(out.str() == "7\t429\t877\t48.917\n");
  std::ostringstream out5;
  cmd_count(out5, 5);
  CHECK(out5.str() == "5\t42\t52\t80.769\n");
  std::ostringstream out1;
  cmd_count(out1, 1);
  CHECK(out1.str() == "1\t1\t1\t100.000\n");
  std::ostringstream out20;
  cmd_count(out20, 20);
  CHECK(out20.str() == "20\t6,564,120,420\t51,724,158,235,372\t0.013\n");
  CHECK_THROWS_AS(cmd_count(out, 1000), std::invalid_argument);
}

TEST_CASE("simulate: determinism, censoring fraction, empty file") {
  TempDir dir;
  const std::string out_a = dir.file("a.csv");
  const std::string out_b = dir.file("b.csv");

  SUBCASE("byte-identical reruns and ~13.5% censoring") {
    SimulateOptions options;
    options.count = 2000;
    options.seed = 11;
    options.out = out_a;
    CHECK(cmd_simulate(options) == 0);
    options.out = out_b;
    CHECK(cmd_simulate(options) == 0);
    CHECK(read_file(out_a) == read_file(out_b));

    std::ifstream in(out_a);
    const auto data = read_survival_csv(in, 3.0);
    const double censored_fraction =
        double(data.total_count() - data.complete_count()) / data.total_count();
    CHECK(censored_fraction == doctest::Approx(std::exp(-2.0)).epsilon(0.25));
  }

  SUBCASE("zero subjects gives a header-only file") {
    SimulateOptions options;
    options.count = 0;
    options.out = out_a;
    CHECK(cmd_simulate(options) == 0);
    const std::string content = read_file(out_a);
    CHECK(content.find("time,status") != std::string::npos);
    CHECK(parse_numeric_rows(content).empty());
  }
}

TEST_CASE("csv round trip is exact") {
  Rng rng = make_rng(3);
  const auto data = testing::random_dataset(40, 3.0, rng, 6);
  std::ostringstream out;
  write_survival_csv(out, data, std::vector<std::string>{"round trip"});
  std::istringstream in(out.str());
  const auto back = read_survival_csv(in, 3.0);
  REQUIRE(back.total_count() == data.total_count());
  for (int i = 0; i < data.total_count(); ++i) {
    CHECK(back.records()[std::size_t(i)].time == data.records()[std::size_t(i)].time);
    CHECK(back.records()[std::size_t(i)].status == data.records()[std::size_t(i)].status);
  }
}

TEST_CASE("csv parse errors carry line numbers") {
  {
    std::istringstream in("time,status\n1.0,1\nbad,1\n");
    try {
      read_survival_csv(in, 3.0);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  {
    std::istringstream in("time,status\n1.0,2\n");
    CHECK_THROWS_WITH_AS(read_survival_csv(in, 3.0),
                         doctest::Contains("status must be 0 or 1"), DataError);
  }
  {
    std::istringstream in("t,s\n");
    CHECK_THROWS_AS(read_survival_csv(in, 3.0), DataError);
  }
  {
    std::istringstream in("time,status,z1\n1.0,1\n");
    CHECK_THROWS_AS(read_survival_csv(in, 3.0), DataError);
  }
}

TEST_CASE("fit on a tiny dataset passes its oracle check and is monotone") {
  TempDir dir;
  const std::string input = dir.file("tiny.csv");
  {
    std::ofstream out(input);
    out << "time,status\n0.4,1\n0.9,1\n1.3,1\n1.8,1\n2.2,1\n2.7,1\n3.0,0\n3.0,0\n";
  }
  const std::string curve_path = dir.file("curve.csv");
  FitOptions options;
  options.input = input;
  options.out = curve_path;
  options.run.tau = 3.0;
  options.run.cycles = 4000;
  options.run.burn_in = 500;
  options.run.seed = 7;
  options.run.grid_points = 60;
  options.oracle_check = true;
  CHECK(cmd_fit(options) == 0);

  const auto rows = parse_numeric_rows(read_file(curve_path), 3);
  REQUIRE(rows.size() == 60);
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    CHECK(rows[k + 1][1] <= rows[k][1] * (1.0 + 1e-12) + 1e-15);
  }
  CHECK(read_file(curve_path).find("oracle_check_max_z=") != std::string::npos);
  CHECK(read_file(curve_path).find("seed=7") != std::string::npos);

  SUBCASE("ap and gp curves agree within combined MC error") {
    FitOptions gp_options = options;
    gp_options.run.sampler = SamplerKind::gibbs_path;
    gp_options.run.cycles = 8000;
    gp_options.out = dir.file("gp.csv");
    gp_options.oracle_check = false;
    CHECK(cmd_fit(gp_options) == 0);
    const auto gp_rows = parse_numeric_rows(read_file(gp_options.out), 3);
    REQUIRE(gp_rows.size() == rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const double combined = 3.0 * std::hypot(rows[k][2], gp_rows[k][2]) + 1e-9;
      CHECK(std::fabs(rows[k][1] - gp_rows[k][1]) <= combined);
    }
  }
}

TEST_CASE("fit with covariates writes a theta summary") {
  TempDir dir;
  Rng rng = make_rng(8);
  const auto data = testing::simulate_cox_data(60, 3.0, 0.6, rng);
  const std::string input = dir.file("cox.csv");
  {
    std::ofstream out(input);
    write_survival_csv(out, data, {});
  }
  FitOptions options;
  options.input = input;
  options.out = dir.file("cox_curve.csv");
  options.run.tau = 3.0;
  options.run.cycles = 300;
  options.run.burn_in = 150;
  options.run.grid_points = 20;
  CHECK(cmd_fit(options) == 0);
  const std::string theta_csv = read_file(dir.file("cox_curve.csv") + ".theta.csv");
  CHECK(theta_csv.find("component,mean,sd,q025,q975") != std::string::npos);
  CHECK(theta_csv.find("theta_acceptance_rate=") != std::string::npos);
}

TEST_CASE("compare emits one row per (t, sampler)") {
  TempDir dir;
  const std::string input = dir.file("data.csv");
  {
    SimulateOptions options;
    options.count = 30;
    options.seed = 5;
    options.out = input;
    cmd_simulate(options);
  }
  CompareOptions options;
  options.input = input;
  options.run.tau = 3.0;
  options.run.cycles = 150;
  options.run.burn_in = 50;
  options.reps = 6;
  options.t_points = {0.5, 0.99, 1.01, 2.0};
  options.out = dir.file("cmp.csv");
  CHECK(cmd_compare(options) == 0);
  const std::string content = read_file(options.out);
  CHECK(content.find("t,sampler,mean,se,reps") != std::string::npos);
  int ap_rows = 0;
  int gp_rows = 0;
  int gwcr_rows = 0;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find(",ap,") != std::string::npos) ++ap_rows;
    if (line.find(",gp,") != std::string::npos) ++gp_rows;
    if (line.find(",gwcr,") != std::string::npos) ++gwcr_rows;
  }
  CHECK(ap_rows == 4);
  CHECK(gp_rows == 4);
  CHECK(gwcr_rows == 4);

  SUBCASE("reps=1 leaves the SE column empty") {
    options.reps = 1;
    options.out = dir.file("cmp1.csv");
    CHECK(cmd_compare(options) == 0);
    std::istringstream rows(read_file(options.out));
    int data_rows = 0;
    while (std::getline(rows, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 't') continue;
      ++data_rows;
      CHECK(line.find(",,1") != std::string::npos);  // empty SE, reps=1
    }
    CHECK(data_rows == 12);
  }
}

TEST_CASE("oracle command") {
  TempDir dir;
  const std::string input = dir.file("data.csv");

  SUBCASE("n = 8: path and partition oracles agree to 1e-10") {
    Rng rng = make_rng(9);
    const auto data = testing::random_dataset(8, 3.0, rng, 2);
    {
      std::ofstream out(input);
      write_survival_csv(out, data, {});
    }
    OracleOptions options;
    options.input = input;
    options.run.tau = 3.0;
    options.run.grid_points = 25;
    options.partition_check = true;
    options.out = dir.file("oracle.csv");
    CHECK(cmd_oracle(options) == 0);
    const std::string content = read_file(options.out);
    const auto pos = content.find("partition_oracle_max_rel_dev=");
    REQUIRE(pos != std::string::npos);
    const double dev = std::stod(content.substr(pos + 29));
    CHECK(dev <= 1e-10);
    const auto rows = parse_numeric_rows(content, 3);
    REQUIRE(rows.size() == 25);
  }

  SUBCASE("empty data returns the prior curve") {
    {
      std::ofstream out(input);
      out << "time,status\n";
    }
    OracleOptions options;
    options.input = input;
    options.run.tau = 3.0;
    options.run.eta_upper = 6.0;
    options.run.grid_points = 13;
    options.out = dir.file("prior.csv");
    CHECK(cmd_oracle(options) == 0);
    const auto rows = parse_numeric_rows(read_file(options.out), 2);
    REQUIRE(rows.size() == 13);
    for (const auto& row : rows) {
      CHECK(row[1] == doctest::Approx((6.0 - row[0]) / 6.0).epsilon(1e-10));
    }
  }

  SUBCASE("cap exceeded is a usage error with guidance") {
    Rng rng = make_rng(10);
    const auto data = testing::random_dataset(13, 3.0, rng, 0);
    {
      std::ofstream out(input);
      write_survival_csv(out, data, {});
    }
    OracleOptions options;
    options.input = input;
    options.run.tau = 3.0;
    CHECK_THROWS_WITH_AS(cmd_oracle(options), doctest::Contains("cap"), std::invalid_argument);
  }
}

TEST_CASE("run_cli exit codes") {
  TempDir dir;

  SUBCASE("0 on success") {
    CHECK(cli({"count", "5"}) == 0);
  }
  SUBCASE("2 on usage errors") {
    CHECK(cli({"count"}) == 2);             // missing required argument
    CHECK(cli({"--no-such-flag"}) == 2);    // unknown flag
    CHECK(cli({"count", "999999"}) == 2);   // beyond the Bell cap
  }
  SUBCASE("3 on data errors") {
    const std::string bad = dir.file("bad.csv");
    {
      std::ofstream out(bad);
      out << "time,status\nx,1\n";
    }
    CHECK(cli({"fit", bad.c_str()}) == 3);
    CHECK(cli({"fit", dir.file("missing.csv").c_str()}) == 3);
  }
  SUBCASE("4 on numeric failures") {
    // a complete time at eta_upper makes every path weight vanish
    const std::string degenerate = dir.file("degenerate.csv");
    {
      std::ofstream out(degenerate);
      out << "time,status\n3.0,1\n";
    }
    const std::string out_path = dir.file("never.csv");
    CHECK(cli({"oracle", degenerate.c_str(), "--tau", "3.0", "--eta-upper", "3.0", "-o",
               out_path.c_str()}) == 4);
  }
}

TEST_CASE("cli binary smoke test") {
  TempDir dir;
  const std::string cmd = std::string(SPATH_CLI_PATH) + " count 10 > " + dir.file("out.txt");
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string content = read_file(dir.file("out.txt"));
  CHECK(content.find("16,796") != std::string::npos);
  CHECK(content.find("115,975") != std::string::npos);
  CHECK(content.find("14.482") != std::string::npos);

  const std::string version_cmd = std::string(SPATH_CLI_PATH) + " --version > " + dir.file("v.txt");
  REQUIRE(std::system(version_cmd.c_str()) == 0);
  CHECK(read_file(dir.file("v.txt")).find("spath") != std::string::npos);
}

TEST_CASE("config file values are overridden by flags") {
  TempDir dir;
  const std::string input = dir.file("data.csv");
  {
    SimulateOptions sim;
    sim.count = 6;
    sim.seed = 12;
    sim.out = input;
    cmd_simulate(sim);
  }
  const std::string config = dir.file("run.cfg");
  {
    std::ofstream out(config);
    out << "[oracle]\n";
    out << "grid-points=17\n";
    out << "tau=3.0\n";
  }
  const std::string out_a = dir.file("a.csv");
  CHECK(cli({"oracle", input.c_str(), "--config", config.c_str(), "-o", out_a.c_str()}) == 0);
  CHECK(parse_numeric_rows(read_file(out_a), 2).size() == 17);

  const std::string out_b = dir.file("b.csv");
  CHECK(cli({"oracle", input.c_str(), "--config", config.c_str(), "--grid-points", "9", "-o",
             out_b.c_str()}) == 0);
  CHECK(parse_numeric_rows(read_file(out_b), 2).size() == 9);
}
