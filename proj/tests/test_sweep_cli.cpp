#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bellsim/errors.hpp"
#include "bellsim/sweep.hpp"
#include "doctest.h"

namespace {

namespace fs = std::filesystem;
using namespace bellsim;

constexpr double kInf = std::numeric_limits<double>::infinity();

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("bellsim_tests_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(BELLSIM_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

// Header + data rows of a CSV payload, metadata comments stripped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split_csv(line);
    } else {
      t.rows.push_back(split_csv(line));
    }
  }
  return t;
}

int column_index(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

TEST_SUITE_BEGIN("sweep_cli");

TEST_CASE("gamma_grid_expansion_covers_the_endpoint") {
  const std::vector<double> grid = expand_gamma_grid(-1.6, -1.3, 0.01);
  REQUIRE(grid.size() == 31);
  CHECK(grid.front() == -1.6);
  CHECK(std::abs(grid.back() - (-1.3)) <= 1e-12);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] > grid[i - 1]);
  }
  const std::vector<double> single = expand_gamma_grid(-1.5, -1.5, 0.1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == -1.5);
  CHECK_THROWS_AS(expand_gamma_grid(-1.6, -1.3, 0.0), UsageError);
  CHECK_THROWS_AS(expand_gamma_grid(-1.6, -1.3, -0.01), UsageError);
  CHECK_THROWS_AS(expand_gamma_grid(-1.3, -1.6, 0.01), UsageError);
}

TEST_CASE("spec_validation_rejects_malformed_requests") {
  SweepSpec good;
  good.n_list = {10};
  good.gammas = {-1.5};
  CHECK_NOTHROW(validate(good));

  SweepSpec s = good;
  s.n_list.clear();
  CHECK_THROWS_AS(validate(s), UsageError);
  s = good;
  s.gammas.clear();
  CHECK_THROWS_AS(validate(s), UsageError);
  s = good;
  s.n_list = {0};
  CHECK_THROWS_AS(validate(s), UsageError);
  s = good;
  s.betas = {-2.0};
  CHECK_THROWS_AS(validate(s), UsageError);
  s = good;
  s.rules = {{0.0, -1.1}};
  CHECK_THROWS_AS(validate(s), UsageError);
  s = good;
  s.rules = {{1.5, -1.1}};
  CHECK_THROWS_AS(validate(s), UsageError);
  s = good;
  s.columns = {"q_mu_exact", "no_such_column"};
  CHECK_THROWS_AS(validate(s), UsageError);
}

TEST_CASE("spec_hash_is_stable_and_sensitive") {
  SweepSpec s;
  s.n_list = {100, 500};
  s.gammas = {-1.6, -1.3};
  s.columns = {"q_mu_exact"};
  const std::string h1 = spec_hash(s);
  const std::string h2 = spec_hash(s);
  CHECK(h1 == h2);
  REQUIRE(h1.size() == 16);
  for (char c : h1) {
    CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
  }
  s.columns = {"q_mu_analytic"};
  CHECK(spec_hash(s) != h1);
  s.columns = {"q_mu_exact"};
  s.gammas.push_back(-1.2);
  CHECK(spec_hash(s) != h1);
}

TEST_CASE("shortest_roundtrip_double_formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(kInf) == "inf");
  CHECK(format_double(-kInf) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  for (double v : {1.0 / 3.0, -2.868007e-7, 1e300, 77.274244167277609417,
                   -251.461176, 0.0}) {
    const std::string s = format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);  // bitwise round trip
  }
}

TEST_CASE("single_point_rows_cover_the_requested_columns") {
  const std::vector<ResultRow> cold = compute_rows(100, -1.4, {}, {});
  REQUIRE(cold.size() == 1);
  const ResultRow& r = cold[0];
  CHECK(r.n_qubits == 100);
  CHECK_FALSE(r.beta.has_value());
  REQUIRE(r.mu.has_value());
  CHECK(*r.mu == 70);
  REQUIRE(r.q_mu_exact.has_value());
  CHECK(*r.q_mu_exact == doctest::Approx(5.7602).epsilon(2e-4));
  REQUIRE(r.q_mu_peak.has_value());
  CHECK(*r.q_mu_peak < *r.q_mu_exact);
  REQUIRE(r.q_mu_analytic.has_value());
  REQUIRE(r.delta[0].has_value());
  CHECK(*r.delta[0] == doctest::Approx(2.868007e-7).epsilon(1e-4));
  REQUIRE(r.depth_k.has_value());
  CHECK(*r.depth_k == 62);  // floor(70 - 2 - 5.7602)
  REQUIRE(r.z0.has_value());
  CHECK(*r.z0 == doctest::Approx(std::sqrt(1.0 - 1.0 / 1.96)).epsilon(1e-12));
  CHECK(r.error.empty());

  const std::vector<ResultRow> warm = compute_rows(100, -1.4, {0.0, kInf}, {});
  REQUIRE(warm.size() == 2);
  REQUIRE(warm[0].beta.has_value());
  CHECK(*warm[0].beta == 0.0);
  REQUIRE(warm[0].q_mu_thermal.has_value());
  CHECK(*warm[0].q_mu_thermal == -kInf);
  CHECK_FALSE(warm[0].depth_k.has_value());  // -inf exponent: no depth bound
  REQUIRE(warm[1].q_mu_thermal.has_value());
  CHECK(*warm[1].q_mu_thermal == doctest::Approx(5.7602).epsilon(2e-4));
  REQUIRE(warm[1].depth_k.has_value());
  CHECK(*warm[1].depth_k == 62);
}

TEST_CASE("columns_outside_the_broken_phase_degrade_gracefully") {
  // Gaps exist at any gamma; mu-dependent quantities need gamma < -1.
  const std::vector<ResultRow> ok = compute_rows(10, -0.5, {}, {"delta_1"});
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].error.empty());
  REQUIRE(ok[0].delta[0].has_value());
  CHECK(*ok[0].delta[0] > 0.0);
  CHECK_FALSE(ok[0].q_mu_exact.has_value());

  const std::vector<ResultRow> trapped =
      compute_rows(10, -0.5, {}, {"q_mu_exact"});
  REQUIRE(trapped.size() == 1);
  CHECK_FALSE(trapped[0].error.empty());
  CHECK_FALSE(trapped[0].q_mu_exact.has_value());

  CHECK_THROWS_AS(
      compute_rows(10, -0.5, {}, {"q_mu_exact"}, 0, /*trap_errors=*/false),
      DomainError);
  CHECK_THROWS_AS(
      compute_rows(10, -1.4, {}, {"q_mu_exact"}, 15, /*trap_errors=*/false),
      DomainError);  // order exceeds N
}

TEST_CASE("sweep_output_is_identical_for_any_worker_count") {
  SweepSpec spec;
  spec.n_list = {20, 10};  // unsorted on purpose; output order is canonical
  spec.gammas = {-1.2, -1.6, -1.4};
  spec.columns = {"q_mu_exact", "delta_1"};

  spec.workers = 1;
  std::ostringstream serial;
  run_sweep(spec, serial);
  spec.workers = 4;
  std::ostringstream parallel;
  run_sweep(spec, parallel);
  CHECK(serial.str() == parallel.str());

  const CsvTable t = parse_csv(serial.str());
  REQUIRE(t.rows.size() == 6);
  REQUIRE(t.header ==
          std::vector<std::string>{"N", "gamma", "beta", "q_mu_exact",
                                   "delta_1", "error"});
  // Rows sorted by (N, gamma).
  CHECK(t.rows[0][0] == "10");
  CHECK(t.rows[0][1] == "-1.6");
  CHECK(t.rows[2][1] == "-1.2");
  CHECK(t.rows[3][0] == "20");
  // T=0 rows leave beta empty.
  CHECK(t.rows[0][2].empty());
  CHECK(t.rows[0][5].empty());
}

TEST_CASE("json_rows_spell_missing_values_as_null") {
  SweepSpec spec;
  spec.n_list = {10};
  spec.gammas = {-0.5};  // mu undefined here: row carries an error
  spec.columns = {"q_mu_exact"};
  spec.format = OutputFormat::kJson;
  spec.workers = 1;
  std::ostringstream out;
  run_sweep(spec, out);
  std::istringstream lines(out.str());
  std::string meta, row;
  REQUIRE(std::getline(lines, meta));
  REQUIRE(std::getline(lines, row));
  CHECK(meta.rfind("{\"meta\":", 0) == 0);
  CHECK(meta.find("\"spec_hash\"") != std::string::npos);
  CHECK(row.find("\"q_mu_exact\":null") != std::string::npos);
  CHECK(row.find("\"error\":\"") != std::string::npos);
}

TEST_CASE("atomic_write_and_io_failures") {
  const fs::path out_path = scratch_dir() / "sweep_out.csv";
  SweepSpec spec;
  spec.n_list = {10};
  spec.gammas = {-1.4};
  spec.columns = {"q_mu_exact"};
  spec.workers = 1;
  spec.output_path = out_path.string();
  std::ostringstream unused;
  run_sweep(spec, unused);
  CHECK(unused.str().empty());
  REQUIRE(fs::exists(out_path));
  const std::string on_disk = read_file(out_path);
  CHECK(on_disk.rfind("# bellsim", 0) == 0);
  CHECK_FALSE(fs::exists(out_path.string() + ".tmp"));

  // Same spec to a stream: identical bytes.
  spec.output_path.clear();
  std::ostringstream direct;
  run_sweep(spec, direct);
  CHECK(direct.str() == on_disk);

  spec.output_path = "/nonexistent_dir_bellsim/out.csv";
  CHECK_THROWS_AS(run_sweep(spec, unused), IoError);
  CHECK_FALSE(fs::exists("/nonexistent_dir_bellsim/out.csv.tmp"));
}

TEST_CASE("csv_fields_round_trip_at_full_precision") {
  const std::vector<ResultRow> rows =
      compute_rows(100, -1.5, {}, {"q_mu_exact"});
  REQUIRE(rows.size() == 1);
  std::ostringstream out;
  write_rows(out, rows, {"q_mu_exact"}, OutputFormat::kCsv, "deadbeef");
  const CsvTable t = parse_csv(out.str());
  REQUIRE(t.rows.size() == 1);
  const int col = column_index(t, "q_mu_exact");
  REQUIRE(col >= 0);
  const double parsed = std::strtod(t.rows[0][col].c_str(), nullptr);
  CHECK(parsed == *rows[0].q_mu_exact);
}

TEST_CASE("cli_spectrum_emits_the_free_field_ladder") {
  const fs::path out = scratch_dir() / "spectrum.csv";
  CHECK(run_cli("spectrum --n 10 --gamma 0 --levels 8 --out " + out.string()) ==
        0);
  const CsvTable t = parse_csv(read_file(out));
  REQUIRE(t.header == std::vector<std::string>{"level", "energy", "delta"});
  REQUIRE(t.rows.size() == 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(std::strtod(t.rows[i][0].c_str(), nullptr) == i);
    CHECK(std::strtod(t.rows[i][2].c_str(), nullptr) ==
          doctest::Approx(i).scale(1.0).epsilon(1e-11));
  }
  CHECK(run_cli("spectrum --n 10 --gamma 0 --levels 0") == 2);
  CHECK(run_cli("spectrum --gamma 0") == 2);
  CHECK(run_cli("spectrum --n 10 --gamma 0 --no-such-flag") == 2);
}

TEST_CASE("cli_groundstate_emits_one_row_per_basis_state") {
  const fs::path out = scratch_dir() / "ground.csv";
  CHECK(run_cli("groundstate --n 20 --gamma -1.4 --out " + out.string()) == 0);
  const CsvTable t = parse_csv(read_file(out));
  REQUIRE(t.header == std::vector<std::string>{"n", "z", "psi", "v_eff"});
  REQUIRE(t.rows.size() == 21);
  CHECK(std::strtod(t.rows[0][1].c_str(), nullptr) == 1.0);
  CHECK(std::strtod(t.rows[20][1].c_str(), nullptr) == -1.0);
  for (const auto& row : t.rows) {
    CHECK(std::strtod(row[2].c_str(), nullptr) > 0.0);
  }
}

TEST_CASE("cli_bell_reports_the_analytic_exponent") {
  const fs::path out = scratch_dir() / "bell.json";
  CHECK(run_cli("bell --n 500 --gamma -1.5 --format json --out " +
                out.string()) == 0);
  const std::string text = read_file(out);
  CHECK(text.find("\"mu\":374") != std::string::npos);
  // 500*f(-1.5) = 77.27424416727760941...; the trailing digits wander a few
  // ulp with evaluation order, the leading twelve do not.
  CHECK(text.find("\"q_mu_analytic\":77.2742441672") != std::string::npos);
}

TEST_CASE("cli_exit_codes_distinguish_failure_classes") {
  CHECK(run_cli("bell --n 100 --gamma -0.5") == 3);   // outside double well
  CHECK(run_cli("thermal --n 10 --gamma -1.4") == 2); // no temperature given
  CHECK(run_cli("bell --n 100 --gamma -1.5 --out /nonexistent_dir_bellsim/x.csv") ==
        5);
  CHECK(run_cli("sweep --n 10") == 2);  // no gamma grid
  CHECK(run_cli("") == 2);              // subcommand required
  CHECK(run_cli("--help >/dev/null") == 0);
}

TEST_CASE("cli_config_file_sits_between_defaults_and_flags") {
  const fs::path cfg = scratch_dir() / "point.conf";
  {
    std::ofstream f(cfg);
    f << "n=10\ngamma=-1.4\n";
  }
  const fs::path out = scratch_dir() / "from_config.csv";
  CHECK(run_cli("bell --config " + cfg.string() + " --out " + out.string()) ==
        0);
  CsvTable t = parse_csv(read_file(out));
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == "10");
  CHECK(t.rows[0][1] == "-1.4");

  // An explicit flag beats the config value.
  CHECK(run_cli("bell --config " + cfg.string() + " --gamma -1.5 --out " +
                out.string()) == 0);
  t = parse_csv(read_file(out));
  CHECK(t.rows[0][0] == "10");
  CHECK(t.rows[0][1] == "-1.5");
}

TEST_CASE("cli_sweep_accepts_array_valued_config_recipes") {
  const fs::path cfg = scratch_dir() / "recipe.conf";
  {
    std::ofstream f(cfg);
    f << "n=[10, 20]\n"
         "gamma-start=-1.5\n"
         "gamma-stop=-1.4\n"
         "gamma-step=0.05\n"
         "columns=[q_mu_exact, delta_1]\n";
  }
  const fs::path out = scratch_dir() / "recipe_out.csv";
  CHECK(run_cli("sweep --config " + cfg.string() + " --out " + out.string()) ==
        0);
  const CsvTable t = parse_csv(read_file(out));
  REQUIRE(t.rows.size() == 6);  // two sizes x three grid points
  REQUIRE(t.header ==
          std::vector<std::string>{"N", "gamma", "beta", "q_mu_exact",
                                   "delta_1", "error"});
}

TEST_CASE("cli_resolves_bare_config_names_against_the_config_dir") {
  const std::string name = "bellsim_profile_for_env_test.conf";
  {
    std::ofstream f(scratch_dir() / name);
    f << "n=10\ngamma=-1.2\n";
  }
  REQUIRE(setenv("BELLSIM_CONFIG_DIR", scratch_dir().c_str(), 1) == 0);
  const fs::path out = scratch_dir() / "from_env.csv";
  const int code = run_cli("bell --config " + name + " --out " + out.string());
  unsetenv("BELLSIM_CONFIG_DIR");
  CHECK(code == 0);
  const CsvTable t = parse_csv(read_file(out));
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == "10");
  CHECK(t.rows[0][1] == "-1.2");
  // Without the environment hook the bare name cannot resolve.
  CHECK(run_cli("bell --config " + name + " --out " + out.string()) != 0);
}

TEST_CASE("cli_onset_prints_the_root") {
  const fs::path out = scratch_dir() / "onset.txt";
  CHECK(run_cli("onset > " + out.string()) == 0);
  CHECK(read_file(out).rfind("-1.30163106950615", 0) == 0);
}

TEST_CASE("cli_sweep_expands_gamma_grids") {
  const fs::path out = scratch_dir() / "grid.csv";
  CHECK(run_cli("sweep --n 10 --gamma-start -1.6 --gamma-stop -1.5 "
                "--gamma-step 0.05 --columns q_mu_exact --out " +
                out.string()) == 0);
  const CsvTable t = parse_csv(read_file(out));
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0][1] == "-1.6");
  CHECK(t.rows[2][1] == "-1.5");
  CHECK(run_cli("sweep --n 10 --gamma-start -1.6 --columns q_mu_exact") == 2);
}

TEST_SUITE_END();
