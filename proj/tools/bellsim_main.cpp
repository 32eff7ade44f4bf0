// bellsim: exact and approximate many-body Bell correlations of the
// fully-connected transverse-field chain in its symmetric subspace.
//
// Subcommands: spectrum, groundstate, bell, ha-compare, thermal, sweep,
// onset. Exit codes: 0 success, 2 usage, 3 domain, 4 convergence, 5 I/O.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bellsim/bell.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/harmonic.hpp"
#include "bellsim/model.hpp"
#include "bellsim/spectral.hpp"
#include "bellsim/sweep.hpp"
#include "bellsim/thermal.hpp"
#include "bellsim/version.hpp"

namespace {

using namespace bellsim;

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitConvergence = 4;
constexpr int kExitIo = 5;

OutputFormat parse_format(const std::string& s) {
  return s == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
}

// Common single-command knobs.
struct CommonOpts {
  int n = 0;
  double gamma = 0.0;
  std::string out_path;
  std::string format = "csv";
  std::string config_path;  // consumed by expand_config before parsing
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_gamma = true) {
  cmd->add_option("--n", o.n, "number of qubits N")->required();
  auto* g = cmd->add_option("--gamma", o.gamma,
                            "dimensionless coupling gamma = U*N/field");
  if (needs_gamma) g->required();
  cmd->add_option("--out", o.out_path,
                  "output file (atomic write); stdout if omitted");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--config", o.config_path,
                  "flat key=value config file (defaults < config < flags)");
}

// Temperature selection shared by bell/thermal/sweep: either absolute
// --beta or the gap-fraction rule --t-fraction + --t-ref-gamma
// (beta = 1/(fraction * delta_1(ref_gamma, N))).
struct ThermoOpts {
  std::vector<double> betas;
  std::vector<double> fractions;
  std::vector<double> ref_gammas;
};

void add_thermo(CLI::App* cmd, ThermoOpts& o) {
  cmd->add_option("--beta", o.betas, "inverse temperature(s), >= 0");
  cmd->add_option("--t-fraction", o.fractions,
                  "k_bT as this fraction of delta_1 at --t-ref-gamma");
  cmd->add_option("--t-ref-gamma", o.ref_gammas,
                  "gamma at which the reference gap delta_1 is evaluated");
}

std::vector<GapFractionRule> zip_rules(const ThermoOpts& o) {
  if (o.fractions.size() != o.ref_gammas.size()) {
    throw UsageError("--t-fraction and --t-ref-gamma must pair up");
  }
  std::vector<GapFractionRule> rules;
  rules.reserve(o.fractions.size());
  for (std::size_t i = 0; i < o.fractions.size(); ++i) {
    if (!(o.fractions[i] > 0.0 && o.fractions[i] <= 1.0)) {
      throw UsageError("gap-fraction must be in (0, 1]");
    }
    rules.push_back({o.fractions[i], o.ref_gammas[i]});
  }
  return rules;
}

// Resolves the rules to absolute betas for a fixed N (single commands).
std::vector<double> resolve_betas(int n, const ThermoOpts& o) {
  std::vector<double> betas = o.betas;
  for (double b : betas) {
    if (std::isnan(b) || b < 0.0) throw UsageError("beta must be >= 0");
  }
  for (const auto& rule : zip_rules(o)) {
    const ModelParams ref = params_from_gamma(n, rule.reference_gamma);
    const SpectralDecomposition dec = diagonalize(build_hamiltonian(ref), 2);
    const double kt = rule.fraction * (dec.eigenvalues[1] - dec.eigenvalues[0]);
    betas.push_back(kt > 0.0
                        ? 1.0 / kt
                        : std::numeric_limits<double>::infinity());
  }
  std::sort(betas.begin(), betas.end());
  return betas;
}

// Hash stamped into single-command output: the command rendered as a
// one-point sweep spec.
std::string point_hash(int n, double gamma, const std::vector<double>& betas,
                       const std::vector<std::string>& columns,
                       OutputFormat format) {
  SweepSpec spec;
  spec.n_list = {n};
  spec.gammas = {gamma};
  spec.betas = betas;
  spec.columns = columns;
  spec.format = format;
  return spec_hash(spec);
}

void emit_rows(const CommonOpts& common, const std::vector<ResultRow>& rows,
               const std::vector<std::string>& columns,
               const std::vector<double>& betas) {
  const OutputFormat fmt = parse_format(common.format);
  const std::string hash =
      point_hash(common.n, common.gamma, betas, columns, fmt);
  emit_to(common.out_path, std::cout, [&](std::ostream& sink) {
    write_rows(sink, rows, columns, fmt, hash);
  });
}

int cmd_spectrum(const CommonOpts& common, int levels) {
  const ModelParams p = params_from_gamma(common.n, common.gamma);
  const SpectralDecomposition dec = diagonalize(build_hamiltonian(p));
  levels = std::min(levels, common.n + 1);
  const std::vector<double> d = gaps(dec, levels);
  NumericTable table;
  table.columns = {"level", "energy", "delta"};
  for (int i = 0; i < levels; ++i) {
    table.rows.push_back({static_cast<double>(i), dec.eigenvalues[i], d[i]});
  }
  const OutputFormat fmt = parse_format(common.format);
  const std::string hash = point_hash(common.n, common.gamma, {}, {}, fmt);
  emit_to(common.out_path, std::cout, [&](std::ostream& sink) {
    write_numeric_table(sink, table, fmt, hash);
  });
  return 0;
}

int cmd_groundstate(const CommonOpts& common) {
  const ModelParams p = params_from_gamma(common.n, common.gamma);
  const SpectralDecomposition dec = diagonalize(build_hamiltonian(p));
  NumericTable table;
  table.columns = {"n", "z", "psi", "v_eff"};
  for (int n = 0; n <= common.n; ++n) {
    const double z = lattice_z(n, common.n);
    table.rows.push_back({static_cast<double>(n), z,
                          dec.eigenvectors.col(0)[n], v_eff(z, common.gamma)});
  }
  const OutputFormat fmt = parse_format(common.format);
  const std::string hash = point_hash(common.n, common.gamma, {}, {}, fmt);
  emit_to(common.out_path, std::cout, [&](std::ostream& sink) {
    write_numeric_table(sink, table, fmt, hash);
  });
  return 0;
}

int cmd_bell(const CommonOpts& common, const ThermoOpts& thermo, int order) {
  const std::vector<double> betas = resolve_betas(common.n, thermo);
  const std::vector<ResultRow> rows =
      compute_rows(common.n, common.gamma, betas, {}, order,
                   /*trap_errors=*/false);
  emit_rows(common, rows, {}, betas);
  return 0;
}

int cmd_ha_compare(const CommonOpts& common) {
  const std::vector<std::string> columns = {"dE0_pct", "dE1_pct", "F0_pct",
                                            "F1_pct"};
  const std::vector<ResultRow> rows =
      compute_rows(common.n, common.gamma, {}, columns, 0,
                   /*trap_errors=*/false);
  emit_rows(common, rows, columns, {});
  return 0;
}

int cmd_thermal(const CommonOpts& common, const ThermoOpts& thermo) {
  const std::vector<double> betas = resolve_betas(common.n, thermo);
  if (betas.empty()) {
    throw UsageError("thermal needs --beta or --t-fraction/--t-ref-gamma");
  }
  const std::vector<ResultRow> rows =
      compute_rows(common.n, common.gamma, betas, {}, 0,
                   /*trap_errors=*/false);
  emit_rows(common, rows, {}, betas);
  return 0;
}

std::string strip_ws(std::string s) {
  const char* ws = " \t\r";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

// CLI11 applies config files only to the root app, so the per-subcommand
// --config is expanded here instead: every key in the flat key=value file
// that the command line does not already set is appended as the equivalent
// long flag, which realizes defaults < config < flags exactly. Array values
// [a, b, c] inject multi-valued options. A relative path that does not
// resolve from the working directory is retried against BELLSIM_CONFIG_DIR
// (the single environment knob).
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(std::string("--config=").size());
    }
  }
  if (path.empty()) return args;

  namespace fs = std::filesystem;
  if (!fs::path(path).is_absolute() && !fs::exists(path)) {
    const char* dir = std::getenv("BELLSIM_CONFIG_DIR");
    if (dir && *dir && fs::exists(fs::path(dir) / path)) {
      path = (fs::path(dir) / path).string();
    }
  }
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open config file " + path);

  // Long options already on the command line shadow their file keys.
  std::set<std::string> given;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i].rfind("--", 0) != 0) continue;
    given.insert(args[i].substr(2, args[i].find('=') - 2));
  }

  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    line = strip_ws(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const std::size_t eq = line.find('=');
    const std::string key =
        eq == std::string::npos ? "" : strip_ws(line.substr(0, eq));
    if (key.empty()) {
      throw UsageError("config " + path + " line " + std::to_string(line_no) +
                       ": expected key=value");
    }
    if (key == "config" || given.count(key) > 0) continue;
    const std::string value = strip_ws(line.substr(eq + 1));
    std::vector<std::string> items;
    if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
      const std::string body = value.substr(1, value.size() - 2);
      std::size_t start = 0;
      while (start <= body.size()) {
        const std::size_t comma = body.find(',', start);
        items.push_back(strip_ws(body.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    } else {
      items.push_back(value);
    }
    args.push_back("--" + key);
    for (std::string& item : items) {
      if (item.size() >= 2 && (item.front() == '"' || item.front() == '\'') &&
          item.back() == item.front()) {
        item = item.substr(1, item.size() - 2);
      }
      args.push_back(item);
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"many-body Bell correlations of a fully-connected spin chain"};
  app.set_version_flag("--version", std::string("bellsim ") + kVersion);
  app.require_subcommand(1);

  CommonOpts spectrum_opts;
  int spectrum_levels = 8;
  auto* spectrum = app.add_subcommand(
      "spectrum", "lowest energy levels E_i and gaps delta_i");
  add_common(spectrum, spectrum_opts);
  spectrum->add_option("--levels", spectrum_levels, "number of levels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CommonOpts ground_opts;
  auto* ground = app.add_subcommand(
      "groundstate", "ground-state profile psi_n with V_eff(z_n)");
  add_common(ground, ground_opts);

  CommonOpts bell_opts;
  ThermoOpts bell_thermo;
  int bell_order = 0;
  auto* bell = app.add_subcommand(
      "bell", "Bell correlator Q_mu (exact, peak, analytic, thermal)");
  add_common(bell, bell_opts);
  add_thermo(bell, bell_thermo);
  bell->add_option("--m", bell_order,
                   "correlation order override (default: select_mu)")
      ->check(CLI::PositiveNumber);

  CommonOpts ha_opts;
  auto* ha = app.add_subcommand(
      "ha-compare", "harmonic-approximation quality: dE0/dE1/F0/F1");
  add_common(ha, ha_opts);

  CommonOpts thermal_opts;
  ThermoOpts thermal_thermo;
  auto* thermal =
      app.add_subcommand("thermal", "thermal Bell correlator Q_mu");
  add_common(thermal, thermal_opts);
  add_thermo(thermal, thermal_thermo);

  SweepSpec sweep_spec;
  ThermoOpts sweep_thermo;
  std::vector<double> sweep_gammas;
  double grid_start = 0.0, grid_stop = 0.0, grid_step = 0.0;
  std::string sweep_format = "csv";
  auto* sweep = app.add_subcommand(
      "sweep", "parameter sweep over (N, gamma, beta) to CSV/JSON");
  sweep->add_option("--n", sweep_spec.n_list, "qubit counts")->required();
  sweep->add_option("--gamma", sweep_gammas, "explicit gamma values");
  auto* gs = sweep->add_option("--gamma-start", grid_start, "grid start");
  auto* ge = sweep->add_option("--gamma-stop", grid_stop, "grid stop");
  auto* gd = sweep->add_option("--gamma-step", grid_step, "grid step (> 0)");
  gs->needs(ge)->needs(gd);
  ge->needs(gs);
  gd->needs(gs);
  add_thermo(sweep, sweep_thermo);
  sweep->add_option("--columns", sweep_spec.columns,
                    "column subset (default: all)");
  sweep->add_option("--out", sweep_spec.output_path,
                    "output file (atomic write); stdout if omitted");
  sweep->add_option("--format", sweep_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sweep->add_option("--workers", sweep_spec.workers,
                    "worker threads (default: hardware)");
  std::string sweep_config;
  sweep->add_option("--config", sweep_config,
                    "flat key=value config file (defaults < config < flags)");

  auto* onset = app.add_subcommand(
      "onset", "print the Bell-onset gamma (root of the extensive exponent)");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::vector<const char*> argp;
  argp.reserve(args.size());
  for (const auto& a : args) argp.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argp.size()), argp.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(spectrum_opts, spectrum_levels);
    if (ground->parsed()) return cmd_groundstate(ground_opts);
    if (bell->parsed()) return cmd_bell(bell_opts, bell_thermo, bell_order);
    if (ha->parsed()) return cmd_ha_compare(ha_opts);
    if (thermal->parsed()) return cmd_thermal(thermal_opts, thermal_thermo);
    if (sweep->parsed()) {
      sweep_spec.gammas = sweep_gammas;
      if (gs->count()) {
        const std::vector<double> grid =
            expand_gamma_grid(grid_start, grid_stop, grid_step);
        sweep_spec.gammas.insert(sweep_spec.gammas.end(), grid.begin(),
                                 grid.end());
      }
      sweep_spec.betas = sweep_thermo.betas;
      sweep_spec.rules = zip_rules(sweep_thermo);
      sweep_spec.format = parse_format(sweep_format);
      run_sweep(sweep_spec, std::cout);
      return 0;
    }
    if (onset->parsed()) {
      std::cout << format_double(find_bell_onset()) << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
