#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bellsim {

enum class OutputFormat { kCsv, kJson };

// Thermal grid rule: beta = 1 / (fraction * delta_1(reference_gamma, N)),
// re-evaluated per N (the reference gap is N-dependent).
struct GapFractionRule {
  double fraction = 0.1;
  double reference_gamma = 0.0;
};

struct SweepSpec {
  std::vector<int> n_list;
  std::vector<double> gammas;  // explicit values (grid already expanded)
  std::vector<double> betas;   // absolute inverse temperatures
  std::vector<GapFractionRule> rules;
  std::vector<std::string> columns;  // empty = all known columns
  std::string output_path;           // empty = stdout
  OutputFormat format = OutputFormat::kCsv;
  int workers = 0;  // <= 0: hardware concurrency
};

// Expands {start, stop, step} into an inclusive gamma grid (values
// start + i*step; a half-step tolerance absorbs representation drift at the
// endpoint). step > 0 required; start <= stop.
std::vector<double> expand_gamma_grid(double start, double stop, double step);

// Canonical output column order. `error` is always emitted last and is not
// selectable. Missing quantities print as empty fields, never as zero.
const std::vector<std::string>& canonical_columns();

// Throws UsageError on empty grids, unknown column names, or bad rule
// fractions (must be in (0, 1]).
void validate(const SweepSpec& spec);

// FNV-1a 64-bit hash of the canonical spec serialization (hex string);
// stamped into the output metadata so a file identifies its recipe.
std::string spec_hash(const SweepSpec& spec);

// One output row. Unset optionals print as empty CSV fields / JSON nulls.
struct ResultRow {
  int n_qubits = 0;
  double gamma = 0.0;
  std::optional<double> beta;  // empty for T = 0 rows
  std::optional<int> mu;
  std::optional<double> q_mu_exact;
  std::optional<double> q_mu_peak;
  std::optional<double> q_mu_analytic;
  std::optional<double> q_mu_thermal;
  std::optional<double> delta[7];  // delta_1..delta_7
  std::optional<double> de0_pct;
  std::optional<double> de1_pct;
  std::optional<double> f0_pct;
  std::optional<double> f1_pct;
  std::optional<int> depth_k;
  std::optional<double> z0;
  std::optional<double> omega_well;
  std::string error;  // per-point failure, other fields left empty
};

// Computes the requested columns for one (N, gamma) point: a single T=0 row
// when point_betas is empty, else one row per beta. Shared by the
// single-shot CLI commands and the sweep. With trap_errors (the sweep
// setting) exceptions land in the rows' error column; without it they
// propagate, so single-point commands exit with the right code.
std::vector<ResultRow> compute_rows(int n_qubits, double gamma,
                                    const std::vector<double>& point_betas,
                                    const std::vector<std::string>& columns,
                                    int mu_override = 0,
                                    bool trap_errors = true);

// Runs the sweep: fixed worker pool over (N, gamma) tasks, shared-nothing,
// results merged in input order, so output is byte-identical for any worker
// count. Writes atomically (temp file + rename) when output_path is set,
// else streams to `out`. I/O failures remove the partial file and throw
// IoError; per-point computation errors land in the row's error column.
void run_sweep(const SweepSpec& spec, std::ostream& out);

// Shortest round-trip decimal representation (std::to_chars); "inf"/"-inf"
// and "nan" spell out non-finite values.
std::string format_double(double v);

// Serializes rows with the metadata header to the given format.
void write_rows(std::ostream& out, const std::vector<ResultRow>& rows,
                const std::vector<std::string>& columns, OutputFormat format,
                const std::string& hash);

// Plain numeric table (spectrum, groundstate): same metadata header and
// formats as the row emitter, free-form columns.
struct NumericTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_numeric_table(std::ostream& out, const NumericTable& table,
                         OutputFormat format, const std::string& hash);

// Routes writer output to `path` with the atomic temp-file + rename
// protocol (partial files are removed on failure; throws IoError), or to
// `fallback` when path is empty.
void emit_to(const std::string& path, std::ostream& fallback,
             const std::function<void(std::ostream&)>& writer);

}  // namespace bellsim
