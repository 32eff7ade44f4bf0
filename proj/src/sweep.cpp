#include "bellsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "bellsim/bell.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/harmonic.hpp"
#include "bellsim/spectral.hpp"
#include "bellsim/thermal.hpp"
#include "bellsim/version.hpp"

namespace bellsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> kCanonicalColumns = {
    "N",         "gamma",         "beta",         "mu",      "q_mu_exact",
    "q_mu_peak", "q_mu_analytic", "q_mu_thermal", "delta_1", "delta_2",
    "delta_3",   "delta_4",       "delta_5",      "delta_6", "delta_7",
    "dE0_pct",   "dE1_pct",       "F0_pct",       "F1_pct",  "depth_k",
    "z0",        "omega_well"};

bool wants(const std::vector<std::string>& cols, const std::string& name) {
  if (cols.empty()) return true;
  return std::find(cols.begin(), cols.end(), name) != cols.end();
}

bool wants_prefix(const std::vector<std::string>& cols, const char* prefix) {
  if (cols.empty()) return true;
  for (const auto& c : cols) {
    if (c.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

}  // namespace

const std::vector<std::string>& canonical_columns() {
  return kCanonicalColumns;
}

std::vector<double> expand_gamma_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw UsageError("gamma grid step must be > 0");
  if (start > stop) throw UsageError("gamma grid start must be <= stop");
  std::vector<double> grid;
  // Values generated as start + i*step (no running accumulation); the
  // half-step slack keeps the intended endpoint when (stop-start)/step is
  // integral up to representation error.
  for (int i = 0;; ++i) {
    const double g = start + i * step;
    if (g > stop + 0.5 * step) break;
    grid.push_back(std::min(g, stop));
  }
  return grid;
}

void validate(const SweepSpec& spec) {
  if (spec.n_list.empty()) throw UsageError("sweep needs at least one N");
  if (spec.gammas.empty()) throw UsageError("sweep needs a gamma grid");
  for (int n : spec.n_list) {
    if (n < 1) throw UsageError("N must be >= 1");
  }
  for (double b : spec.betas) {
    if (std::isnan(b) || b < 0.0) throw UsageError("beta must be >= 0");
  }
  for (const auto& r : spec.rules) {
    if (!(r.fraction > 0.0 && r.fraction <= 1.0)) {
      throw UsageError("gap-fraction must be in (0, 1]");
    }
  }
  for (const auto& c : spec.columns) {
    if (std::find(kCanonicalColumns.begin(), kCanonicalColumns.end(), c) ==
        kCanonicalColumns.end()) {
      throw UsageError("unknown column: " + c);
    }
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string spec_hash(const SweepSpec& spec) {
  std::ostringstream canon;
  canon << "n:";
  for (int n : spec.n_list) canon << n << ',';
  canon << ";g:";
  for (double g : spec.gammas) canon << format_double(g) << ',';
  canon << ";b:";
  for (double b : spec.betas) canon << format_double(b) << ',';
  canon << ";r:";
  for (const auto& r : spec.rules) {
    canon << format_double(r.fraction) << '@'
          << format_double(r.reference_gamma) << ',';
  }
  canon << ";c:";
  for (const auto& c : spec.columns) canon << c << ',';
  canon << ";f:" << (spec.format == OutputFormat::kCsv ? "csv" : "json");

  // FNV-1a 64-bit.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char byte : canon.str()) {
    h ^= byte;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::vector<ResultRow> compute_rows(int n_qubits, double gamma,
                                    const std::vector<double>& point_betas,
                                    const std::vector<std::string>& columns,
                                    int mu_override, bool trap_errors) {
  const bool need_well = wants(columns, "z0") || wants(columns, "omega_well") ||
                         wants(columns, "q_mu_analytic");
  const bool need_mu = wants(columns, "mu") || wants(columns, "q_mu_exact") ||
                       wants(columns, "q_mu_peak") ||
                       wants(columns, "q_mu_thermal") ||
                       wants(columns, "depth_k");
  const bool need_gaps = wants_prefix(columns, "delta_");
  const bool need_ha_energy =
      wants(columns, "dE0_pct") || wants(columns, "dE1_pct");
  const bool need_fidelity =
      wants(columns, "F0_pct") || wants(columns, "F1_pct");
  const bool need_states = need_mu || need_fidelity;
  const bool need_diag = need_states || need_gaps || need_ha_energy;

  std::vector<ResultRow> rows;
  const std::size_t slots = point_betas.empty() ? 1 : point_betas.size();
  rows.reserve(slots);

  try {
    ModelParams params = params_from_gamma(n_qubits, gamma);

    ResultRow base;
    base.n_qubits = n_qubits;
    base.gamma = gamma;

    if (need_well) {
      const WellParameters w = well_parameters(gamma);  // throws past -1
      if (wants(columns, "z0")) base.z0 = w.z0;
      if (wants(columns, "omega_well")) base.omega_well = w.omega;
      if (wants(columns, "q_mu_analytic")) {
        base.q_mu_analytic = q_mu_analytic(n_qubits, gamma);
      }
    }

    SpectralDecomposition dec;
    if (need_diag) {
      dec = diagonalize(build_hamiltonian(params));
      if (need_states) dec = parity_project(std::move(dec));
    }

    if (need_gaps) {
      const int k = std::min(8, n_qubits + 1);
      const std::vector<double> d = gaps(dec, k);
      for (int i = 1; i < k && i <= 7; ++i) base.delta[i - 1] = d[i];
    }

    if (need_ha_energy) {
      const HaEnergyLevels ha = ha_energies(params, 2);
      if (wants(columns, "dE0_pct")) {
        base.de0_pct = energy_error_pct(dec.eigenvalues[0], ha.raw[0]);
      }
      if (wants(columns, "dE1_pct")) {
        base.de1_pct = energy_error_pct(dec.eigenvalues[1], ha.raw[1]);
      }
    }

    if (need_fidelity) {
      const auto col0 = dec.eigenvectors.col(0);
      const auto col1 = dec.eigenvectors.col(1);
      const std::vector<double> v0(col0.data(), col0.data() + col0.size());
      const std::vector<double> v1(col1.data(), col1.data() + col1.size());
      if (wants(columns, "F0_pct")) {
        base.f0_pct =
            fidelity_pct(v0, ha_ground_state(n_qubits, gamma).amplitudes);
      }
      if (wants(columns, "F1_pct")) {
        base.f1_pct =
            fidelity_pct(v1, ha_excited_state(n_qubits, gamma).amplitudes);
      }
    }

    int mu = 0;
    double q_exact = 0.0;
    bool have_q_exact = false;
    if (need_mu) {
      if (mu_override > n_qubits) {
        throw DomainError("correlation order exceeds N");
      }
      mu = (mu_override > 0) ? mu_override : select_mu(n_qubits, gamma);
      if (wants(columns, "mu")) base.mu = mu;

      const auto psi0 = dec.eigenvectors.col(0);
      if (wants(columns, "q_mu_exact") || wants(columns, "depth_k")) {
        std::vector<double> band(n_qubits - mu + 1);
        for (int i = 0; i + mu <= n_qubits; ++i) {
          band[i] = psi0[i] * psi0[i + mu];
        }
        q_exact = q_m_from_band(band, mu, n_qubits).q;
        have_q_exact = true;
        if (wants(columns, "q_mu_exact")) base.q_mu_exact = q_exact;
      }
      if (wants(columns, "q_mu_peak") && (n_qubits - mu) % 2 == 0) {
        const double el = psi0[(n_qubits - mu) / 2] * psi0[(n_qubits + mu) / 2];
        base.q_mu_peak = q_mu_peak(el, mu, n_qubits);
      }
    }

    // One row per beta slot (a single T=0 row when no temperatures given).
    for (std::size_t s = 0; s < slots; ++s) {
      ResultRow row = base;
      double q_for_depth = q_exact;
      bool have_depth_q = have_q_exact;
      if (!point_betas.empty()) {
        const double beta = point_betas[s];
        row.beta = beta;
        if (wants(columns, "q_mu_thermal") && need_mu) {
          const ThermalDensity rho = thermal_density(dec, beta);
          const double q_th = q_m_from_band(rho.band(mu), mu, n_qubits).q;
          row.q_mu_thermal = q_th;
          q_for_depth = q_th;
          have_depth_q = true;
        }
      }
      if (wants(columns, "depth_k") && have_depth_q && q_for_depth != -kInf) {
        row.depth_k = depth_bound(q_for_depth, mu);
      }
      rows.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    if (!trap_errors) throw;
    rows.clear();
    for (std::size_t s = 0; s < slots; ++s) {
      ResultRow row;
      row.n_qubits = n_qubits;
      row.gamma = gamma;
      if (!point_betas.empty()) row.beta = point_betas[s];
      row.error = e.what();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

// Typed view of one row field, shared by the CSV and JSON emitters.
struct FieldRef {
  enum Kind { kInt, kReal, kText, kEmpty } kind = kEmpty;
  long long i = 0;
  double d = 0.0;
  const std::string* s = nullptr;
};

FieldRef field_ref(const ResultRow& r, const std::string& col) {
  auto opt_real = [](const std::optional<double>& v) {
    FieldRef f;
    if (v) {
      f.kind = FieldRef::kReal;
      f.d = *v;
    }
    return f;
  };
  auto opt_int = [](const std::optional<int>& v) {
    FieldRef f;
    if (v) {
      f.kind = FieldRef::kInt;
      f.i = *v;
    }
    return f;
  };
  if (col == "N") return {FieldRef::kInt, r.n_qubits, 0.0, nullptr};
  if (col == "gamma") return {FieldRef::kReal, 0, r.gamma, nullptr};
  if (col == "beta") return opt_real(r.beta);
  if (col == "mu") return opt_int(r.mu);
  if (col == "q_mu_exact") return opt_real(r.q_mu_exact);
  if (col == "q_mu_peak") return opt_real(r.q_mu_peak);
  if (col == "q_mu_analytic") return opt_real(r.q_mu_analytic);
  if (col == "q_mu_thermal") return opt_real(r.q_mu_thermal);
  if (col.rfind("delta_", 0) == 0) return opt_real(r.delta[col[6] - '1']);
  if (col == "dE0_pct") return opt_real(r.de0_pct);
  if (col == "dE1_pct") return opt_real(r.de1_pct);
  if (col == "F0_pct") return opt_real(r.f0_pct);
  if (col == "F1_pct") return opt_real(r.f1_pct);
  if (col == "depth_k") return opt_int(r.depth_k);
  if (col == "z0") return opt_real(r.z0);
  if (col == "omega_well") return opt_real(r.omega_well);
  if (col == "error") {
    FieldRef f;
    if (!r.error.empty()) {
      f.kind = FieldRef::kText;
      f.s = &r.error;
    }
    return f;
  }
  return {};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_json_string(std::ostream& out, const std::string& s) {
  out << '"';
  for (char c : s) {
    switch (c) {
      case '"':
        out << "\\\"";
        break;
      case '\\':
        out << "\\\\";
        break;
      case '\n':
        out << "\\n";
        break;
      case '\t':
        out << "\\t";
        break;
      case '\r':
        out << "\\r";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out << buf;
        } else {
          out << c;
        }
    }
  }
  out << '"';
}

// Emitted column order: N, gamma, beta always lead (a data file without its
// grid coordinates is unusable), then the selected quantity columns in
// canonical order, then the error column.
std::vector<std::string> emitted_columns(
    const std::vector<std::string>& selected) {
  std::vector<std::string> out = {"N", "gamma", "beta"};
  for (const auto& c : kCanonicalColumns) {
    if (c == "N" || c == "gamma" || c == "beta") continue;
    if (selected.empty() ||
        std::find(selected.begin(), selected.end(), c) != selected.end()) {
      out.push_back(c);
    }
  }
  out.push_back("error");
  return out;
}

}  // namespace

void write_rows(std::ostream& out, const std::vector<ResultRow>& rows,
                const std::vector<std::string>& columns, OutputFormat format,
                const std::string& hash) {
  const std::vector<std::string> cols = emitted_columns(columns);
  if (format == OutputFormat::kCsv) {
    out << "# bellsim " << kVersion << "\n";
    out << "# spec-hash: " << hash << "\n";
    out << "# u = gamma/N (pair interaction at field = 1)\n";
    out << "# columns: ";
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? "," : "") << cols[i];
    }
    out << "\n";
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? "," : "") << cols[i];
    }
    out << "\n";
    for (const ResultRow& r : rows) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out << ',';
        const FieldRef f = field_ref(r, cols[i]);
        switch (f.kind) {
          case FieldRef::kInt:
            out << f.i;
            break;
          case FieldRef::kReal:
            out << format_double(f.d);
            break;
          case FieldRef::kText:
            out << csv_escape(*f.s);
            break;
          case FieldRef::kEmpty:
            break;
        }
      }
      out << "\n";
    }
  } else {
    out << "{\"meta\":{\"version\":";
    write_json_string(out, kVersion);
    out << ",\"spec_hash\":";
    write_json_string(out, hash);
    out << ",\"u_rule\":\"gamma/N (pair interaction at field = 1)\""
        << ",\"columns\":[";
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ',';
      write_json_string(out, cols[i]);
    }
    out << "]}}\n";
    for (const ResultRow& r : rows) {
      out << '{';
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out << ',';
        write_json_string(out, cols[i]);
        out << ':';
        const FieldRef f = field_ref(r, cols[i]);
        switch (f.kind) {
          case FieldRef::kInt:
            out << f.i;
            break;
          case FieldRef::kReal:
            // JSON has no inf/nan literals; non-finite values emit null.
            if (std::isfinite(f.d)) {
              out << format_double(f.d);
            } else {
              out << "null";
            }
            break;
          case FieldRef::kText:
            write_json_string(out, *f.s);
            break;
          case FieldRef::kEmpty:
            out << "null";
            break;
        }
      }
      out << "}\n";
    }
  }
}

void write_numeric_table(std::ostream& out, const NumericTable& table,
                         OutputFormat format, const std::string& hash) {
  if (format == OutputFormat::kCsv) {
    out << "# bellsim " << kVersion << "\n";
    out << "# spec-hash: " << hash << "\n";
    out << "# u = gamma/N (pair interaction at field = 1)\n";
    out << "# columns: ";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      out << (i ? "," : "") << table.columns[i];
    }
    out << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      out << (i ? "," : "") << table.columns[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << (i ? "," : "") << format_double(row[i]);
      }
      out << "\n";
    }
  } else {
    out << "{\"meta\":{\"version\":";
    write_json_string(out, kVersion);
    out << ",\"spec_hash\":";
    write_json_string(out, hash);
    out << ",\"columns\":[";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out << ',';
      write_json_string(out, table.columns[i]);
    }
    out << "]}}\n";
    for (const auto& row : table.rows) {
      out << '{';
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        write_json_string(out, table.columns[i]);
        out << ':';
        if (std::isfinite(row[i])) {
          out << format_double(row[i]);
        } else {
          out << "null";
        }
      }
      out << "}\n";
    }
  }
}

void emit_to(const std::string& path, std::ostream& fallback,
             const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) {
    writer(fallback);
    if (!fallback) throw IoError("write to output stream failed");
    return;
  }
  // Atomic write: emit to a sibling temp file, rename over the target.
  // Failures remove the partial file so a crashed run never leaves a
  // truncated result that looks complete.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp + " for writing");
    writer(f);
    f.flush();
    if (!f) {
      f.close();
      std::remove(tmp.c_str());
      throw IoError("write failed: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("rename to " + path + " failed");
  }
}

namespace {

struct PointTask {
  int n_qubits;
  double gamma;
};

}  // namespace

void run_sweep(const SweepSpec& spec, std::ostream& out) {
  validate(spec);

  // Row order is lexicographic in (N, gamma, beta): sort the grids up
  // front, then keep task order = output order.
  std::vector<int> n_list = spec.n_list;
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  std::vector<double> gammas = spec.gammas;
  std::sort(gammas.begin(), gammas.end());

  // Gap-fraction rules resolve to absolute betas once per N, sequentially,
  // before the parallel phase (the reference diagonalization is the only
  // shared computation; everything after is shared-nothing).
  std::map<int, std::vector<double>> betas_for_n;
  for (int n : n_list) {
    std::vector<double> betas = spec.betas;
    for (const auto& rule : spec.rules) {
      const ModelParams ref = params_from_gamma(n, rule.reference_gamma);
      const SpectralDecomposition dec = diagonalize(build_hamiltonian(ref), 2);
      const double delta_1 = dec.eigenvalues[1] - dec.eigenvalues[0];
      const double kt = rule.fraction * delta_1;
      betas.push_back(kt > 0.0 ? 1.0 / kt : kInf);
    }
    std::sort(betas.begin(), betas.end());
    betas_for_n[n] = std::move(betas);
  }

  std::vector<PointTask> tasks;
  tasks.reserve(n_list.size() * gammas.size());
  for (int n : n_list) {
    for (double g : gammas) tasks.push_back({n, g});
  }

  std::vector<std::vector<ResultRow>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers =
      spec.workers > 0 ? spec.workers : static_cast<int>(hw ? hw : 1);

  auto work = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const PointTask& task = tasks[t];
      results[t] = compute_rows(task.n_qubits, task.gamma,
                                betas_for_n.at(task.n_qubits), spec.columns,
                                /*mu_override=*/0);
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::vector<ResultRow> rows;
  for (auto& r : results) {
    for (auto& row : r) rows.push_back(std::move(row));
  }

  const std::string hash = spec_hash(spec);
  emit_to(spec.output_path, out, [&](std::ostream& sink) {
    write_rows(sink, rows, spec.columns, spec.format, hash);
  });
}

}  // namespace bellsim
