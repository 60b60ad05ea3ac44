// Subcommand dispatch: each command writes `<command>.csv` and
// `manifest.json` into the output directory.
//
// CSV layout: one `#` metadata line, one header line, then rows with 12
// significant digits. Shared sweep schema (sweep-j, sweep-delta, heatmap):
//   J,delta,N,n_c,tau_c,dE_max,ergotropy,E_G,E_max,R_eb,R_epb,k_g,M_z,xi_z,O_1..O_N
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include <fmt/format.h>

#include "sshqb/config.hpp"

#ifndef SSHQB_VERSION
#define SSHQB_VERSION "0.1.0"
#endif

namespace sshqb {

inline constexpr double kConservationTol = 1e-9;
inline constexpr double kModeAgreementTol = 1e-9;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<double> row) {
    if (row.size() != header_.size()) throw Error("csv row width differs from header");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  void write(const std::filesystem::path& path, const std::string& meta) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "# " << meta << '\n';
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
    out << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt::format("{:.12g}", row[i]);
      out << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

inline std::vector<std::string> record_header(int N) {
  std::vector<std::string> h{"J",     "delta", "N",     "n_c", "tau_c", "dE_max", "ergotropy",
                             "E_G",   "E_max", "R_eb",  "R_epb", "k_g", "M_z",    "xi_z"};
  for (int i = 1; i <= N; ++i) h.push_back("O_" + std::to_string(i));
  return h;
}

inline std::vector<double> record_row(const SweepRecord& r) {
  std::vector<double> row{r.J,     r.delta, static_cast<double>(r.N), static_cast<double>(r.n_c), r.tau_c,
                          r.dE_max, r.ergotropy, r.E_G, r.E_max, r.R_eb, r.R_epb, static_cast<double>(r.k_g),
                          r.M_z,   r.xi_z};
  row.insert(row.end(), r.occupations.begin(), r.occupations.end());
  return row;
}

struct RunReport {
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;
};

namespace detail {

class StageTimer {
 public:
  StageTimer(RunReport& report, std::string name)
      : report_(report), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
    report_.timings[name_] = d.count();
  }

 private:
  RunReport& report_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

inline double max_table_difference(const CsvTable& a, const CsvTable& b) {
  if (a.rows().size() != b.rows().size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows().size(); ++r)
    for (std::size_t c = 0; c < a.rows()[r].size(); ++c)
      worst = std::max(worst, std::abs(a.rows()[r][c] - b.rows()[r][c]));
  return worst;
}

inline SweepOptions sweep_options(const RunConfig& cfg, ExecutionMode mode) {
  SweepOptions opt;
  opt.mode = mode;
  opt.charging = cfg.charging;
  opt.sz = cfg.sz;
  return opt;
}

inline void note_degenerate(const std::vector<SweepRecord>& records, RunReport& report) {
  for (const auto& r : records)
    if (r.degenerate_ground)
      report.warnings.push_back(fmt::format("degenerate ground state at J={:.12g} delta={:.12g}", r.J, r.delta));
}

inline void record_conservation(const std::vector<SweepRecord>& records, RunReport& report) {
  double norm = 0.0, nexc = 0.0, energy = 0.0;
  for (const auto& r : records) {
    norm = std::max(norm, r.norm_error);
    nexc = std::max(nexc, r.n_exc_drift);
    energy = std::max(energy, r.energy_drift);
  }
  report.diagnostics["max_norm_error"] = norm;
  report.diagnostics["max_n_exc_drift"] = nexc;
  report.diagnostics["max_energy_drift"] = energy;
}

inline CsvTable records_table(const std::vector<SweepRecord>& records, int N) {
  CsvTable t(record_header(N));
  for (const auto& r : records) t.add_row(record_row(r));
  return t;
}

// Computes the command's table in one execution mode.
inline CsvTable compute_table(const RunConfig& cfg, ExecutionMode mode, RunReport& report) {
  const ModelParams& p = cfg.params;
  const SweepOptions opt = sweep_options(cfg, mode);
  const auto j_grid = cfg.grid_j.points();
  const auto d_grid = cfg.grid_delta.points();

  switch (cfg.command) {
    case Command::dynamics: {
      const ChargingSystem sys(p, mode);
      if (sys.ground().degenerate) report.warnings.push_back("degenerate ground state");
      const double t_max = cfg.trajectory_t_max.value_or(sys.default_window(cfg.charging));
      const Trajectory tr = trajectory(sys, t_max, cfg.charging.dt);
      CsvTable t({"t", "E_B", "dE", "ergotropy", "norm_err", "n_exc"});
      double norm = 0.0, nexc = 0.0, energy = 0.0;
      for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const auto& s = tr.samples[k];
        t.add_row({tr.times[k], s.E_B, s.dE, s.ergotropy, s.norm_error, s.n_exc});
        norm = std::max(norm, s.norm_error);
        nexc = std::max(nexc, std::abs(s.n_exc - tr.samples.front().n_exc));
        energy = std::max(energy, std::abs(s.total_energy - tr.samples.front().total_energy));
      }
      report.diagnostics["max_norm_error"] = norm;
      report.diagnostics["max_n_exc_drift"] = nexc;
      report.diagnostics["max_energy_drift"] = energy;
      if (norm > kConservationTol || nexc > kConservationTol || energy > kConservationTol)
        throw InvariantViolation("conservation breach along trajectory");
      return t;
    }
    case Command::sweep_j: {
      auto recs = sweep_hopping(p, j_grid, opt);
      note_degenerate(recs, report);
      record_conservation(recs, report);
      return records_table(recs, p.N);
    }
    case Command::sweep_delta: {
      auto recs = sweep_delta(p, d_grid, opt);
      note_degenerate(recs, report);
      record_conservation(recs, report);
      return records_table(recs, p.N);
    }
    case Command::heatmap: {
      std::vector<SweepRecord> flat;
      for (auto& row : heatmap_j_delta(p, j_grid, d_grid, opt))
        for (auto& r : row) flat.push_back(std::move(r));
      note_degenerate(flat, report);
      record_conservation(flat, report);
      return records_table(flat, p.N);
    }
    case Command::spectrum: {
      const auto table = spectrum_vs_J(p, j_grid, cfg.levels);
      std::vector<std::string> header{"J"};
      for (std::size_t i = 0; i < table.front().levels.size(); ++i) header.push_back("lambda_" + std::to_string(i));
      CsvTable t(header);
      for (const auto& row : table) {
        std::vector<double> values{row.J};
        values.insert(values.end(), row.levels.begin(), row.levels.end());
        t.add_row(std::move(values));
      }
      return t;
    }
    case Command::order_params: {
      const auto rows = order_param_sweep(p, j_grid, opt);
      CsvTable t({"J", "k_g", "E_G", "M_z", "xi_z"});
      for (const auto& r : rows) {
        t.add_row({r.J, static_cast<double>(r.k_g), r.E_G, r.order.M_z, r.order.xi_z});
        if (r.degenerate) report.warnings.push_back(fmt::format("degenerate ground state at J={:.12g}", r.J));
      }
      try {
        nlohmann::ordered_json crossings = nlohmann::ordered_json::array();
        for (const auto& c : detect_ground_crossings(p, j_grid))
          crossings.push_back({{"J", c.J}, {"from_k", c.from_sector}, {"to_k", c.to_sector}});
        report.diagnostics["ground_crossings"] = crossings;
      } catch (const RefineNeeded& e) {
        report.warnings.push_back(e.what());
      }
      return t;
    }
    case Command::occupations: {
      const auto recs = sweep_delta(p, d_grid, opt);
      note_degenerate(recs, report);
      record_conservation(recs, report);
      std::vector<std::string> header{"delta", "J", "tau_c"};
      for (int i = 1; i <= p.N; ++i) header.push_back("O_" + std::to_string(i));
      CsvTable t(header);
      for (const auto& r : recs) {
        std::vector<double> values{r.delta, p.J, r.tau_c};
        values.insert(values.end(), r.occupations.begin(), r.occupations.end());
        t.add_row(std::move(values));
      }
      return t;
    }
    case Command::capacity: {
      const auto recs = sweep_delta(p, d_grid, opt);
      note_degenerate(recs, report);
      record_conservation(recs, report);
      CsvTable t({"delta", "J", "dE_max", "ergotropy", "E_G", "E_max", "R_eb", "R_epb"});
      for (const auto& r : recs) t.add_row({r.delta, p.J, r.dE_max, r.ergotropy, r.E_G, r.E_max, r.R_eb, r.R_epb});
      return t;
    }
    case Command::tau_scaling: {
      const TauScaling grow = tau_scaling(p, cfg.n_list, PhotonScaling::grow_with_N, -1, opt);
      const TauScaling fixed = tau_scaling(p, cfg.n_list, PhotonScaling::fixed, cfg.fixed_n_c, opt);
      CsvTable t({"N", "n_c_grow", "tau_c_grow", "n_c_fixed", "tau_c_fixed"});
      for (std::size_t i = 0; i < grow.points.size(); ++i)
        t.add_row({static_cast<double>(grow.points[i].N), static_cast<double>(grow.points[i].n_c),
                   grow.points[i].tau_c, static_cast<double>(fixed.points[i].n_c), fixed.points[i].tau_c});
      report.diagnostics["loglog_slope_grow"] = grow.slope;
      report.diagnostics["loglog_slope_fixed"] = fixed.slope;
      return t;
    }
  }
  throw Error("unknown command");
}

inline bool uses_composite_space(Command c) { return c != Command::spectrum && c != Command::order_params; }

}  // namespace detail

// Runs one command; returns the process exit status. The manifest is written
// exactly once, including on failure.
inline int run(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  RunReport report;
  nlohmann::ordered_json manifest;
  manifest["artifact"] = "sshqb";
  manifest["version"] = SSHQB_VERSION;
  manifest["config"] = to_json(cfg);
  manifest["params_hash"] = params_hash(cfg);
  const std::string csv_name = to_string(cfg.command) + ".csv";
  int status = 0;
  std::string error;

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "sshqb: cannot create output directory %s: %s\n", cfg.out_dir.c_str(), ec.message().c_str());
    return 2;
  }

  try {
    const bool composite = detail::uses_composite_space(cfg.command);
    const ExecutionMode primary = cfg.mode == ModeSelect::full ? ExecutionMode::full : ExecutionMode::sector;
    std::optional<CsvTable> table;
    {
      detail::StageTimer timer(report, std::string("compute_") + to_string(primary));
      table = detail::compute_table(cfg, primary, report);
    }
    if (cfg.mode == ModeSelect::both && composite) {
      RunReport shadow;
      std::optional<CsvTable> other;
      {
        detail::StageTimer timer(report, "compute_full");
        other = detail::compute_table(cfg, ExecutionMode::full, shadow);
      }
      const double diff = detail::max_table_difference(*table, *other);
      report.diagnostics["mode_comparison"] = {{"max_abs_difference", diff}, {"tolerance", kModeAgreementTol}};
      if (!(diff <= kModeAgreementTol))
        throw InvariantViolation(fmt::format("sector and full modes disagree by {:.3e}", diff));
    }
    {
      detail::StageTimer timer(report, "write_csv");
      table->write(fs::path(cfg.out_dir) / csv_name,
                   fmt::format("sshqb {} {} params_hash={}", SSHQB_VERSION, to_string(cfg.command), params_hash(cfg)));
    }
    manifest["outputs"] = {csv_name};
  } catch (const Error& e) {
    status = 1;
    error = e.what();
  }

  manifest["status"] = status == 0 ? "ok" : "error";
  if (!error.empty()) manifest["error"] = error;
  manifest["timings_s"] = report.timings;
  manifest["diagnostics"] = report.diagnostics;
  manifest["warnings"] = report.warnings;
  std::ofstream out(fs::path(cfg.out_dir) / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (status != 0) std::fprintf(stderr, "sshqb: %s\n", error.c_str());
  return status;
}

}  // namespace sshqb
