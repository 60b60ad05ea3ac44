// Run configuration: flags and a flat `key = value` config file share one
// set of names; flags win over file values. Unknown keys are rejected.
#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sshqb/sweeps.hpp"

namespace sshqb {

enum class Command { dynamics, sweep_j, spectrum, order_params, sweep_delta, heatmap, occupations, capacity, tau_scaling };

inline const std::vector<std::pair<std::string, Command>>& command_names() {
  static const std::vector<std::pair<std::string, Command>> names = {
      {"dynamics", Command::dynamics},       {"sweep-j", Command::sweep_j},
      {"spectrum", Command::spectrum},       {"order-params", Command::order_params},
      {"sweep-delta", Command::sweep_delta}, {"heatmap", Command::heatmap},
      {"occupations", Command::occupations}, {"capacity", Command::capacity},
      {"tau-scaling", Command::tau_scaling},
  };
  return names;
}

inline std::string to_string(Command c) {
  for (const auto& [name, cmd] : command_names())
    if (cmd == c) return name;
  return "?";
}

enum class ModeSelect { sector, full, both };

struct RunConfig {
  Command command = Command::dynamics;
  ModelParams params = ModelParams::resonant(5);
  ModeSelect mode = ModeSelect::sector;
  std::string out_dir = ".";
  ChargingOptions charging;
  std::optional<double> trajectory_t_max;
  Grid grid_j{0.0, 3.0, 0.02};
  Grid grid_delta{-1.0, 1.0, 0.05};
  int levels = 0;  // 0 = all
  SzConvention sz = SzConvention::pauli;
  std::vector<int> n_list{2, 3, 4, 5, 6};
  int fixed_n_c = -1;  // tau-scaling fixed-photon fit; -1 = 2*max(N)+1
};

// Thrown when --help was requested; carries the usage text.
struct HelpRequested : Error {
  using Error::Error;
};

inline const Grid kHeatmapJGrid{0.0, 3.0, 0.05};

inline RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Exact-diagonalization charging simulator for SSH spin-chain quantum batteries", "sshqb"};
  std::string command, mode = "sector", grid_j, grid_delta, sz = "pauli", bonds = "full", n_list;
  double t_max = 0.0;
  int n_c = -1;
  ModelParams& p = cfg.params;
  p.N = 5;

  std::vector<std::string> command_choices;
  for (const auto& [name, _] : command_names()) command_choices.push_back(name);
  app.add_option("command", command, "Subcommand")->required()->check(CLI::IsMember(command_choices));
  app.add_option("--N", p.N, "Number of spins");
  app.add_option("--J", p.J, "Hopping strength");
  app.add_option("--delta", p.delta, "Dimerization parameter in [-1, 1]");
  app.add_option("--nc", n_c, "Initial cavity photon number (default 2N+1)");
  app.add_option("--g", p.g, "Spin-cavity coupling");
  app.add_option("--omega-a", p.omega_a, "Spin frequency");
  app.add_option("--omega-c", p.omega_c, "Cavity frequency");
  app.add_option("--dt", cfg.charging.dt, "Time step of scans and trajectories");
  app.add_option("--t-max", t_max, "Time window (default safety*pi/(g*sqrt(nc)))");
  app.add_option("--safety", cfg.charging.safety, "Charging window multiplier");
  app.add_option("--mode", mode, "Execution mode")->check(CLI::IsMember({"sector", "full", "both"}));
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--grid-j", grid_j, "J grid LO:HI:STEP");
  app.add_option("--grid-delta", grid_delta, "delta grid LO:HI:STEP");
  app.add_option("--levels", cfg.levels, "Spectrum levels to report (0 = all)");
  app.add_option("--sz-convention", sz, "sigma_z eigenvalues: pauli (+-1) or half (+-1/2)")
      ->check(CLI::IsMember({"pauli", "half"}));
  app.add_option("--bond-range", bonds, "J(1-delta) bond range: full or literal")->check(CLI::IsMember({"full", "literal"}));
  app.add_option("--n-list", n_list, "Comma-separated spin counts for tau-scaling");
  app.add_option("--fixed-nc", cfg.fixed_n_c, "Photon number for the fixed-n_c tau fit");
  app.set_config("--config", "", "Flat key = value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::vector<const char*> argv{"sshqb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw InvalidArgument(e.what());
  }

  for (const auto& [name, cmd] : command_names())
    if (name == command) cfg.command = cmd;
  cfg.mode = mode == "full" ? ModeSelect::full : mode == "both" ? ModeSelect::both : ModeSelect::sector;
  cfg.sz = sz == "half" ? SzConvention::spin_half : SzConvention::pauli;
  p.bond_range = bonds == "literal" ? BondRange::literal : BondRange::full_chain;
  p.n_c = app.count("--nc") ? n_c : 2 * p.N + 1;
  if (app.count("--t-max")) {
    if (!(t_max > 0.0)) throw InvalidArgument("t-max must be > 0");
    cfg.charging.t_max = t_max;
    cfg.trajectory_t_max = t_max;
  }
  if (!(cfg.charging.dt > 0.0)) throw InvalidArgument("dt must be > 0");
  if (!(cfg.charging.safety > 0.0)) throw InvalidArgument("safety must be > 0");
  if (!grid_j.empty()) cfg.grid_j = Grid::parse(grid_j);
  else if (cfg.command == Command::heatmap) cfg.grid_j = kHeatmapJGrid;
  if (!grid_delta.empty()) cfg.grid_delta = Grid::parse(grid_delta);
  if (cfg.grid_delta.lo < -1.0 || cfg.grid_delta.hi > 1.0) throw InvalidArgument("delta grid must lie in [-1, 1]");
  if (!n_list.empty()) {
    cfg.n_list.clear();
    std::stringstream ss(n_list);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        cfg.n_list.push_back(std::stoi(item));
      } catch (const std::logic_error&) {
        throw InvalidArgument("n-list entry '" + item + "' is not an integer");
      }
    }
  }
  if (cfg.levels < 0) throw InvalidArgument("levels must be >= 0");
  p.validate();
  return cfg;
}

inline nlohmann::ordered_json to_json(const Grid& g) { return {{"lo", g.lo}, {"hi", g.hi}, {"step", g.step}}; }

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  const ModelParams& p = c.params;
  nlohmann::ordered_json j;
  j["command"] = to_string(c.command);
  j["N"] = p.N;
  j["J"] = p.J;
  j["delta"] = p.delta;
  j["nc"] = p.n_c;
  j["g"] = p.g;
  j["omega-a"] = p.omega_a;
  j["omega-c"] = p.omega_c;
  j["bond-range"] = p.bond_range == BondRange::literal ? "literal" : "full";
  j["mode"] = c.mode == ModeSelect::sector ? "sector" : c.mode == ModeSelect::full ? "full" : "both";
  j["dt"] = c.charging.dt;
  j["safety"] = c.charging.safety;
  j["t-max"] = c.charging.t_max ? nlohmann::ordered_json(*c.charging.t_max) : nlohmann::ordered_json(nullptr);
  j["grid-j"] = to_json(c.grid_j);
  j["grid-delta"] = to_json(c.grid_delta);
  j["levels"] = c.levels;
  j["sz-convention"] = c.sz == SzConvention::pauli ? "pauli" : "half";
  j["n-list"] = c.n_list;
  j["fixed-nc"] = c.fixed_n_c;
  return j;
}

// FNV-1a over the resolved physics configuration (output directory excluded).
inline std::string params_hash(const RunConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sshqb
