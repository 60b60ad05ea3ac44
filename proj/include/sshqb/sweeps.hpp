// Parameter sweeps over J, δ and N. Every grid point is an independent
// charging run; results are collected in grid order regardless of how many
// workers evaluate them.
#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sshqb/dynamics.hpp"

namespace sshqb {

// Presets mirroring the two hopping strengths used for the δ studies.
inline constexpr double kDegenerateJ = 0.3;
inline constexpr double kNondegenerateJ = 2.5;

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  // Points are lo + i*step, computed as a convex combination so that a grid
  // symmetric about zero yields exactly negated pairs.
  std::vector<double> points() const {
    if (!(step > 0.0)) throw InvalidArgument("grid step must be > 0");
    if (hi < lo) throw InvalidArgument("grid upper bound below lower bound");
    const double span = hi - lo;
    const long n = std::lround(span / step);
    if (std::abs(static_cast<double>(n) * step - span) > 1e-9 * std::max(1.0, span))
      throw InvalidArgument("grid step does not divide the range");
    std::vector<double> pts;
    if (n == 0) return {lo};
    for (long i = 0; i <= n; ++i)
      pts.push_back((lo * static_cast<double>(n - i) + hi * static_cast<double>(i)) / static_cast<double>(n));
    return pts;
  }

  static Grid parse(const std::string& text) {
    Grid g;
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw InvalidArgument("grid must be LO:HI:STEP, got '" + text + "'");
    try {
      g.lo = std::stod(text.substr(0, c1));
      g.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
      g.step = std::stod(text.substr(c2 + 1));
    } catch (const std::logic_error&) {
      throw InvalidArgument("grid must be LO:HI:STEP, got '" + text + "'");
    }
    g.points();
    return g;
  }
};

inline unsigned worker_count() {
  if (const char* env = std::getenv("SSHQB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

template <class F>
auto parallel_map(std::size_t count, F&& fn, unsigned workers = worker_count()) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<std::optional<R>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < n; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct SweepOptions {
  ExecutionMode mode = ExecutionMode::sector;
  ChargingOptions charging;
  SzConvention sz = SzConvention::pauli;
  unsigned workers = worker_count();
};

struct SweepRecord {
  int N = 0;
  int n_c = 0;
  double J = 0.0;
  double delta = 0.0;
  double tau_c = 0.0;
  double dE_max = 0.0;
  double ergotropy = 0.0;
  double E_G = 0.0;
  double E_max = 0.0;
  double R_eb = 0.0;
  double R_epb = 0.0;
  std::vector<double> occupations;
  double M_z = 0.0;
  double xi_z = 0.0;
  int k_g = 0;
  bool degenerate_ground = false;
  // conservation diagnostics at τ_c
  double norm_error = 0.0;
  double n_exc_drift = 0.0;
  double energy_drift = 0.0;
};

inline void check_record(const SweepRecord& r) {
  constexpr double slack = 1e-9;
  auto fail = [&](const std::string& what) {
    throw InvariantViolation(what + " at N=" + std::to_string(r.N) + " J=" + std::to_string(r.J) +
                             " delta=" + std::to_string(r.delta));
  };
  if (r.norm_error > 1e-9) fail("norm drift");
  if (r.n_exc_drift > 1e-9) fail("excitation-number drift");
  if (r.energy_drift > 1e-9) fail("total-energy drift");
  if (r.ergotropy < 0.0 || r.ergotropy > r.dE_max + slack) fail("ergotropy outside [0, dE]");
  if (r.R_epb < -slack || r.R_epb > r.R_eb + slack || r.R_eb > 1.0 + slack) fail("capacity ordering broken");
  for (double o : r.occupations)
    if (o < -slack || o > 1.0 + slack) fail("occupation outside [0, 1]");
}

// One charging run evaluated at τ_c.
inline SweepRecord evaluate_point(const ModelParams& p, const SweepOptions& opt = {}) {
  const ChargingSystem sys(p, opt.mode);
  const ChargingResult charge = find_charging_time(sys, opt.charging);
  const TrajectorySample start = sys.sample(0.0);
  const TrajectorySample at = sys.sample(charge.tau_c);
  const DensityMatrix rho = sys.battery_state(charge.tau_c);

  SweepRecord r;
  r.N = p.N;
  r.n_c = p.n_c;
  r.J = p.J;
  r.delta = p.delta;
  r.tau_c = charge.tau_c;
  r.dE_max = charge.dE_max;
  r.ergotropy = charge.ergotropy_at_tau;
  r.E_G = sys.ground().energy;
  r.E_max = sys.e_max();
  const Capacities cap = capacities(r.dE_max, r.ergotropy, r.E_max, r.E_G);
  r.R_eb = cap.R_eb;
  r.R_epb = cap.R_epb;
  r.occupations = occupations(rho);
  const OrderingParams order = ordering_params(sys.ground(), p.N, opt.sz);
  r.M_z = order.M_z;
  r.xi_z = order.xi_z;
  r.k_g = sys.ground().k_g;
  r.degenerate_ground = sys.ground().degenerate;
  r.norm_error = at.norm_error;
  r.n_exc_drift = std::abs(at.n_exc - start.n_exc);
  r.energy_drift = std::abs(at.total_energy - start.total_energy);
  check_record(r);
  return r;
}

inline std::vector<SweepRecord> sweep_hopping(const ModelParams& base, std::span<const double> J_grid,
                                              const SweepOptions& opt = {}) {
  return parallel_map(
      J_grid.size(),
      [&](std::size_t i) {
        ModelParams p = base;
        p.J = J_grid[i];
        return evaluate_point(p, opt);
      },
      opt.workers);
}

inline std::vector<SweepRecord> sweep_delta(const ModelParams& base, std::span<const double> delta_grid,
                                            const SweepOptions& opt = {}) {
  return parallel_map(
      delta_grid.size(),
      [&](std::size_t i) {
        ModelParams p = base;
        p.delta = delta_grid[i];
        return evaluate_point(p, opt);
      },
      opt.workers);
}

// result[d][j] is the record at (delta_grid[d], J_grid[j]).
inline std::vector<std::vector<SweepRecord>> heatmap_j_delta(const ModelParams& base, std::span<const double> J_grid,
                                                             std::span<const double> delta_grid,
                                                             const SweepOptions& opt = {}) {
  const std::size_t nj = J_grid.size();
  auto flat = parallel_map(
      nj * delta_grid.size(),
      [&](std::size_t i) {
        ModelParams p = base;
        p.delta = delta_grid[i / nj];
        p.J = J_grid[i % nj];
        return evaluate_point(p, opt);
      },
      opt.workers);
  std::vector<std::vector<SweepRecord>> grid(delta_grid.size());
  for (std::size_t i = 0; i < flat.size(); ++i) grid[i / nj].push_back(std::move(flat[i]));
  return grid;
}

struct OccupationRow {
  double delta = 0.0;
  double tau_c = 0.0;
  std::vector<double> occupations;
};

inline std::vector<OccupationRow> occupation_profile(const ModelParams& base, std::span<const double> delta_grid,
                                                     const SweepOptions& opt = {}) {
  std::vector<OccupationRow> rows;
  for (const SweepRecord& r : sweep_delta(base, delta_grid, opt)) rows.push_back({r.delta, r.tau_c, r.occupations});
  return rows;
}

struct CapacityRow {
  double delta = 0.0;
  Capacities capacity;
  double dE_max = 0.0;
  double ergotropy = 0.0;
  double E_max = 0.0;
  double E_G = 0.0;
};

inline std::vector<CapacityRow> capacity_sweep(const ModelParams& base, std::span<const double> delta_grid,
                                               const SweepOptions& opt = {}) {
  std::vector<CapacityRow> rows;
  for (const SweepRecord& r : sweep_delta(base, delta_grid, opt))
    rows.push_back({r.delta, {r.R_eb, r.R_epb}, r.dE_max, r.ergotropy, r.E_max, r.E_G});
  return rows;
}

struct OrderRow {
  double J = 0.0;
  int k_g = 0;
  double E_G = 0.0;
  OrderingParams order;
  bool degenerate = false;
};

inline std::vector<OrderRow> order_param_sweep(const ModelParams& base, std::span<const double> J_grid,
                                               const SweepOptions& opt = {}) {
  return parallel_map(
      J_grid.size(),
      [&](std::size_t i) {
        ModelParams p = base;
        p.J = J_grid[i];
        const GroundState g = ground_state(build_battery_hamiltonian(p));
        return OrderRow{p.J, g.k_g, g.energy, ordering_params(g, p.N, opt.sz), g.degenerate};
      },
      opt.workers);
}

// Sites (1-based) joined by the stronger of the two alternating bonds.
inline std::vector<std::pair<int, int>> dimer_pairs(const ModelParams& p) {
  std::vector<std::pair<int, int>> pairs;
  if (p.delta == 0.0) return pairs;
  for (const Bond& b : bond_pattern(p)) {
    const bool strong = p.delta > 0.0 ? (b.left % 2 == 1) : (b.left % 2 == 0);
    if (strong) pairs.emplace_back(b.left, b.left + 1);
  }
  return pairs;
}

enum class PhotonScaling { grow_with_N, fixed };

struct TauPoint {
  int N = 0;
  int n_c = 0;
  double tau_c = 0.0;
};

struct TauScaling {
  std::vector<TauPoint> points;
  double slope = 0.0;  // d log τ_c / d log N, least squares
};

inline double loglog_slope(const std::vector<TauPoint>& pts) {
  if (pts.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pts.size());
  for (const auto& p : pts) {
    const double x = std::log(static_cast<double>(p.N));
    const double y = std::log(p.tau_c);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return 0.0;
  return (n * sxy - sx * sy) / den;
}

inline TauScaling tau_scaling(const ModelParams& base, const std::vector<int>& N_list,
                              PhotonScaling photons = PhotonScaling::grow_with_N, int fixed_n_c = -1,
                              const SweepOptions& opt = {}) {
  for (int N : N_list)
    if (N < 1 || N > 6) throw InvalidArgument("tau_scaling is limited to 1 <= N <= 6");
  int fixed = fixed_n_c;
  if (photons == PhotonScaling::fixed && fixed < 0) {
    int n_max = 1;
    for (int N : N_list) n_max = std::max(n_max, N);
    fixed = 2 * n_max + 1;
  }
  TauScaling out;
  out.points = parallel_map(
      N_list.size(),
      [&](std::size_t i) {
        ModelParams p = base;
        p.N = N_list[i];
        p.n_c = photons == PhotonScaling::grow_with_N ? 2 * p.N + 1 : fixed;
        return TauPoint{p.N, p.n_c, find_charging_time(p, opt.charging, opt.mode).tau_c};
      },
      opt.workers);
  out.slope = loglog_slope(out.points);
  return out;
}

}  // namespace sshqb
