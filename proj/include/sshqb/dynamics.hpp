// Charging dynamics: |ψ(0)> = |n_c> ⊗ |g>_B evolved exactly under H_S via
// its eigendecomposition, plus location of the charging time τ_c.
#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "sshqb/observables.hpp"

namespace sshqb {

enum class ExecutionMode { sector, full };

inline const char* to_string(ExecutionMode m) { return m == ExecutionMode::sector ? "sector" : "full"; }

inline StateVector initial_state(const ModelParams& p, const GroundState& ground, const HilbertGeometry& geo) {
  if (geo.N != p.N || ground.vector.size() != geo.spin_dim)
    throw DimensionMismatch("initial_state: ground state does not match geometry");
  if (geo.cavity_dim < p.n_c + ground.k_g + 1)
    throw InvalidArgument("initial_state: cavity dimension " + std::to_string(geo.cavity_dim) +
                          " cannot hold n_c + k_g = " + std::to_string(p.n_c + ground.k_g) + " photons");
  Vector psi = Vector::Zero(geo.full_dim);
  psi.segment(geo.index(p.n_c, 0), geo.spin_dim) = ground.vector;
  return StateVector(std::move(psi), Space::composite);
}

// V e^{-iΛt} V† ψ0.
inline Vector evolve(const EigenSystem& es, const Vector& psi0, double t) {
  const Vector coeff = es.vectors.adjoint() * psi0;
  const Vector phased = coeff.cwiseProduct((es.values.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix());
  return es.vectors * phased;
}

struct TrajectorySample {
  double E_B = 0.0;
  double dE = 0.0;
  double ergotropy = 0.0;
  double norm_error = 0.0;
  double n_exc = 0.0;
  double total_energy = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<TrajectorySample> samples;
  ModelParams params;
};

struct ChargingResult {
  double tau_c = 0.0;
  double dE_max = 0.0;
  double ergotropy_at_tau = 0.0;
  int refinement_iterations = 0;
};

struct ChargingOptions {
  double dt = 0.02;
  double safety = 4.0;
  std::optional<double> t_max;  // overrides safety * π / (g √n_c)
  double tolerance = 1e-7;      // golden-section bracket width
  double noise_floor = 1e-10;   // a first peak must exceed this ΔE
};

// Everything needed to evaluate a charging run at arbitrary times. Built
// once per parameter point; immutable afterwards.
class ChargingSystem {
 public:
  explicit ChargingSystem(const ModelParams& params, ExecutionMode mode = ExecutionMode::sector)
      : params_(params), mode_(mode), battery_(build_battery_hamiltonian(params)) {
    levels_ = eigenvalues(battery_.matrix());
    e_max_ = levels_.maxCoeff();
    ground_ = ground_state(battery_);
    const int K = params_.n_c + ground_.k_g;
    geometry_ = HilbertGeometry(params_.N, K + 1);
    sector_ = sector_basis(K, geometry_);

    const StateVector psi0 = initial_state(params_, ground_, geometry_);
    if (mode_ == ExecutionMode::sector) {
      const HermitianOperator hs = build_sector_hamiltonian(params_, battery_, sector_);
      working_hs_ = hs.matrix();
      psi0_ = project_to_sector(psi0.amplitudes(), sector_);
      // H_B only links equal excitation counts, hence equal photon numbers here.
      const Index n = sector_.size();
      working_hb_.resize(n, n);
      n_exc_diag_.resize(n);
      for (Index a = 0; a < n; ++a) {
        const Index ia = sector_.indices[static_cast<std::size_t>(a)];
        n_exc_diag_(a) = static_cast<double>(geometry_.photons_of(ia) + excitation_count(geometry_.spins_of(ia)));
        for (Index b = 0; b < n; ++b)
          working_hb_(a, b) = battery_.matrix()(geometry_.spins_of(ia),
                                                geometry_.spins_of(sector_.indices[static_cast<std::size_t>(b)]));
      }
    } else {
      working_hs_ = build_total(params_, geometry_).matrix();
      psi0_ = psi0.amplitudes();
      working_hb_ = embed_spin(battery_.matrix(), geometry_);
      n_exc_diag_ = excitation_diagonal(geometry_);
    }
    es_ = eigh(working_hs_);
    coeff_ = es_.vectors.adjoint() * psi0_;
  }

  const ModelParams& params() const { return params_; }
  ExecutionMode mode() const { return mode_; }
  const HermitianOperator& battery() const { return battery_; }
  const Eigen::VectorXd& battery_levels() const { return levels_; }
  const GroundState& ground() const { return ground_; }
  const HilbertGeometry& geometry() const { return geometry_; }
  const SectorBasis& sector() const { return sector_; }
  const EigenSystem& eigensystem() const { return es_; }
  double e_max() const { return e_max_; }
  Index working_dim() const { return working_hs_.rows(); }

  // State in working coordinates (sector or full composite).
  Vector working_state(double t) const {
    const Vector phased = coeff_.cwiseProduct((es_.values.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix());
    return es_.vectors * phased;
  }

  Vector composite_amplitudes(double t) const {
    Vector w = working_state(t);
    return mode_ == ExecutionMode::sector ? embed_from_sector(w, sector_) : w;
  }

  StateVector composite_state(double t) const { return StateVector(composite_amplitudes(t), Space::composite); }

  DensityMatrix battery_state(double t) const { return partial_trace_cavity(composite_state(t), geometry_); }

  // ⟨ψ(t)| I ⊗ H_B |ψ(t)⟩ - E_G without forming ρ_B.
  double charged_energy(double t) const {
    const Vector w = working_state(t);
    return (w.adjoint() * working_hb_ * w)(0, 0).real() - ground_.energy;
  }

  // dΔE/dt = i<ψ|[H_S, H_B]|ψ> = 2 Im <H_B ψ | H_S ψ>.
  double charging_rate(double t) const {
    const Vector w = working_state(t);
    const Vector hb_w = working_hb_ * w;
    const Vector hs_w = working_hs_ * w;
    return 2.0 * hb_w.dot(hs_w).imag();
  }

  TrajectorySample sample(double t) const {
    const Vector w = working_state(t);
    const Vector full = mode_ == ExecutionMode::sector ? embed_from_sector(w, sector_) : w;
    TrajectorySample s;
    s.norm_error = std::abs(w.norm() - 1.0);
    s.n_exc = (w.cwiseAbs2().transpose() * n_exc_diag_)(0, 0);
    s.total_energy = (w.adjoint() * working_hs_ * w)(0, 0).real();
    const DensityMatrix rho = partial_trace_cavity(StateVector(full, Space::composite), geometry_);
    s.E_B = sshqb::battery_energy(rho, battery_);
    s.dE = sshqb::charged_energy(s.E_B, ground_.energy);
    s.ergotropy = sshqb::ergotropy(rho, battery_, levels_span());
    return s;
  }

  std::span<const double> levels_span() const {
    return std::span<const double>(levels_.data(), static_cast<std::size_t>(levels_.size()));
  }

  double default_window(const ChargingOptions& opt) const {
    if (opt.t_max) return *opt.t_max;
    const double rate = std::abs(params_.g) * std::sqrt(static_cast<double>(std::max(params_.n_c, 1)));
    if (rate == 0.0) return opt.safety * std::numbers::pi;
    return opt.safety * std::numbers::pi / rate;
  }

 private:
  ModelParams params_;
  ExecutionMode mode_;
  HermitianOperator battery_;
  Eigen::VectorXd levels_;
  double e_max_ = 0.0;
  GroundState ground_;
  HilbertGeometry geometry_;
  SectorBasis sector_;
  Matrix working_hs_;
  Matrix working_hb_;
  Eigen::VectorXd n_exc_diag_;
  Vector psi0_;
  EigenSystem es_;
  Vector coeff_;
};

inline Trajectory trajectory(const ChargingSystem& sys, double t_max, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("trajectory: dt must be > 0");
  if (!(t_max >= dt)) throw InvalidArgument("trajectory: t_max must be >= dt");
  Trajectory tr;
  tr.params = sys.params();
  const auto steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  tr.times.reserve(steps + 1);
  tr.samples.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    tr.times.push_back(t);
    tr.samples.push_back(sys.sample(t));
  }
  return tr;
}

inline Trajectory trajectory(const ModelParams& p, double t_max, double dt, ExecutionMode mode = ExecutionMode::sector) {
  return trajectory(ChargingSystem(p, mode), t_max, dt);
}

// τ_c is the first strict local maximum of ΔE(t): scan on a dt grid, then
// golden-section refinement inside the bracketing pair of grid intervals.
inline ChargingResult find_charging_time(const ChargingSystem& sys, const ChargingOptions& opt = {}) {
  if (!(opt.dt > 0.0)) throw InvalidArgument("find_charging_time: dt must be > 0");
  const double t_max = sys.default_window(opt);
  const auto steps = static_cast<std::size_t>(std::floor(t_max / opt.dt + 1e-9));
  if (steps < 2) throw WindowTooShort("charging window shorter than two scan steps");

  double prev = sys.charged_energy(0.0);
  double cur = sys.charged_energy(opt.dt);
  std::optional<std::size_t> peak;
  for (std::size_t k = 1; k < steps; ++k) {
    const double next = sys.charged_energy(static_cast<double>(k + 1) * opt.dt);
    if (cur > prev && cur >= next && cur > opt.noise_floor) {
      peak = k;
      break;
    }
    prev = cur;
    cur = next;
  }
  if (!peak)
    throw WindowTooShort("no local maximum of the charged energy before t_max = " + std::to_string(t_max));

  constexpr double inv_phi = 0.6180339887498949;
  double a = static_cast<double>(*peak - 1) * opt.dt;
  double b = static_cast<double>(*peak + 1) * opt.dt;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = sys.charged_energy(x1);
  double f2 = sys.charged_energy(x2);
  int iters = 0;
  while (b - a > opt.tolerance) {
    ++iters;
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = sys.charged_energy(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = sys.charged_energy(x1);
    }
  }

  // Polish on the sign change of dΔE/dt; the derivative is free of the
  // cancellation that limits comparisons of ΔE near a flat maximum.
  double lo = std::max(0.0, a - opt.tolerance);
  double hi = b + opt.tolerance;
  double tau = 0.5 * (a + b);
  if (sys.charging_rate(lo) > 0.0 && sys.charging_rate(hi) < 0.0) {
    while (hi - lo > 1e-13) {
      ++iters;
      const double mid = 0.5 * (lo + hi);
      if (sys.charging_rate(mid) > 0.0) lo = mid;
      else hi = mid;
    }
    tau = 0.5 * (lo + hi);
  }

  ChargingResult res;
  res.tau_c = tau;
  res.refinement_iterations = iters;
  const TrajectorySample at = sys.sample(res.tau_c);
  res.dE_max = at.dE;
  res.ergotropy_at_tau = at.ergotropy;
  return res;
}

inline ChargingResult find_charging_time(const ModelParams& p, const ChargingOptions& opt = {},
                                         ExecutionMode mode = ExecutionMode::sector) {
  return find_charging_time(ChargingSystem(p, mode), opt);
}

}  // namespace sshqb
