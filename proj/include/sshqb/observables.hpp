// Battery-side observables: stored energy, ergotropy, per-site occupation,
// ground-state ordering parameters and capacity ratios.
#pragma once

#include <numeric>
#include <span>
#include <vector>

#include "sshqb/spectral.hpp"

namespace sshqb {

inline constexpr double kImagTol = 1e-10;
inline constexpr double kErgotropyClamp = 1e-9;
inline constexpr double kNegativePopulationTol = 1e-8;

inline double battery_energy(const DensityMatrix& rho, const HermitianOperator& battery) {
  if (rho.dim() != battery.dim()) throw DimensionMismatch("battery_energy: dimension mismatch");
  const Complex tr = (battery.matrix().cwiseProduct(rho.matrix().transpose())).sum();
  if (std::abs(tr.imag()) > kImagTol) throw InvariantViolation("tr[H rho] has an imaginary part; Hermiticity broken");
  return tr.real();
}

inline double charged_energy(double battery_energy_t, double ground_energy) { return battery_energy_t - ground_energy; }

// ε = tr[Hρ] − Σ_n r_n e_n with r descending and e ascending.
inline double ergotropy(const DensityMatrix& rho, const HermitianOperator& battery,
                        std::span<const double> levels_ascending) {
  if (static_cast<Index>(levels_ascending.size()) != rho.dim())
    throw DimensionMismatch("ergotropy: level count differs from state dimension");
  const Eigen::VectorXd pops = eigenvalues(rho.matrix());
  if (pops.minCoeff() < -kNegativePopulationTol) throw InvariantViolation("ergotropy: state has a negative eigenvalue");

  std::vector<std::pair<double, Index>> r;
  r.reserve(static_cast<std::size_t>(pops.size()));
  for (Index i = 0; i < pops.size(); ++i) r.emplace_back(pops(i), i);
  std::stable_sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  double passive = 0.0;
  for (std::size_t n = 0; n < r.size(); ++n) passive += r[n].first * levels_ascending[n];
  const double eps = battery_energy(rho, battery) - passive;
  if (eps < -kErgotropyClamp) throw InvariantViolation("ergotropy below zero beyond roundoff: " + std::to_string(eps));
  return std::max(eps, 0.0);
}

inline double ergotropy(const DensityMatrix& rho, const HermitianOperator& battery) {
  const Eigen::VectorXd e = eigenvalues(battery.matrix());
  return ergotropy(rho, battery, std::span<const double>(e.data(), static_cast<std::size_t>(e.size())));
}

// O_i = <σ+^(i) σ-^(i)>, i = 1..N.
inline std::vector<double> occupations(const DensityMatrix& rho) {
  const int N = spin_count_from_dim(rho.dim());
  std::vector<double> occ(static_cast<std::size_t>(N), 0.0);
  for (Index s = 0; s < rho.dim(); ++s) {
    const double p = rho.matrix()(s, s).real();
    for (int i = 0; i < N; ++i)
      if (s & (Index{1} << i)) occ[static_cast<std::size_t>(i)] += p;
  }
  return occ;
}

// Eigenvalue scale of σ_z in S_z = Σ σ_z: Pauli (±1) or spin-1/2 (±1/2).
enum class SzConvention { pauli, spin_half };

struct OrderingParams {
  double M_z = 0.0;
  double xi_z = 0.0;
};

inline OrderingParams ordering_params(const GroundState& ground, int N, SzConvention conv = SzConvention::pauli) {
  if (ground.vector.size() != (Index{1} << N)) throw DimensionMismatch("ordering_params: ground state size");
  const double unit = conv == SzConvention::pauli ? 1.0 : 0.5;
  double sz = 0.0, sz2 = 0.0;
  for (Index s = 0; s < ground.vector.size(); ++s) {
    const double p = std::norm(ground.vector(s));
    const double val = unit * (2.0 * excitation_count(s) - N);
    sz += p * val;
    sz2 += p * val * val;
  }
  return {sz / N, sz2 / (static_cast<double>(N) * N)};
}

struct Capacities {
  double R_eb = 0.0;
  double R_epb = 0.0;
};

inline Capacities capacities(double dE, double ergotropy_value, double E_max, double E_G) {
  const double window = E_max - E_G;
  if (!(window > 1e-12)) throw InvalidArgument("capacity undefined: E_max equals E_G");
  return {dE / window, ergotropy_value / window};
}

}  // namespace sshqb
