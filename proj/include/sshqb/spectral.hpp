#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sshqb/model.hpp"

namespace sshqb {

inline constexpr double kDegeneracyTol = 1e-9;

struct EigenSystem {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // column k pairs with values(k)
};

// Full decomposition of a self-adjoint matrix. Real input goes through the
// real symmetric solver, which is faster and gives real eigenvectors.
inline EigenSystem eigh(const Matrix& h) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (!is_hermitian(h, 1e-12 * scale)) throw InvalidArgument("eigh: input is not self-adjoint");
  EigenSystem out;
  if (h.imag().isZero(0.0)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    if (es.info() != Eigen::Success) throw Error("eigh: real solver failed to converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw Error("eigh: complex solver failed to converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  return out;
}

inline EigenSystem eigh(const HermitianOperator& h) { return eigh(h.matrix()); }

inline Eigen::VectorXd eigenvalues(const Matrix& h) {
  if (h.imag().isZero(0.0)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline int spin_count_from_dim(Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) throw DimensionMismatch("battery dimension is not 2^N");
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

// Basis indices of the spin-excitation-k block of a battery operator.
inline std::vector<Index> spin_sector_indices(int N, int k) {
  std::vector<Index> idx;
  for (Index s = 0; s < (Index{1} << N); ++s)
    if (excitation_count(s) == k) idx.push_back(s);
  return idx;
}

inline Matrix restrict(const Matrix& h, const std::vector<Index>& idx) {
  const Index n = static_cast<Index>(idx.size());
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = h(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  return out;
}

struct GroundState {
  double energy = 0.0;
  Vector vector;  // battery space, unit norm
  int k_g = 0;
  double degeneracy_gap = 0.0;
  bool degenerate = false;
};

// Lowest eigenvalue of each spin-excitation block k = 0..N.
inline std::vector<double> sector_minima(const HermitianOperator& battery) {
  const int N = spin_count_from_dim(battery.dim());
  std::vector<double> minima;
  for (int k = 0; k <= N; ++k) minima.push_back(eigenvalues(restrict(battery.matrix(), spin_sector_indices(N, k)))(0));
  return minima;
}

namespace detail {

inline Index dominant_index(const Vector& v) {
  Index best = 0;
  double mag = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > mag + 1e-12) {
      mag = std::abs(v(i));
      best = i;
    }
  }
  return best;
}

}  // namespace detail

// Lowest eigenpair of a block-diagonal battery Hamiltonian. Near-degenerate
// ground levels (gap < 1e-9) pick the lowest excitation sector, then the
// eigenvector whose dominant component has the smallest basis index.
inline GroundState ground_state(const HermitianOperator& battery) {
  const int N = spin_count_from_dim(battery.dim());
  std::vector<double> all;
  double best = std::numeric_limits<double>::infinity();
  int best_k = 0;
  EigenSystem best_block;
  std::vector<Index> best_idx;
  for (int k = 0; k <= N; ++k) {
    const auto idx = spin_sector_indices(N, k);
    EigenSystem block = eigh(restrict(battery.matrix(), idx));
    for (Index i = 0; i < block.values.size(); ++i) all.push_back(block.values(i));
    if (block.values(0) < best - kDegeneracyTol) {
      best = block.values(0);
      best_k = k;
      best_block = std::move(block);
      best_idx = idx;
    }
  }
  std::sort(all.begin(), all.end());

  GroundState g;
  g.k_g = best_k;
  g.energy = best_block.values(0);
  g.degeneracy_gap = all.size() > 1 ? all[1] - all[0] : std::numeric_limits<double>::infinity();
  g.degenerate = g.degeneracy_gap < kDegeneracyTol;

  Index pick = 0;
  Index pick_dominant = std::numeric_limits<Index>::max();
  for (Index c = 0; c < best_block.values.size(); ++c) {
    if (best_block.values(c) - best_block.values(0) >= kDegeneracyTol) break;
    const Index d = detail::dominant_index(best_block.vectors.col(c));
    if (d < pick_dominant) {
      pick_dominant = d;
      pick = c;
    }
  }
  Vector local = best_block.vectors.col(pick);
  const Complex lead = local(pick_dominant);
  local *= std::abs(lead) / lead;

  g.vector = Vector::Zero(battery.dim());
  for (std::size_t i = 0; i < best_idx.size(); ++i) g.vector(best_idx[i]) = local(static_cast<Index>(i));
  return g;
}

inline double e_max(const HermitianOperator& battery) { return eigenvalues(battery.matrix()).maxCoeff(); }

struct SpectrumRow {
  double J = 0.0;
  std::vector<double> levels;  // ascending
};

inline std::vector<SpectrumRow> spectrum_vs_J(const ModelParams& params, std::span<const double> J_grid, int levels) {
  if (J_grid.empty()) throw InvalidArgument("spectrum_vs_J needs a nonempty J grid");
  std::vector<SpectrumRow> table;
  table.reserve(J_grid.size());
  for (double J : J_grid) {
    ModelParams p = params;
    p.J = J;
    const Eigen::VectorXd ev = eigenvalues(build_battery_hamiltonian(p).matrix());
    const Index count = std::min<Index>(levels > 0 ? levels : ev.size(), ev.size());
    SpectrumRow row{J, {}};
    for (Index i = 0; i < count; ++i) row.levels.push_back(ev(i));
    table.push_back(std::move(row));
  }
  return table;
}

struct GroundCrossing {
  double J = 0.0;
  int from_sector = 0;
  int to_sector = 0;
};

namespace detail {

inline std::vector<double> minima_at(const ModelParams& params, double J) {
  ModelParams p = params;
  p.J = J;
  return sector_minima(build_battery_hamiltonian(p));
}

inline int argmin_sector(const std::vector<double>& minima) {
  int k = 0;
  for (int i = 1; i < static_cast<int>(minima.size()); ++i)
    if (minima[static_cast<std::size_t>(i)] < minima[static_cast<std::size_t>(k)] - kDegeneracyTol) k = i;
  return k;
}

}  // namespace detail

// Locates J values where the ground sector changes. Each grid interval with a
// sector change is bisected on the difference of the two sectors' minima.
inline std::vector<GroundCrossing> detect_ground_crossings(const ModelParams& params, std::span<const double> J_grid,
                                                           double tol = 1e-6) {
  std::vector<GroundCrossing> out;
  if (J_grid.size() < 2) return out;
  std::vector<double> prev = detail::minima_at(params, J_grid[0]);
  int prev_k = detail::argmin_sector(prev);
  for (std::size_t n = 1; n < J_grid.size(); ++n) {
    const std::vector<double> cur = detail::minima_at(params, J_grid[n]);
    const int cur_k = detail::argmin_sector(cur);
    if (cur_k != prev_k) {
      const auto gap = [&](double J) {
        const auto m = detail::minima_at(params, J);
        return m[static_cast<std::size_t>(prev_k)] - m[static_cast<std::size_t>(cur_k)];
      };
      double lo = J_grid[n - 1];
      double hi = J_grid[n];
      while (hi - lo > tol * 0.25) {
        const double mid = 0.5 * (lo + hi);
        if (gap(mid) > 0.0) hi = mid;
        else lo = mid;
      }
      const double J_star = 0.5 * (lo + hi);
      // A third sector dipping below both at J* means the interval hides
      // more than one change.
      const auto at = detail::minima_at(params, J_star);
      const double pair = std::min(at[static_cast<std::size_t>(prev_k)], at[static_cast<std::size_t>(cur_k)]);
      for (std::size_t k = 0; k < at.size(); ++k) {
        if (static_cast<int>(k) != prev_k && static_cast<int>(k) != cur_k && at[k] < pair - kDegeneracyTol)
          throw RefineNeeded("ground-sector change between J=" + std::to_string(J_grid[n - 1]) +
                             " and J=" + std::to_string(J_grid[n]) + " spans several sectors; refine the grid");
      }
      out.push_back({J_star, prev_k, cur_k});
    }
    prev = cur;
    prev_k = cur_k;
  }
  return out;
}

}  // namespace sshqb
