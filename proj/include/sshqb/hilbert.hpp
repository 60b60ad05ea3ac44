// Basis bookkeeping for the cavity ⊗ spin-chain space.
//
// Basis convention used everywhere in sshqb:
//   composite index = m * 2^N + s
// where m is the cavity Fock level and s is the spin bitstring. Site i
// (1-based) lives in bit i-1 and a set bit means the spin is excited.
#pragma once

#include <algorithm>
#include <bit>
#include <complex>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "sshqb/error.hpp"

namespace sshqb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNormTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-10;
inline constexpr double kSectorLeakTol = 1e-10;

enum class Space { battery, cavity, composite, sector };

inline const char* to_string(Space s) {
  switch (s) {
    case Space::battery: return "battery";
    case Space::cavity: return "cavity";
    case Space::composite: return "composite";
    case Space::sector: return "sector";
  }
  return "?";
}

// Which sites the J(1-δ) bonds cover. `full_chain` runs over every even i
// with i+1 <= N; `literal` stops at i <= N-2 as the printed sum does, which
// drops the last bond of odd chains.
enum class BondRange { full_chain, literal };

struct ModelParams {
  int N = 1;
  double omega_a = 1.0;
  double omega_c = 1.0;
  double g = 1.0;
  double J = 1.0;
  double delta = 0.0;
  int n_c = 3;
  BondRange bond_range = BondRange::full_chain;

  // Resonant defaults with n_c = 2N + 1 photons in the source cavity.
  static ModelParams resonant(int N, double J = 1.0, double delta = 0.0) {
    ModelParams p;
    p.N = N;
    p.J = J;
    p.delta = delta;
    p.n_c = 2 * N + 1;
    return p;
  }

  void validate() const {
    if (N < 1) throw InvalidArgument("N must be >= 1, got " + std::to_string(N));
    if (N > 16) throw InvalidArgument("N above 16 is outside dense exact diagonalization range");
    if (n_c < 0) throw InvalidArgument("n_c must be >= 0, got " + std::to_string(n_c));
    if (!(omega_a > 0.0)) throw InvalidArgument("omega_a must be > 0");
    if (!(delta >= -1.0 && delta <= 1.0))
      throw InvalidArgument("delta must lie in [-1, 1], got " + std::to_string(delta));
    if (!std::isfinite(J) || !std::isfinite(g) || !std::isfinite(omega_c))
      throw InvalidArgument("J, g and omega_c must be finite");
  }
};

// Dimensions of the composite space. cavity_dim is whatever bound the caller
// proved sufficient (n_c + k_g + 1 for charging runs).
struct HilbertGeometry {
  int N = 1;
  Index spin_dim = 2;
  Index cavity_dim = 1;
  Index full_dim = 2;

  HilbertGeometry() = default;
  HilbertGeometry(int n_spins, Index cavity_levels)
      : N(n_spins), spin_dim(Index{1} << n_spins), cavity_dim(cavity_levels),
        full_dim(cavity_levels * (Index{1} << n_spins)) {
    if (n_spins < 1) throw InvalidArgument("geometry needs N >= 1");
    if (cavity_levels < 1) throw InvalidArgument("geometry needs cavity_dim >= 1");
  }

  Index index(Index photons, Index spins) const { return photons * spin_dim + spins; }
  Index photons_of(Index idx) const { return idx / spin_dim; }
  Index spins_of(Index idx) const { return idx % spin_dim; }
};

inline int excitation_count(Index spins) {
  return std::popcount(static_cast<std::uint64_t>(spins));
}

inline bool is_hermitian(const Matrix& m, double tol = kHermitianTol) {
  if (m.rows() != m.cols()) return false;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i <= j; ++i)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
  return true;
}

class HermitianOperator {
 public:
  HermitianOperator(Matrix entries, Space space) : m_(std::move(entries)), space_(space) {
    if (!is_hermitian(m_))
      throw InvalidArgument(std::string("operator on ") + to_string(space_) + " space is not self-adjoint");
  }

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  Space space() const { return space_; }
  bool is_real() const { return m_.imag().isZero(0.0); }

 private:
  Matrix m_;
  Space space_;
};

class StateVector {
 public:
  StateVector(Vector amplitudes, Space space) : v_(std::move(amplitudes)), space_(space) {
    if (std::abs(v_.norm() - 1.0) > kNormTol)
      throw InvalidArgument("state is not normalized (|psi| = " + std::to_string(v_.norm()) + ")");
  }

  const Vector& amplitudes() const { return v_; }
  Index dim() const { return v_.size(); }
  Space space() const { return space_; }

 private:
  Vector v_;
  Space space_;
};

class DensityMatrix {
 public:
  // Hermiticity and trace are checked on construction; positivity is
  // checked on request because it costs an eigendecomposition.
  DensityMatrix(Matrix entries, Space space) : m_(std::move(entries)), space_(space) {
    if (!is_hermitian(m_)) throw InvalidArgument("density matrix is not self-adjoint");
    if (std::abs(m_.trace() - Complex(1.0, 0.0)) > kTraceTol)
      throw InvalidArgument("density matrix trace differs from 1");
  }

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  Space space() const { return space_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  void check_invariants() const {
    if (min_eigenvalue() < -kPositivityTol) throw InvariantViolation("density matrix has a negative eigenvalue");
  }

 private:
  Matrix m_;
  Space space_;
};

// Pauli lowering on site i (1-based): |..1_i..> -> |..0_i..>.
inline Matrix spin_lowering(int i, int N) {
  if (N < 1 || i < 1 || i > N)
    throw InvalidArgument("site index " + std::to_string(i) + " outside 1.." + std::to_string(N));
  const Index dim = Index{1} << N;
  const Index bit = Index{1} << (i - 1);
  Matrix m = Matrix::Zero(dim, dim);
  for (Index s = 0; s < dim; ++s)
    if (s & bit) m(s ^ bit, s) = 1.0;
  return m;
}

inline Matrix spin_raising(int i, int N) { return spin_lowering(i, N).adjoint(); }

// Σ_i σ+σ-, diagonal with the bit count of each basis state.
inline Matrix spin_excitation_number(int N) {
  const Index dim = Index{1} << N;
  Matrix m = Matrix::Zero(dim, dim);
  for (Index s = 0; s < dim; ++s) m(s, s) = excitation_count(s);
  return m;
}

inline Matrix cavity_annihilation(Index cavity_dim) {
  if (cavity_dim < 1) throw InvalidArgument("cavity dimension must be >= 1");
  Matrix c = Matrix::Zero(cavity_dim, cavity_dim);
  for (Index m = 1; m < cavity_dim; ++m) c(m - 1, m) = std::sqrt(static_cast<double>(m));
  return c;
}

inline Matrix cavity_number(Index cavity_dim) {
  const Matrix c = cavity_annihilation(cavity_dim);
  return c.adjoint() * c;
}

// op_cavity ⊗ op_spin in the cavity-major ordering.
inline Matrix embed(const Matrix& op_cavity, const Matrix& op_spin, const HilbertGeometry& geo) {
  if (op_cavity.rows() != geo.cavity_dim || op_cavity.cols() != geo.cavity_dim)
    throw DimensionMismatch("cavity operator is " + std::to_string(op_cavity.rows()) + "x" +
                            std::to_string(op_cavity.cols()) + ", geometry expects " +
                            std::to_string(geo.cavity_dim));
  if (op_spin.rows() != geo.spin_dim || op_spin.cols() != geo.spin_dim)
    throw DimensionMismatch("spin operator is " + std::to_string(op_spin.rows()) + "x" +
                            std::to_string(op_spin.cols()) + ", geometry expects " +
                            std::to_string(geo.spin_dim));
  return Eigen::kroneckerProduct(op_cavity, op_spin).eval();
}

inline Matrix embed_spin(const Matrix& op_spin, const HilbertGeometry& geo) {
  return embed(Matrix::Identity(geo.cavity_dim, geo.cavity_dim), op_spin, geo);
}

inline Matrix embed_cavity(const Matrix& op_cavity, const HilbertGeometry& geo) {
  return embed(op_cavity, Matrix::Identity(geo.spin_dim, geo.spin_dim), geo);
}

// N_exc = c†c + Σ σ+σ-; diagonal in the product basis.
inline Eigen::VectorXd excitation_diagonal(const HilbertGeometry& geo) {
  Eigen::VectorXd d(geo.full_dim);
  for (Index idx = 0; idx < geo.full_dim; ++idx)
    d(idx) = static_cast<double>(geo.photons_of(idx) + excitation_count(geo.spins_of(idx)));
  return d;
}

// ρ_B(s, s') = Σ_m ψ(m, s) ψ*(m, s').
inline DensityMatrix partial_trace_cavity(const StateVector& psi, const HilbertGeometry& geo) {
  if (psi.dim() != geo.full_dim) throw DimensionMismatch("state does not live on the composite space");
  const Vector& a = psi.amplitudes();
  Matrix rho = Matrix::Zero(geo.spin_dim, geo.spin_dim);
  for (Index m = 0; m < geo.cavity_dim; ++m) {
    const auto block = a.segment(m * geo.spin_dim, geo.spin_dim);
    rho.noalias() += block * block.adjoint();
  }
  // Enforce exact Hermiticity; the rank-one updates are Hermitian only up to rounding.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho), Space::battery);
}

// Composite basis states with m + k = K photons plus spin excitations.
struct SectorBasis {
  int K = 0;
  HilbertGeometry geometry;
  std::vector<Index> indices;  // sorted composite indices

  Index size() const { return static_cast<Index>(indices.size()); }
  bool empty() const { return indices.empty(); }
};

inline SectorBasis sector_basis(int K, const HilbertGeometry& geo) {
  if (K < 0) throw InvalidArgument("sector excitation K must be >= 0");
  SectorBasis basis;
  basis.K = K;
  basis.geometry = geo;
  for (Index m = 0; m < geo.cavity_dim; ++m) {
    for (Index s = 0; s < geo.spin_dim; ++s)
      if (m + excitation_count(s) == K) basis.indices.push_back(geo.index(m, s));
  }
  return basis;
}

inline Vector project_to_sector(const Vector& full, const SectorBasis& basis) {
  if (full.size() != basis.geometry.full_dim) throw DimensionMismatch("state does not match sector geometry");
  Vector out(basis.size());
  double kept = 0.0;
  for (Index k = 0; k < basis.size(); ++k) {
    out(k) = full(basis.indices[static_cast<std::size_t>(k)]);
    kept += std::norm(out(k));
  }
  const double leaked = full.squaredNorm() - kept;
  if (leaked > kSectorLeakTol)
    throw InvariantViolation("state carries weight " + std::to_string(leaked) + " outside sector K=" +
                             std::to_string(basis.K));
  return out;
}

inline Vector embed_from_sector(const Vector& sector, const SectorBasis& basis) {
  if (sector.size() != basis.size()) throw DimensionMismatch("sector vector has wrong length");
  Vector full = Vector::Zero(basis.geometry.full_dim);
  for (Index k = 0; k < basis.size(); ++k) full(basis.indices[static_cast<std::size_t>(k)]) = sector(k);
  return full;
}

inline Matrix project_to_sector(const Matrix& full, const SectorBasis& basis) {
  if (full.rows() != basis.geometry.full_dim || full.cols() != basis.geometry.full_dim)
    throw DimensionMismatch("operator does not match sector geometry");
  const Index n = basis.size();
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      out(i, j) = full(basis.indices[static_cast<std::size_t>(i)], basis.indices[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace sshqb
