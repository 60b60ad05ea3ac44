// Hamiltonians of the cavity-charged SSH spin chain.
//
//   H_A = ω_c c†c
//   H_B = ω_a Σ σ+σ-  −  Σ_bonds t_i (σ+^(i) σ-^(i+1) + h.c.)
//   H_I = g Σ_i (σ+^(i) c + h.c.)
//   H_S = H_A + H_B + H_I
//
// with t_i = J(1+δ) on odd i and J(1−δ) on even i, open boundaries.
#pragma once

#include <vector>

#include "sshqb/hilbert.hpp"

namespace sshqb {

struct Bond {
  int left = 1;  // bond joins sites left and left+1
  double strength = 0.0;
};

inline std::vector<Bond> bond_pattern(int N, double J, double delta,
                                      BondRange range = BondRange::full_chain) {
  std::vector<Bond> bonds;
  for (int i = 1; i + 1 <= N; ++i) {
    const bool odd = (i % 2) == 1;
    if (!odd && range == BondRange::literal && i > N - 2) continue;
    bonds.push_back({i, odd ? J * (1.0 + delta) : J * (1.0 - delta)});
  }
  return bonds;
}

inline std::vector<Bond> bond_pattern(const ModelParams& p) { return bond_pattern(p.N, p.J, p.delta, p.bond_range); }

inline HermitianOperator build_battery_hamiltonian(const ModelParams& p) {
  p.validate();
  const Index dim = Index{1} << p.N;
  Matrix h = Matrix::Zero(dim, dim);
  for (Index s = 0; s < dim; ++s) h(s, s) = p.omega_a * excitation_count(s);
  for (const Bond& b : bond_pattern(p)) {
    const Index lo = Index{1} << (b.left - 1);
    const Index hi = Index{1} << b.left;
    // σ+^(i) σ-^(i+1): moves an excitation from site i+1 to site i.
    for (Index s = 0; s < dim; ++s) {
      if ((s & hi) && !(s & lo)) {
        const Index t = s ^ hi ^ lo;
        h(t, s) -= b.strength;
        h(s, t) -= b.strength;
      }
    }
  }
  return HermitianOperator(std::move(h), Space::battery);
}

inline HermitianOperator build_cavity_hamiltonian(const ModelParams& p, Index cavity_dim) {
  Matrix h = Matrix::Zero(cavity_dim, cavity_dim);
  for (Index m = 0; m < cavity_dim; ++m) h(m, m) = p.omega_c * static_cast<double>(m);
  return HermitianOperator(std::move(h), Space::cavity);
}

inline HermitianOperator build_interaction(const ModelParams& p, const HilbertGeometry& geo) {
  if (geo.N != p.N) throw DimensionMismatch("geometry spin count differs from params");
  Matrix h = Matrix::Zero(geo.full_dim, geo.full_dim);
  // g σ+^(i) c : (m, s) -> (m-1, s | bit i) with amplitude g√m.
  for (Index m = 1; m < geo.cavity_dim; ++m) {
    const double amp = p.g * std::sqrt(static_cast<double>(m));
    for (Index s = 0; s < geo.spin_dim; ++s) {
      for (int i = 0; i < geo.N; ++i) {
        const Index bit = Index{1} << i;
        if (s & bit) continue;
        const Index from = geo.index(m, s);
        const Index to = geo.index(m - 1, s | bit);
        h(to, from) += amp;
        h(from, to) += amp;
      }
    }
  }
  return HermitianOperator(std::move(h), Space::composite);
}

inline HermitianOperator build_total(const ModelParams& p, const HilbertGeometry& geo) {
  const HermitianOperator ha = build_cavity_hamiltonian(p, geo.cavity_dim);
  const HermitianOperator hb = build_battery_hamiltonian(p);
  Matrix h = embed_cavity(ha.matrix(), geo) + embed_spin(hb.matrix(), geo) + build_interaction(p, geo).matrix();
  return HermitianOperator(std::move(h), Space::composite);
}

// H_S restricted to one excitation sector, assembled directly from matrix
// elements without forming the full composite matrix.
inline HermitianOperator build_sector_hamiltonian(const ModelParams& p, const HermitianOperator& battery,
                                                  const SectorBasis& basis) {
  const HilbertGeometry& geo = basis.geometry;
  if (battery.dim() != geo.spin_dim) throw DimensionMismatch("battery Hamiltonian does not match geometry");
  const Index n = basis.size();
  // Spin configuration -> position inside the sector (photon number is implied by K).
  std::vector<Index> position(static_cast<std::size_t>(geo.spin_dim), -1);
  for (Index k = 0; k < n; ++k) position[static_cast<std::size_t>(geo.spins_of(basis.indices[k]))] = k;

  const Matrix& hb = battery.matrix();
  Matrix h = Matrix::Zero(n, n);
  for (Index a = 0; a < n; ++a) {
    const Index ia = basis.indices[static_cast<std::size_t>(a)];
    const Index m = geo.photons_of(ia);
    const Index s = geo.spins_of(ia);
    h(a, a) += p.omega_c * static_cast<double>(m);
    for (Index b = 0; b < n; ++b) {
      const Index sb = geo.spins_of(basis.indices[static_cast<std::size_t>(b)]);
      h(a, b) += hb(s, sb);
    }
    if (m == 0) continue;
    const double amp = p.g * std::sqrt(static_cast<double>(m));
    for (int i = 0; i < geo.N; ++i) {
      const Index bit = Index{1} << i;
      if (s & bit) continue;
      const Index b = position[static_cast<std::size_t>(s | bit)];
      if (b < 0) continue;
      h(b, a) += amp;
      h(a, b) += amp;
    }
  }
  return HermitianOperator(std::move(h), Space::sector);
}

}  // namespace sshqb
