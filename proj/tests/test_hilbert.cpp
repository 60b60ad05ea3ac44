#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sshqb/model.hpp"

using namespace sshqb;

TEST(SpinLowering, SingleSpinMapsExcitedToGround) {
  const Matrix m = spin_lowering(1, 1);
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m(0, 1), Complex(1.0));
  EXPECT_EQ(m.cwiseAbs().sum(), 1.0);
}

TEST(SpinLowering, TwoSpinsLowersSiteOne) {
  // |e,g> has site 1 excited: bit 0 set.
  Vector eg = Vector::Zero(4);
  eg(0b01) = 1.0;
  const Vector out = spin_lowering(1, 2) * eg;
  EXPECT_EQ(out(0), Complex(1.0));
  EXPECT_NEAR(out.norm(), 1.0, 0.0);
}

TEST(SpinLowering, NumberOperatorCountsBits) {
  for (int N = 1; N <= 5; ++N) {
    Matrix total = Matrix::Zero(1 << N, 1 << N);
    for (int i = 1; i <= N; ++i) total += spin_raising(i, N) * spin_lowering(i, N);
    for (long s = 0; s < (1L << N); ++s) {
      Vector e = Vector::Zero(1 << N);
      e(s) = 1.0;
      const Vector r = total * e;
      EXPECT_NEAR((r - oracle::popcount(s) * e).norm(), 0.0, 1e-15) << "N=" << N << " s=" << s;
    }
  }
}

TEST(SpinLowering, RejectsOutOfRangeSite) {
  EXPECT_THROW(spin_lowering(0, 3), InvalidArgument);
  EXPECT_THROW(spin_lowering(4, 3), InvalidArgument);
}

TEST(CavityAnnihilation, LadderEntries) {
  const Matrix c = cavity_annihilation(2);
  EXPECT_EQ(c(0, 1), Complex(1.0));
  const Matrix n = cavity_number(6);
  for (int m = 0; m < 6; ++m) EXPECT_NEAR(n(m, m).real(), m, 1e-14);
  EXPECT_THROW(cavity_annihilation(0), InvalidArgument);
}

TEST(CavityAnnihilation, CommutatorIsIdentityBelowTopLevel) {
  const int dim = 7;
  const Matrix c = cavity_annihilation(dim);
  const Matrix comm = c * c.adjoint() - c.adjoint() * c;
  for (int i = 0; i < dim - 1; ++i)
    for (int j = 0; j < dim - 1; ++j) EXPECT_NEAR(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)), 0.0, 1e-13);
}

TEST(Embed, MatchesIndexKroneckerAndMultiplies) {
  std::mt19937 rng(11);
  const HilbertGeometry geo(2, 3);
  const Matrix A = oracle::random_hermitian(3, rng), B = oracle::random_hermitian(4, rng);
  const Matrix C = oracle::random_hermitian(3, rng), D = oracle::random_hermitian(4, rng);
  EXPECT_LT((embed(A, B, geo) - oracle::kron(A, B)).cwiseAbs().maxCoeff(), 1e-14);
  const Matrix lhs = embed(A, B, geo) * embed(C, D, geo);
  const Matrix rhs = embed(A * C, B * D, geo);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Embed, PhotonNumberAndBatteryEigenvalue) {
  ModelParams p = ModelParams::resonant(2, 0.7, 0.2);
  const HilbertGeometry geo(2, 4);
  const HermitianOperator hb = build_battery_hamiltonian(p);
  Eigen::SelfAdjointEigenSolver<Matrix> es(hb.matrix());
  Vector psi = Vector::Zero(geo.full_dim);
  psi.segment(geo.index(3, 0), geo.spin_dim) = es.eigenvectors().col(0);
  const Vector out = embed_spin(hb.matrix(), geo) * psi;
  EXPECT_LT((out - es.eigenvalues()(0) * psi).norm(), 1e-12);
  const Complex n = psi.dot(embed_cavity(cavity_number(4), geo) * psi);
  EXPECT_NEAR(n.real(), 3.0, 1e-13);
}

TEST(Embed, RejectsDimensionMismatch) {
  const HilbertGeometry geo(2, 3);
  EXPECT_THROW(embed(Matrix::Identity(2, 2), Matrix::Identity(4, 4), geo), DimensionMismatch);
  EXPECT_THROW(embed(Matrix::Identity(3, 3), Matrix::Identity(2, 2), geo), DimensionMismatch);
}

TEST(PartialTrace, ProductStateGivesPureBatteryState) {
  const HilbertGeometry geo(1, 2);
  Vector psi = Vector::Zero(4);
  psi(geo.index(0, 1)) = 1.0;
  const DensityMatrix rho = partial_trace_cavity(StateVector(psi, Space::composite), geo);
  EXPECT_NEAR(rho.matrix()(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 0.0, 1e-15);
}

TEST(PartialTrace, BellPairGivesMaximallyMixed) {
  const HilbertGeometry geo(1, 2);
  Vector psi = Vector::Zero(4);
  psi(geo.index(0, 1)) = 1.0 / std::sqrt(2.0);
  psi(geo.index(1, 0)) = 1.0 / std::sqrt(2.0);
  const DensityMatrix rho = partial_trace_cavity(StateVector(psi, Space::composite), geo);
  EXPECT_LT((rho.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PartialTrace, ExpectationOracleOnRandomStates) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const HilbertGeometry geo(3, 4);
    const Vector psi = oracle::random_state(static_cast<int>(geo.full_dim), rng);
    const Matrix X = oracle::random_hermitian(8, rng);
    const DensityMatrix rho = partial_trace_cavity(StateVector(psi, Space::composite), geo);
    rho.check_invariants();
    const Complex lhs = (rho.matrix() * X).trace();
    const Complex rhs = psi.dot(oracle::kron(Matrix::Identity(4, 4), X) * psi);
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
  }
}

TEST(PartialTrace, RejectsUnnormalizedInput) {
  Vector psi = Vector::Zero(4);
  psi(0) = 2.0;
  EXPECT_THROW(StateVector(psi, Space::composite), InvalidArgument);
}

TEST(SectorBasis, SmallEnumeration) {
  const SectorBasis b = sector_basis(1, HilbertGeometry(1, 2));
  const HilbertGeometry& geo = b.geometry;
  ASSERT_EQ(b.size(), 2);
  EXPECT_EQ(b.indices[0], geo.index(0, 1));  // |0>|e>
  EXPECT_EQ(b.indices[1], geo.index(1, 0));  // |1>|g>
  const SectorBasis zero = sector_basis(0, HilbertGeometry(4, 3));
  ASSERT_EQ(zero.size(), 1);
  EXPECT_EQ(zero.indices[0], 0);
}

TEST(SectorBasis, SizeMatchesBruteForceAndBinomialSum) {
  EXPECT_EQ(sector_basis(11, HilbertGeometry(5, 12)).size(), 32);
  for (int N = 1; N <= 5; ++N)
    for (long cav = 1; cav <= 8; ++cav)
      for (int K = 0; K <= 10; ++K) {
        long expected = 0;
        for (int k = std::max<long>(0, K - cav + 1); k <= std::min(N, K); ++k) expected += oracle::binomial(N, k);
        const SectorBasis b = sector_basis(K, HilbertGeometry(N, cav));
        EXPECT_EQ(b.size(), oracle::sector_size_bruteforce(K, N, cav));
        EXPECT_EQ(b.size(), expected);
        EXPECT_TRUE(std::is_sorted(b.indices.begin(), b.indices.end()));
      }
}

TEST(SectorBasis, ProjectEmbedRoundTrip) {
  std::mt19937 rng(3);
  const SectorBasis b = sector_basis(4, HilbertGeometry(3, 6));
  const Vector local = oracle::random_state(static_cast<int>(b.size()), rng);
  const Vector full = embed_from_sector(local, b);
  EXPECT_EQ((project_to_sector(full, b) - local).norm(), 0.0);
}

TEST(SectorBasis, ProjectRejectsLeakage) {
  std::mt19937 rng(5);
  const SectorBasis b = sector_basis(2, HilbertGeometry(2, 4));
  const Vector full = oracle::random_state(static_cast<int>(b.geometry.full_dim), rng);
  EXPECT_THROW(project_to_sector(full, b), InvariantViolation);
}

TEST(SectorBasis, SectorSpectraAreSubsetsOfFullSpectrum) {
  const ModelParams p = ModelParams::resonant(3, 1.3, 0.4);
  const HilbertGeometry geo(3, 5);
  const HermitianOperator hs = build_total(p, geo);
  Eigen::SelfAdjointEigenSolver<Matrix> full(hs.matrix());
  std::vector<double> merged;
  for (int K = 0; K <= 4 + 3; ++K) {
    const SectorBasis b = sector_basis(K, geo);
    if (b.empty()) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> part(project_to_sector(hs.matrix(), b));
    for (Index i = 0; i < part.eigenvalues().size(); ++i) merged.push_back(part.eigenvalues()(i));
  }
  std::sort(merged.begin(), merged.end());
  ASSERT_EQ(static_cast<Index>(merged.size()), full.eigenvalues().size());
  for (std::size_t i = 0; i < merged.size(); ++i) EXPECT_NEAR(merged[i], full.eigenvalues()(static_cast<Index>(i)), 1e-10);
}

TEST(DensityMatrixType, RejectsBadTraceAndNonHermitian) {
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix(m, Space::battery), InvalidArgument);
  Matrix h = 0.5 * Matrix::Identity(2, 2);
  h(0, 1) = Complex(0.1, 0.0);
  EXPECT_THROW(DensityMatrix(h, Space::battery), InvalidArgument);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix(neg, Space::battery).check_invariants(), InvariantViolation);
}
