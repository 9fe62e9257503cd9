#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "freemap/elliptic.hpp"
#include "freemap/random.hpp"
#include "oracles.hpp"

using namespace freemap;

TEST(CarlsonRF, EqualArguments) { EXPECT_NEAR(std::abs(carlson_rf(4.0, 4.0, 4.0) - 0.5), 0.0, 1e-15); }

TEST(CarlsonRF, OneZeroArgument) {
  EXPECT_NEAR(std::abs(carlson_rf(0.0, 1.0, 1.0) - std::numbers::pi / 2), 0.0, 1e-14);
}

TEST(CarlsonRF, CompleteIntegralAgainstQuadrature) {
  const double t = 2.0 / 3.0;
  const cplx rf = carlson_rf(0.0, 1.0 - t * t, 1.0);
  EXPECT_NEAR(rf.real(), oracle::complete_k_quadrature(t), 1e-12);
  EXPECT_EQ(rf.imag(), 0.0);
}

TEST(CarlsonRF, ReferenceValues) {
  // Frozen from an arbitrary-precision evaluation.
  EXPECT_LE(std::abs(carlson_rf(1.0, 2.0, 3.0) - 0.72694593546890820), 1e-15);
  EXPECT_LE(std::abs(carlson_rf({1.0, 1.0}, 2.0, 0.5) - cplx{0.91580376141182371, -0.13049795480637210}), 1e-14);
}

TEST(CarlsonRF, Homogeneity) {
  Rng rng(81);
  for (int trial = 0; trial < 50; ++trial) {
    const cplx x{rng.uniform(0.1, 3.0), rng.uniform(-1.0, 1.0)};
    const cplx y{rng.uniform(0.1, 3.0), rng.uniform(-1.0, 1.0)};
    const cplx z{rng.uniform(0.1, 3.0), 0.0};
    const double lambda = rng.uniform(0.1, 10.0);
    const cplx lhs = carlson_rf(lambda * x, lambda * y, lambda * z);
    const cplx rhs = carlson_rf(x, y, z) / std::sqrt(lambda);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(rhs));
  }
}

TEST(CarlsonRF, Symmetric) {
  const cplx a{0.3, 0.4}, b{2.0, -0.1}, c{1.5, 0.0};
  const cplx ref = carlson_rf(a, b, c);
  EXPECT_LE(std::abs(carlson_rf(b, c, a) - ref), 1e-15);
  EXPECT_LE(std::abs(carlson_rf(c, a, b) - ref), 1e-15);
}

TEST(CarlsonRF, BranchCutRejected) {
  EXPECT_THROW(carlson_rf(-1.0, 1.0, 1.0), EllipticError);
  EXPECT_THROW(carlson_rf(0.0, 0.0, 1.0), EllipticError);
}

TEST(EllipticKIncomplete, ReducesToArcsin) {
  EXPECT_NEAR(std::abs(elliptic_k_incomplete(0.5, 0.0) - std::numbers::pi / 6), 0.0, 1e-12);
  for (int i = -9; i <= 9; ++i)
    for (int j = -4; j <= 4; ++j) {
      const cplx z{0.1 * i, 0.1 * j};
      EXPECT_LE(std::abs(elliptic_k_incomplete(z, 0.0) - std::asin(z)), 1e-12) << z;
    }
}

TEST(EllipticKIncomplete, ZeroAndComplete) {
  EXPECT_EQ(elliptic_k_incomplete(0.0, 2.0 / 3.0), cplx{});
  EXPECT_NEAR(elliptic_k_incomplete(1.0, 2.0 / 3.0).real(), oracle::complete_k_quadrature(2.0 / 3.0), 1e-10);
}

TEST(EllipticKIncomplete, OddSymmetry) {
  Rng rng(82);
  for (int trial = 0; trial < 50; ++trial) {
    const cplx z{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
    const double t = rng.uniform(0.05, 0.95);
    EXPECT_LE(std::abs(elliptic_k_incomplete(-z, t) + elliptic_k_incomplete(z, t)), 1e-12);
  }
}

TEST(EllipticKIncomplete, RealAxisBeyondOneRejected) {
  EXPECT_THROW(elliptic_k_incomplete(1.2, 0.5), EllipticError);
}

TEST(EllipticKIncomplete, AgreesWithRealQuadrature) {
  for (double x : {0.2, 0.5, 0.9}) {
    const double t = 2.0 / 3.0;
    // x = sin(phi) again
    const double want = oracle::adaptive_simpson(
        [t](double phi) { return 1.0 / std::sqrt(1.0 - t * t * std::sin(phi) * std::sin(phi)); }, 0.0, std::asin(x),
        1e-15);
    EXPECT_NEAR(elliptic_k_incomplete(x, t).real(), want, 1e-13);
  }
}

TEST(EllipticK, ModulusTwoThirds) {
  EXPECT_NEAR(elliptic_k(2.0 / 3.0), 1.80966749548658849, 1e-14);
  EXPECT_NEAR(elliptic_k(2.0 / 3.0), oracle::complete_k_quadrature(2.0 / 3.0), 1e-12);
}

TEST(EllipticMu, SelfComplementaryModulus) {
  EXPECT_NEAR(elliptic_mu(1.0 / std::numbers::sqrt2), std::numbers::pi / 2, 1e-12);
}

TEST(EllipticMu, ReciprocalIdentity) {
  for (double t : {0.1, 0.3, 2.0 / 3.0, 0.9}) {
    const double tc = std::sqrt(1.0 - t * t);
    EXPECT_NEAR(elliptic_mu(t) * elliptic_mu(tc), std::pow(std::numbers::pi / 2, 2), 1e-12);
  }
}

TEST(EllipticMu, AgainstQuadrature) {
  const double t = 2.0 / 3.0;
  const double want =
      0.5 * std::numbers::pi * oracle::complete_k_quadrature(std::sqrt(1.0 - t * t)) / oracle::complete_k_quadrature(t);
  EXPECT_NEAR(elliptic_mu(t), want, 1e-12);
}

TEST(EllipseModel, Axes) {
  const EllipseModel m;
  EXPECT_NEAR(m.a() * m.a() - m.b() * m.b(), 1.0, 1e-12);
  EXPECT_NEAR(m.a(), 1.3613898316506745, 1e-13);
  EXPECT_NEAR(m.b(), 0.92378692008593187, 1e-13);
  EXPECT_GT(m.c1(), 0.0);
  EXPECT_NEAR(m.c2(), 1.0 / m.a(), 1e-15);
}

TEST(EllipseModel, LevelOneDomainIsTheEllipse) {
  // Scalar x = u + iv is a member exactly when (u/b)^2 + (v/a)^2 < 1.
  const EllipseModel m;
  const NCDomain dom = m.domain();
  for (int i = -15; i <= 15; ++i)
    for (int j = -15; j <= 15; ++j) {
      const cplx x{0.1 * i + 0.003, 0.1 * j + 0.004};
      const double q = std::pow(x.real() / m.b(), 2) + std::pow(x.imag() / m.a(), 2);
      if (std::abs(q - 1.0) < 1e-6) continue;
      EXPECT_EQ(dom.is_member(MatrixTuple{Matrix::scalar(x)}), q < 1.0) << x;
    }
}

TEST(EllipseModel, ForwardFixesZeroAndIsMonotoneOnRealAxis) {
  const EllipseModel m;
  EXPECT_EQ(m.sine_map(0.0), cplx{});
  EXPECT_EQ(m.forward(0.0), cplx{});
  double prev = -1e300;
  for (int k = 0; k < 100; ++k) {
    const double x = -0.99 + 1.98 * k / 99.0;
    const cplx s = m.sine_map(x);
    EXPECT_LE(std::abs(s.imag()), 1e-14);
    EXPECT_GT(s.real(), prev);
    EXPECT_LT(std::abs(s.real()), m.a());
    prev = s.real();
  }
}

TEST(EllipseModel, SineMapReferenceValues) {
  // Frozen from an arbitrary-precision evaluation.
  const EllipseModel m;
  const std::pair<cplx, cplx> ref[] = {
      {0.3, 0.324040735283809},
      {{0.2, 0.1}, {0.21295923962278275, 0.10835383853859873}},
      {0.8, 0.97292002007544944},
      {{0.85, 0.2}, {1.00619163956073149, 0.33374519677039834}},
      {{0.0, 0.95}, {0.0, 0.88775959116873380}},
      {{-0.7, 0.5}, {-0.68122906089247563, 0.63515715914740814}},
      {0.99, 1.33766734871556005},
      {{0.6, -0.7}, {0.51231224430808706, -0.78308463516023133}},
  };
  for (const auto& [z, w] : ref) EXPECT_LE(std::abs(m.sine_map(z) - w), 1e-12) << z;
}

TEST(EllipseModel, UnitCircleMapsToBoundary) {
  const EllipseModel m;
  const NCDomain dom = m.domain();
  for (int k = 0; k < 48; ++k) {
    const cplx z = std::polar(1.0 - 1e-9, 2.0 * std::numbers::pi * (k + 0.37) / 48.0);
    EXPECT_LE(std::abs(dom.boundary_distance(MatrixTuple{Matrix::scalar(m.forward(z))})), 1e-6) << z;
  }
}

TEST(EllipseModel, InvertRoundTrips) {
  const EllipseModel m;
  EXPECT_EQ(m.invert(0.0), cplx{});
  EXPECT_LE(std::abs(m.invert(m.forward(0.3)) - 0.3), 1e-11);
  EXPECT_LE(std::abs(m.invert(m.forward({0.2, 0.1})) - cplx{0.2, 0.1}), 1e-10);
  Rng rng(83);
  for (int trial = 0; trial < 50; ++trial) {
    const cplx z = std::polar(rng.uniform(0.0, 0.9), rng.uniform(0.0, 6.3));
    EXPECT_LE(std::abs(m.invert(m.forward(z)) - z), 1e-10) << z;
  }
}

TEST(EllipseModel, B1Basics) {
  const EllipseModel m;
  EXPECT_EQ(m.b1(0.0), cplx{});
  EXPECT_LE(std::abs(m.b1(0.2) - cplx{0.0, 0.20249164859749855}), 1e-11);
  EXPECT_LE(std::abs(m.b1({0.1, 0.3}) - cplx{-0.29449433313066012, 0.09247557332834118}), 1e-11);
  EXPECT_LE(std::abs(m.b1({0.0, -0.4}) - 0.38175334694168316), 1e-11);
}

TEST(EllipseModel, B1FourthIterateIsIdentity) {
  const EllipseModel m;
  cplx z = 0.2;
  for (int k = 0; k < 4; ++k) z = m.b1(z);
  EXPECT_LE(std::abs(z - 0.2), 1e-9);

  Rng rng(84);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const cplx start = m.forward(std::polar(rng.uniform(0.0, 0.85), rng.uniform(0.0, 6.3)));
    cplx w = start;
    for (int k = 0; k < 4; ++k) w = m.b1(w);
    worst = std::max(worst, std::abs(w - start));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(EllipseModel, B1DerivativeAtZeroIsI) {
  const EllipseModel m;
  const cplx d = oracle::scalar_central_difference([&](cplx z) { return m.b1(z); }, 0.0, 1e-5);
  EXPECT_LE(std::abs(d - cplx{0.0, 1.0}), 1e-8);
}

TEST(NonexistenceWitness, Constants) {
  const WitnessReport w = nonexistence_witness(EllipseModel{});
  EXPECT_NEAR(w.r0, EllipseReference::r0, EllipseReference::r0_tol);
  EXPECT_NEAR(w.min_eig, EllipseReference::min_eig, EllipseReference::min_eig_tol);
  EXPECT_NEAR(w.c3_over_c1, EllipseReference::c3_over_c1, EllipseReference::c3_tol);
  EXPECT_NEAR(w.c5_over_c1, EllipseReference::c5_over_c1, EllipseReference::c5_tol);
  // tighter, frozen values of this implementation
  EXPECT_NEAR(w.r0, 1.000333679, 1e-8);
  EXPECT_NEAR(w.min_eig, 0.0114903324, 1e-9);
}

TEST(NonexistenceWitness, TaylorStructure) {
  const WitnessReport w = nonexistence_witness(EllipseModel{});
  ASSERT_EQ(w.coeffs.size(), 7u);
  EXPECT_LE(std::abs(w.coeffs[0]), 1e-10);
  EXPECT_LE(std::abs(w.coeffs[2]), 1e-10);
  EXPECT_LE(std::abs(w.coeffs[4]), 1e-10);
  EXPECT_NEAR(std::abs(w.coeffs[1]), 1.0, 1e-6);
  // ratios are real: b1 commutes with conjugation up to the factor i
  EXPECT_LE(std::abs((w.coeffs[3] / w.coeffs[1]).imag()), 1e-8);
}

TEST(NonexistenceWitness, BoundaryPointIsOnBoundary) {
  const EllipseModel m;
  const WitnessReport w = nonexistence_witness(m);
  EXPECT_LE(std::abs(min_eigenvalue(m.pencil().lmi(MatrixTuple{Matrix::shift(4) * w.r0}))), 1e-10);
  EXPECT_FALSE(m.domain().is_member(MatrixTuple{Matrix::shift(4) * 1.1}));
}
