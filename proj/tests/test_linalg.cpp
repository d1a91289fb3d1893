#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <span>

#include "ulyap/projective.hpp"
#include "ulyap/spectrum.hpp"
#include "ulyap/transfer.hpp"

using namespace ulyap;

namespace {

const DisorderParam half(1.0 / std::sqrt(2.0));

Mat2C integer(long a, long b, long c, long d) {
  return {double(a), double(b), double(c), double(d)};
}

}  // namespace

TEST(TorusAngle, CanonicalRange) {
  EXPECT_DOUBLE_EQ(TorusAngle(-0.5).value(), two_pi - 0.5);
  EXPECT_DOUBLE_EQ(TorusAngle(7.0).value(), 7.0 - two_pi);
  EXPECT_EQ(TorusAngle(two_pi).value(), 0.0);
  EXPECT_NEAR(TorusAngle(3 * pi / 2).centered(), -pi / 2, 1e-15);
  EXPECT_THROW(TorusAngle(std::nan("")), std::invalid_argument);
}

TEST(TorusAngle, DistanceWrapsAround) {
  EXPECT_NEAR(TorusAngle::distance(TorusAngle(0.1), TorusAngle(two_pi - 0.1)), 0.2, 1e-15);
  EXPECT_TRUE(TorusAngle(1e-14) == TorusAngle(two_pi - 1e-14));
}

TEST(TorusAngle, QuarterTurnsAreExact) {
  EXPECT_EQ(TorusAngle(pi).unit(), cplx(-1.0, 0.0));
  EXPECT_EQ(TorusAngle(pi / 2).unit(), cplx(0.0, 1.0));
  EXPECT_EQ(TorusAngle(3 * pi / 2).unit(), cplx(0.0, -1.0));
}

TEST(DisorderParam, RejectsEndpoints) {
  EXPECT_THROW(DisorderParam(0.0), std::invalid_argument);
  EXPECT_THROW(DisorderParam(1.0), std::invalid_argument);
  EXPECT_NEAR(DisorderParam(0.6).r(), 0.8, 1e-15);
}

// At r = t the four {0, pi} matrices are integer.
TEST(Transfer, IntegerMatricesAtHalf) {
  const TorusAngle z(0.0), p(pi);
  EXPECT_LT(max_abs_diff(transfer_matrix(z, z, half), integer(-1, 0, 0, -1)), 1e-14);
  EXPECT_LT(max_abs_diff(transfer_matrix(p, p, half), integer(1, 2, 2, 5)), 1e-14);
  EXPECT_LT(max_abs_diff(transfer_matrix(p, z, half), integer(-1, -2, 0, 1)), 1e-14);
  EXPECT_LT(max_abs_diff(transfer_matrix(z, p, half), integer(1, 0, 2, -1)), 1e-14);
}

TEST(Transfer, DeterminantProperty) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> ang(0.0, two_pi), tt(0.05, 0.95);
  for (int i = 0; i < 2000; ++i) {
    const DisorderParam d(tt(gen));
    const TorusAngle th(ang(gen)), et(ang(gen));
    EXPECT_LT(std::abs(transfer_matrix(th, et, d).det() - (th - et).unit()), 1e-12);
  }
}

TEST(Transfer, StencilRowsAreUnitary) {
  const DisorderParam d(0.37);
  const BandWindow w = s_matrix_window(d, -10, 10);
  for (long i = -6; i <= 6; ++i) {
    for (long j = -6; j <= 6; ++j) {
      double dot = 0.0;
      for (long k = -10; k <= 10; ++k) dot += w.at(i, k) * w.at(j, k);
      EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-14) << i << "," << j;
    }
  }
}

TEST(Transfer, EigenRecursionResidual) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ang(0.0, two_pi);
  std::vector<TorusAngle> phases;
  for (int i = 0; i < 60; ++i) phases.emplace_back(ang(gen));
  const double res = verify_eigen_recursion(phases, TorusAngle(0.9), DisorderParam(0.4), Vec2C{1.0, cplx(0.3, 0.2)});
  EXPECT_LT(res, 1e-12);
}

TEST(Transfer, EigenRecursionStableUnderDoubling) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> ang(0.0, two_pi);
  std::vector<TorusAngle> phases;
  for (int i = 0; i < 200; ++i) phases.emplace_back(ang(gen));
  const DisorderParam d(0.9);
  const Vec2C c0{cplx(0.6, 0.8), 1.0};
  const std::span<const TorusAngle> all(phases);
  EXPECT_LT(verify_eigen_recursion(all.first(100), TorusAngle(2.0), d, c0), 1e-10);
  EXPECT_LT(verify_eigen_recursion(all, TorusAngle(2.0), d, c0), 1e-10);
}

TEST(Transfer, EigenRecursionFreeOperator) {
  for (double t : {0.3, 0.6}) {
    const DisorderParam d(t);
    const SpectralArc arc = spectral_arc(d);
    const TorusAngle lambda = arc.center + TorusAngle(0.5 * arc.half_width);
    ASSERT_TRUE(arc.contains(lambda));
    const std::vector<TorusAngle> zeros(100, TorusAngle(0.0));
    EXPECT_LT(verify_eigen_recursion(zeros, lambda, d, Vec2C{1.0, 0.0}), 1e-10) << t;
  }
}

TEST(Transfer, EigenRecursionDetectsCorruptStencil) {
  std::vector<TorusAngle> phases(40, TorusAngle(0.3));
  const DisorderParam d(0.6);
  EXPECT_LT(verify_eigen_recursion(phases, TorusAngle(1.0), d, Vec2C{1.0, 0.5}), 1e-12);
  const double bad = verify_eigen_recursion(phases, TorusAngle(1.0), d, Vec2C{1.0, 0.5},
                                            [](const DisorderParam& dp, long lo, long hi) {
                                              BandWindow b = s_matrix_window(dp, lo, hi);
                                              b.at(4, 4) += 1e-3;
                                              return b;
                                            });
  EXPECT_GT(bad, 1e-6);
}

TEST(Mat2, EigenvectorsSatisfyEquation) {
  const Mat2C m{cplx(1, 2), cplx(-0.5, 0.1), cplx(0.3, 0.0), cplx(2, -1)};
  const auto [l1, l2] = eigenvalues(m);
  EXPECT_GE(std::abs(l1), std::abs(l2));
  for (cplx l : {l1, l2}) {
    const Vec2C v = eigenvector(m, l);
    const Vec2C r = m * v - v * l;
    EXPECT_LT(r.norm2(), 1e-13);
    EXPECT_NEAR(v.norm2(), 1.0, 1e-14);
  }
}

TEST(Projective, ChartRoundTrip) {
  for (double u : {0.0, 0.4, 1.3, 3.0}) {
    for (double v : {0.0, 0.2, 0.7, pi / 2}) {
      const ProjPoint p = ProjPoint::from_chart(u, v);
      const auto [u2, v2] = p.chart();
      EXPECT_LT(proj_distance(p, ProjPoint::from_chart(u2, v2)), 1e-12);
      EXPECT_GE(u2, 0.0);
      EXPECT_LT(u2, pi);
      EXPECT_LE(v2, pi / 2 + 1e-15);
    }
  }
}

TEST(Projective, ScalingInvariance) {
  const Vec2C v{cplx(0.3, 1.0), cplx(-2.0, 0.5)};
  const ProjPoint a(v), b(v * cplx(-3.0, 7.0));
  EXPECT_TRUE(same_direction(a, b, 1e-14));
  EXPECT_NEAR(proj_distance(ProjPoint(1.0, 0.0), ProjPoint(0.0, 1.0)), 1.0, 1e-15);
  EXPECT_THROW(ProjPoint(0.0, 0.0), std::invalid_argument);
}

// Brute force: e^{i l} is in the spectrum of S iff the free transfer matrix at l
// has an eigenvalue on the unit circle, i.e. |tr T(l, l)| <= 2 with det 1.
TEST(Spectrum, ArcMatchesFreeTransferTrace) {
  for (double t : {0.2, 0.5, 1.0 / std::sqrt(2.0), 0.9}) {
    const DisorderParam d(t);
    const SpectralArc arc = spectral_arc(d);
    for (int i = 0; i < 720; ++i) {
      const TorusAngle l(two_pi * (i + 0.5) / 720);
      const double tr = std::abs(transfer_matrix(l, l, d).trace());
      if (std::abs(tr - 2.0) < 1e-6) continue;
      EXPECT_EQ(arc.contains(-l), tr < 2.0) << "t=" << t << " l=" << l.value();
    }
  }
}

TEST(Spectrum, UnionOfRotatedArcs) {
  const DisorderParam d(0.3);
  const auto mu = PhaseMeasure::bernoulli(TorusAngle(0.0), TorusAngle(pi), 0.5);
  const auto arcs = almost_sure_spectrum(mu, d);
  ASSERT_EQ(arcs.size(), 2u);
  const SpectralArc base = spectral_arc(d);
  for (const auto& a : arcs) EXPECT_NEAR(a.half_width, base.half_width, 1e-14);
  // Large t: arcs overlap into the full circle.
  const auto full = almost_sure_spectrum(mu, DisorderParam(0.9));
  ASSERT_EQ(full.size(), 1u);
  EXPECT_TRUE(full.front().full_circle());
}

TEST(Spectrum, MergedArcForCloseAtoms) {
  const DisorderParam d(0.1);
  const auto mu = PhaseMeasure::bernoulli(TorusAngle(0.0), TorusAngle(0.1), 0.5);
  const auto arcs = almost_sure_spectrum(mu, d);
  ASSERT_EQ(arcs.size(), 1u);
  EXPECT_NEAR(arcs[0].center.value(), 0.05, 1e-14);
  EXPECT_NEAR(arcs[0].half_width, std::acos(1.0 - 2.0 * 0.01) + 0.05, 1e-14);
}

TEST(Spectrum, BruteForceMembership) {
  const DisorderParam d(0.25);
  const auto mu = PhaseMeasure::finite({{TorusAngle(0.0), 0.3}, {TorusAngle(2.0), 0.3}, {TorusAngle(2.3), 0.4}});
  const auto arcs = almost_sure_spectrum(mu, d);
  const double w = std::acos(1.0 - 2.0 * 0.0625);
  for (int i = 0; i < 10000; ++i) {
    const TorusAngle phi(two_pi * (i + 0.5) / 10000);
    bool brute = false;
    for (const auto& a : mu.atoms()) brute = brute || TorusAngle::distance(phi, a.angle) <= w;
    bool in_arcs = false;
    for (const auto& a : arcs) in_arcs = in_arcs || a.contains(phi);
    EXPECT_EQ(brute, in_arcs) << phi.value();
  }
}
