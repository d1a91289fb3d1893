#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ulyap/furstenberg.hpp"

using namespace ulyap;

namespace {

const DisorderParam half(1.0 / std::sqrt(2.0));

bool contains(const std::vector<TorusAngle>& v, double x, double tol = 1e-12) {
  for (const auto& p : v)
    if (p.approx_equal(TorusAngle(x), tol)) return true;
  return false;
}

}  // namespace

TEST(GroupWitness, ClosedFormsAreGroupProducts) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> ang(0.0, two_pi);
  for (int i = 0; i < 200; ++i) {
    const DisorderParam d(0.1 + 0.8 * (i % 9) / 8.0);
    const TorusAngle th(ang(gen)), et(ang(gen));
    const GroupWitness g = build_witness(th, et, d);
    const Mat2C ttt = transfer_matrix(th, th, d), tte = transfer_matrix(th, et, d), tet = transfer_matrix(et, th, d);
    EXPECT_LT(max_abs_diff(g.D, ttt * tte.inverse()), 1e-10);
    EXPECT_LT(max_abs_diff(g.E, tet.inverse() * ttt), 1e-10);
    EXPECT_LT(max_abs_diff(g.L, g.D * g.E), 1e-10);
    EXPECT_LT(max_abs_diff(g.J, g.E * g.D), 1e-10);
    EXPECT_LT(std::abs(g.L.det() - 1.0), 1e-10);
    EXPECT_LT(max_abs_diff(g.J.inverse(), g.L.adjoint()), 1e-10);
    EXPECT_LT(max_abs_diff(g.K, g.K.adjoint()) / std::max(1.0, g.K.max_abs()), 1e-12);
    EXPECT_GT(g.K.a11.real(), 0.0);
    EXPECT_NEAR(g.trace_K, g.trace_K_closed_form, 1e-10 * g.trace_K_closed_form);
  }
}

TEST(GroupWitness, TraceAtOppositePhases) {
  // 2 + (r^2 / t^4) |x conj(z) - 1|^4 with x conj(z) = -1, r^2 = t^2 = 1/2.
  const GroupWitness g = build_witness(TorusAngle(0.0), TorusAngle(pi), half);
  EXPECT_NEAR(g.trace_K, 34.0, 1e-12);
  EXPECT_TRUE(g.noncompact);
}

TEST(GroupWitness, EqualPhasesAreDegenerate) {
  const GroupWitness g = build_witness(TorusAngle(1.2), TorusAngle(1.2), half);
  EXPECT_TRUE(g.degenerate);
  EXPECT_FALSE(g.noncompact);
  EXPECT_NEAR(g.trace_K, 2.0, 1e-12);
}

TEST(PiCase, HyperbolicDirectionsAreEigenvectors) {
  const DisorderParam d(0.4);
  const PiCaseIrreducibility pc = pi_case_irreducibility(TorusAngle(0.0), TorusAngle(0.0), d);
  // At lambda = -a, T(pi, pi) fixes both lines and the images collapse.
  EXPECT_TRUE(pc.degenerate);
  const Mat2C tpp = transfer_matrix(TorusAngle(pi), TorusAngle(pi), d);
  EXPECT_TRUE(same_direction(act(tpp, pc.v_plus), pc.v_plus, 1e-12) ||
              same_direction(act(tpp, pc.v_plus), pc.v_minus, 1e-12));
}

TEST(PiCase, OffCriticalImagesAreDistinct) {
  for (double l : {0.3, 1.0, 2.0, 4.0}) {
    const PiCaseIrreducibility pc = pi_case_irreducibility(TorusAngle(l), TorusAngle(0.0), half);
    EXPECT_FALSE(pc.degenerate);
    EXPECT_TRUE(pc.distinct_images) << l;
  }
}

TEST(GeneralWitness, ThreeDistinctImages) {
  const ProjPoint dirs[] = {ProjPoint(0.0, 1.0), ProjPoint(1.0, half.ratio()), ProjPoint(1.0, 0.0),
                            ProjPoint(cplx(0.3, 0.4), 1.0)};
  for (const auto& v : dirs) {
    const auto w = general_irreducibility_witness(TorusAngle(0.7), TorusAngle(0.0), TorusAngle(pi / 2), half, v);
    EXPECT_TRUE(w.witnessed);
    EXPECT_EQ(w.orbit.size(), 3u);
  }
  const auto e = general_irreducibility_witness(TorusAngle(0.7), TorusAngle(0.0), TorusAngle(pi / 2), half,
                                                ProjPoint(0.0, 1.0));
  EXPECT_EQ(e.generator, 'E');
}

TEST(Dimer, TraceRegimes) {
  // tr = 2 - 4 cos(theta) at t = 1/sqrt(2).
  EXPECT_NEAR(dimer_trace(TorusAngle(pi / 3), half), 0.0, 1e-14);
  EXPECT_EQ(dimer_regime(dimer_trace(TorusAngle(pi), half)), DimerRegime::hyperbolic);
  EXPECT_EQ(dimer_regime(dimer_trace(TorusAngle(0.3), half)), DimerRegime::elliptic);
  EXPECT_EQ(dimer_regime(dimer_trace(TorusAngle(pi / 2), half)), DimerRegime::parabolic);
  for (double th : {0.1, 1.0, 2.5, 4.0}) {
    const DisorderParam d(0.35);
    EXPECT_NEAR(dimer_trace(TorusAngle(th), d), transfer_matrix(TorusAngle(th), TorusAngle(th), d).trace().real(),
                1e-12);
  }
}

TEST(Dimer, FormulaMatchesConjugation) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> ang(0.0, two_pi), tt(0.1, 0.9);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const DisorderParam d(tt(gen));
    const TorusAngle th(ang(gen)), et(ang(gen));
    if (std::abs(std::abs(dimer_trace(th, d)) - 2.0) < 1e-3) continue;
    const DimerConjugation c = dimer_conjugation(th, et, d);
    ASSERT_TRUE(c.conjugated);
    const double scale = std::max(1.0, c.F_conj.max_abs());
    EXPECT_LT(max_abs_diff(c.F, c.F_conj) / scale, 1e-10);
    EXPECT_LT(max_abs_diff(c.E_diag, Mat2C::diag(c.rho, 1.0 / c.rho)), 1e-10 * std::max(1.0, std::abs(c.rho)));
    EXPECT_LT(c.det_N_residual, 1e-10 * std::max(1.0, c.N.max_abs() * c.N.max_abs()));
    ++checked;
  }
  EXPECT_GT(checked, 400);
}

TEST(Dimer, ParabolicHasNoConjugation) {
  EXPECT_FALSE(dimer_conjugation(TorusAngle(pi / 2), TorusAngle(1.0), half).conjugated);
}

TEST(CriticalSet, CandidatesAtHalf) {
  const auto m = dimer_candidate_set(TorusAngle(0.0), half);
  ASSERT_EQ(m.size(), 4u);
  for (double x : {pi / 3, 5 * pi / 3, pi / 2, 3 * pi / 2}) EXPECT_TRUE(contains(m, x)) << x;
  // Shifting a shifts every candidate by -a.
  const auto m2 = dimer_candidate_set(TorusAngle(0.4), half);
  for (double x : {pi / 3, 5 * pi / 3, pi / 2, 3 * pi / 2}) EXPECT_TRUE(contains(m2, x - 0.4)) << x;
}

TEST(CriticalSet, GenericPairs) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ang(0.0, two_pi);
  for (int i = 0; i < 100; ++i) {
    const TorusAngle a(ang(gen)), b(ang(gen));
    const CriticalSet cs = dimer_critical_set(a, b, DisorderParam(0.55));
    EXPECT_TRUE(cs.intersection.empty());
    ASSERT_EQ(cs.points.size(), 2u);
    EXPECT_TRUE(contains(cs.points, (-a).value()));
    EXPECT_TRUE(contains(cs.points, (-b).value()));
  }
}

TEST(CriticalSet, ResonantPairHasIntersection) {
  // a = 0, b = pi/6: M_a = {pi/3, 5pi/3, pi/2, 3pi/2}, M_b = {pi/6, 3pi/2, pi/3, 4pi/3}.
  const TorusAngle a(0.0), b(pi / 6);
  const CriticalSet cs = dimer_critical_set(a, b, half);
  ASSERT_EQ(cs.intersection.size(), 2u);
  EXPECT_TRUE(contains(cs.intersection, pi / 3, 1e-10));
  EXPECT_TRUE(contains(cs.intersection, 3 * pi / 2, 1e-10));
  EXPECT_EQ(cs.points.size(), 4u);
  EXPECT_THROW(dimer_critical_set(a, a, half), std::invalid_argument);
}

// Largest norm of F E^{k_m} ... F E^{k_1} over all words with m <= len and k <= kmax.
double brute_force_max_norm(const Mat2C& E, const Mat2C& F, int len, int kmax) {
  std::vector<Mat2C> pow{Mat2C::identity()};
  for (int k = 1; k <= kmax; ++k) pow.push_back(E * pow.back());
  std::vector<Mat2C> layer{Mat2C::identity()};
  double best = 1.0;
  for (int m = 0; m < len; ++m) {
    std::vector<Mat2C> next;
    for (const auto& p : layer)
      for (const auto& e : pow) {
        next.push_back(F * e * p);
        best = std::max(best, next.back().norm());
      }
    layer = std::move(next);
  }
  return best;
}

TEST(OrbitWitness, GreedyWordIsAGroupElementAndGrows) {
  const TorusAngle lambda(1.0);
  const DimerConjugation c = dimer_conjugation(TorusAngle(0.0) + lambda, TorusAngle(0.3) + lambda, half);
  ASSERT_EQ(c.regime, DimerRegime::elliptic);
  const OrbitWitness w = dimer_noncompact_orbit_witness(c.E_diag, c.F, 1e6, 10000);
  ASSERT_TRUE(w.certified) << w.note;
  EXPECT_GT(w.min_step_gain, 1.0);
  Mat2C p = Mat2C::identity();
  for (int k : w.word) {
    Mat2C e = Mat2C::identity();
    for (int i = 0; i < k; ++i) e = c.E_diag * e;
    p = c.F * e * p;
  }
  EXPECT_LT(max_abs_diff(p, w.product) / p.max_abs(), 1e-9);
  EXPECT_GT(p.norm(), 1e6);
}

TEST(OrbitWitness, NotBeatenByExhaustiveShortWords) {
  const TorusAngle lambda(1.0);
  const DimerConjugation c = dimer_conjugation(TorusAngle(0.0) + lambda, TorusAngle(0.3) + lambda, half);
  const OrbitWitness w = dimer_noncompact_orbit_witness(c.E_diag, c.F, 1e300, 3, 20);
  ASSERT_EQ(w.word.size(), 3u);
  const double brute = brute_force_max_norm(c.E_diag, c.F, 3, 20);
  EXPECT_GE(brute * (1 + 1e-12), w.achieved_norm);
  EXPECT_GT(brute, 1.0);
}

TEST(OrbitWitness, DiagonalFHasNoWitness) {
  const Mat2C e = Mat2C::diag(std::polar(1.0, 0.7), std::polar(1.0, -0.7));
  const Mat2C f = Mat2C::diag(cplx(0.0, 1.0), cplx(0.0, -1.0));
  const OrbitWitness w = dimer_noncompact_orbit_witness(e, f, 10.0, 100);
  EXPECT_FALSE(w.certified);
  EXPECT_NEAR(brute_force_max_norm(e, f, 4, 10), 1.0, 1e-12);
}

TEST(DimerIrreducibility, GenericPointWitnessed) {
  const auto w = dimer_irreducibility_witness(TorusAngle(1.0), TorusAngle(0.0), TorusAngle(0.3), half);
  EXPECT_TRUE(w.witnessed) << w.note;
}
