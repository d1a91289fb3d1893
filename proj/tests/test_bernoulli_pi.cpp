#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "ulyap/bernoulli_pi.hpp"
#include "ulyap/lyapunov.hpp"

using namespace ulyap;

namespace {

const DisorderParam half(1.0 / std::sqrt(2.0));

// Exact law of x_n by dynamic programming over the four moves.
std::map<std::int64_t, double> chain_law(int n, double p) {
  const double q = 1.0 - p;
  std::map<std::int64_t, double> law{{0, 1.0}};
  for (int k = 0; k < n; ++k) {
    std::map<std::int64_t, double> next;
    for (const auto& [x, w] : law) {
      next[x] += w * p * p;
      next[x + 1] += w * q * q;
      next[-x] += w * p * q;
      next[-x - 1] += w * q * p;
    }
    law = std::move(next);
  }
  return law;
}

}  // namespace

TEST(PiBernoulli, Parameters) {
  const PiBernoulliParams pp(TorusAngle(0.4), 0.3, half);
  EXPECT_NEAR(pp.b().value(), 0.4 + pi, 1e-14);
  EXPECT_NEAR(pp.q(), 0.7, 1e-15);
  EXPECT_NEAR(pp.alpha(), 0.4, 1e-15);
  EXPECT_NEAR(pp.rho(), 3.0 + 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(pp.lambda().value(), two_pi - 0.4, 1e-14);
  EXPECT_THROW(PiBernoulliParams(TorusAngle(0.0), 0.0, half), std::invalid_argument);
  EXPECT_EQ(PiBernoulliParams(TorusAngle(0.0), 1.0, half).measure().atoms().size(), 1u);
}

TEST(PiBernoulli, ATableAcrossT) {
  for (double t : {0.2, 0.5, 0.8}) {
    const DisorderParam d(t);
    const double rho = (1.0 + d.r()) / (1.0 - d.r());
    const TorusAngle z(0.0), h(pi);
    EXPECT_LT(max_abs_diff(basis_change_A(z, z, d), Mat2C{-1.0, 0.0, 0.0, -1.0}), 1e-12);
    EXPECT_LT(max_abs_diff(basis_change_A(h, h, d), Mat2C::diag(rho, 1.0 / rho)) / rho, 1e-12);
    EXPECT_LT(max_abs_diff(basis_change_A(h, z, d), Mat2C{0.0, -1.0 / rho, -rho, 0.0}) / rho, 1e-12);
    EXPECT_LT(max_abs_diff(basis_change_A(z, h, d), Mat2C{0.0, 1.0, 1.0, 0.0}), 1e-12);
  }
}

TEST(PiBernoulli, MarkovMoves) {
  EXPECT_EQ(markov_step(3, {false, false}), 3);
  EXPECT_EQ(markov_step(3, {true, true}), 4);
  EXPECT_EQ(markov_step(3, {false, true}), -3);
  EXPECT_EQ(markov_step(3, {true, false}), -4);
}

TEST(PiBernoulli, ExactMomentsMatchDynamicProgramming) {
  for (double p : {0.25, 0.5, 0.75, 0.9}) {
    for (int n : {1, 2, 5, 30}) {
      double m1 = 0.0, m2 = 0.0;
      for (const auto& [x, w] : chain_law(n, p)) {
        m1 += w * double(x);
        m2 += w * double(x) * double(x);
      }
      const ChainMoments m = exact_moments(n, p);
      EXPECT_NEAR(m.mean, m1, 1e-12) << p << " " << n;
      EXPECT_NEAR(m.second, m2, 1e-10) << p << " " << n;
    }
  }
}

TEST(PiBernoulli, SymmetricCaseIsExactlyHalfN) {
  for (std::uint64_t n : {1ull, 7ull, 1000ull, 123456ull}) EXPECT_EQ(exact_moments(n, 0.5).second, double(n) / 2.0);
}

TEST(PiBernoulli, MonteCarloSecondMoment) {
  const PiBernoulliParams pp(TorusAngle(0.0), 0.25, half);
  const std::uint64_t n = 500, R = 4000;
  std::vector<double> sq(R);
  for (std::uint64_t r = 0; r < R; ++r) {
    const auto xs = simulate_chain(RealizationStream(8, r), pp, n);
    sq[r] = double(xs.back()) * double(xs.back());
  }
  const SampleStats s = mean_and_stderr(sq);
  EXPECT_LT(std::abs(s.mean - exact_moments(n, 0.25).second), 4.0 * s.stderr);
}

TEST(PiBernoulli, UpperBoundFormula) {
  const double n = 1e4;
  const double expected = std::log(3.0 + 2.0 * std::sqrt(2.0)) * std::sqrt(0.5) / std::sqrt(n);
  EXPECT_NEAR(gamma_upper_bound(10000, 0.5, half), expected, 1e-15);
}

TEST(PiBernoulli, ChainAgreesWithTransferProduct) {
  for (double t : {0.3, 1.0 / std::sqrt(2.0), 0.9}) {
    for (double a : {0.0, 1.3}) {
      const PiBernoulliParams pp(TorusAngle(a), 0.5, DisorderParam(t));
      for (std::uint64_t r = 0; r < 5; ++r) {
        EXPECT_LT(chain_vs_transfer_consistency(RealizationStream(4, r), pp, 2000), 1e-9) << t << " " << a;
      }
    }
  }
}

TEST(PiBernoulli, EngineMatchesChainLogNorm) {
  // ln ||T_n|| and |x_n| ln rho differ by a bounded basis-change constant.
  const PiBernoulliParams pp(TorusAngle(0.0), 0.5, half);
  const Cocycle c(pp.measure(), half, pp.lambda());
  const double bound = std::log(condition(pi_basis(half)));
  for (std::uint64_t r = 0; r < 20; ++r) {
    const RealizationStream s(12, r);
    const auto xs = simulate_chain(s, pp, 5000);
    const double chain = std::abs(double(xs.back())) * pp.log_rho();
    EXPECT_LE(std::abs(c.log_norm(s, 5000) - chain), bound + 1e-9) << r;
  }
}
