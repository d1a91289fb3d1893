#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ulyap/furstenberg.hpp"
#include "ulyap/lyapunov.hpp"
#include "ulyap/spectrum.hpp"

namespace ulyap {

/// Dimer model with mu = p delta_a + q delta_b.
class DimerParams {
 public:
  DimerParams(TorusAngle a, TorusAngle b, double p, const DisorderParam& d) : a_(a), b_(b), p_(p), d_(d) {
    if (a.approx_equal(b)) throw std::invalid_argument("DimerParams: a and b must differ");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("DimerParams: p must lie in (0, 1]");
  }

  TorusAngle a() const { return a_; }
  TorusAngle b() const { return b_; }
  double p() const { return p_; }
  double q() const { return 1.0 - p_; }
  const DisorderParam& disorder() const { return d_; }

  /// p == 1 collapses to delta_a.
  PhaseMeasure measure() const { return p_ < 1.0 ? PhaseMeasure::bernoulli(a_, b_, p_) : PhaseMeasure::dirac(a_); }

 private:
  TorusAngle a_, b_;
  double p_;
  DisorderParam d_;
};

/// ln ||T_n|| for n dimer factors T(omega_k + lambda, omega_k + lambda).
inline double dimer_transfer_product(const RealizationStream& stream, TorusAngle lambda, const PhaseMeasure& mu,
                                     const DisorderParam& d, std::uint64_t n) {
  if (stream.mode() != StreamMode::dimer) throw std::invalid_argument("dimer_transfer_product: needs a dimer stream");
  EngineOptions opt;
  opt.model = Model::dimer;
  return renormalized_log_norm(stream, lambda, mu, d, n, false, opt).log_norm;
}

enum class DimerCase { in_spectrum, in_resolvent };

struct DimerCritical {
  double value = 0.0;
  DimerCase which = DimerCase::in_spectrum;
  bool boundary = false;  // |tr T(b-a, b-a)| = 2: arc endpoint, classified in_spectrum
  double trace = 0.0;
};

/// gamma(-a) for the Bernoulli dimer: 0 when e^{i(b-a)} lies in the arc of S,
/// q ln(spectral radius of T(b-a, b-a)) otherwise.
inline DimerCritical dimer_gamma_critical(const DimerParams& params, double boundary_tol = 1e-12) {
  const TorusAngle eta = params.b() - params.a();
  DimerCritical out;
  out.trace = dimer_trace(eta, params.disorder());
  const double excess = std::abs(out.trace) - 2.0;
  out.boundary = std::abs(excess) <= boundary_tol;
  if (excess <= boundary_tol) {
    out.which = DimerCase::in_spectrum;
    return out;
  }
  out.which = DimerCase::in_resolvent;
  out.value = params.q() * std::log(spectral_radius(transfer_matrix(eta, eta, params.disorder())));
  return out;
}

/// Eigenbasis V of an elliptic T(eta, eta) and the bound ln(||V|| ||V^-1||)
/// on ln ||T^m|| for every m.
inline double dimer_conditioning_bound(TorusAngle eta, const DisorderParam& d) {
  if (dimer_regime(dimer_trace(eta, d)) != DimerRegime::elliptic) {
    throw std::invalid_argument("dimer_conditioning_bound: T(eta, eta) must be elliptic");
  }
  const Mat2C m = transfer_matrix(eta, eta, d);
  const auto [l1, l2] = eigenvalues(m);
  const Vec2C v1 = eigenvector(m, l1), v2 = eigenvector(m, l2);
  return std::log(condition(Mat2C{v1.x, v2.x, v1.y, v2.y}));
}

/// ln ||T(eta, eta)^m|| through the eigen-decomposition, valid for any m.
inline double dimer_power_log_norm(TorusAngle eta, const DisorderParam& d, std::uint64_t m) {
  if (m == 0) return 0.0;
  const Mat2C t = transfer_matrix(eta, eta, d);
  const auto [l1, l2] = eigenvalues(t);
  if (std::abs(l1 - l2) <= 1e-8) throw std::invalid_argument("dimer_power_log_norm: parabolic matrix");
  const Vec2C v1 = eigenvector(t, l1), v2 = eigenvector(t, l2);
  const Mat2C v{v1.x, v2.x, v1.y, v2.y};
  const double md = static_cast<double>(m);
  const double g1 = md * std::log(std::abs(l1)), g2 = md * std::log(std::abs(l2));
  const double top = std::max(g1, g2);
  const cplx w1 = std::polar(std::exp(g1 - top), md * std::arg(l1));
  const cplx w2 = std::polar(std::exp(g2 - top), md * std::arg(l2));
  return top + std::log((v * Mat2C::diag(w1, w2) * v.inverse()).norm());
}

/// Number of b-draws among the first n dimer factors of a realization.
inline std::uint64_t dimer_b_count(const RealizationStream& s, const DimerParams& params, std::uint64_t n) {
  const PhaseMeasure mu = params.measure();
  std::uint64_t m = 0;
  for (std::uint64_t k = 0; k < n; ++k) m += mu.atom_index(s.site_uniform(2 * k)) == 1 ? 1 : 0;
  return m;
}

struct BoundednessCheck {
  double sup_log_norm = 0.0;  // over realizations and n <= n_max
  double bound = 0.0;         // ln cond(V)
  bool bounded = false;
};

/// sup_{n <= n_max} ln ||T_n|| at lambda = -a with |a - b| strictly inside the arc.
inline BoundednessCheck dimer_boundedness_check(const DimerParams& params, std::uint64_t n_max, std::uint64_t seed,
                                                std::uint64_t realizations = 1, unsigned workers = 0) {
  const TorusAngle eta = params.b() - params.a();
  BoundednessCheck out;
  out.bound = dimer_conditioning_bound(eta, params.disorder());
  const Cocycle cocycle(params.measure(), params.disorder(), -params.a(), Model::dimer);
  const std::uint64_t cp[1] = {n_max};
  const LogNormSamples s = sample_log_norms(cocycle, cp, realizations, seed, workers, true);
  out.sup_log_norm = *std::max_element(s.sup.begin(), s.sup.end());
  out.bounded = out.sup_log_norm <= out.bound + 1e-9;
  return out;
}

struct DimerSweepPoint {
  AnomalyReport report;
  bool near_critical = false;  // within 1e-6 of the critical set M
};

/// classify_quasi_energy with dimer streams on the ladder {n/100, n/10, n};
/// point i uses derive_seed(seed, i).
inline std::vector<DimerSweepPoint> dimer_sweep(std::span<const TorusAngle> grid, const DimerParams& params,
                                                std::uint64_t n, std::uint64_t realizations, std::uint64_t seed,
                                                const AnomalyThresholds& th = {}, unsigned workers = 0) {
  if (grid.empty()) throw std::invalid_argument("dimer_sweep: empty grid");
  if (n < 100) throw std::invalid_argument("dimer_sweep: n must be at least 100");
  const CriticalSet crit = dimer_critical_set(params.a(), params.b(), params.disorder());
  ClassificationBudget budget;
  budget.ladder = {n / 100, n / 10, n};
  budget.realizations = realizations;
  budget.engine.model = Model::dimer;
  budget.engine.workers = workers;
  std::vector<DimerSweepPoint> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    budget.seed = derive_seed(seed, i);
    DimerSweepPoint pt;
    pt.report = classify_quasi_energy(grid[i], params.measure(), params.disorder(), th, budget);
    for (const auto& m : crit.points) pt.near_critical = pt.near_critical || grid[i].approx_equal(m, 1e-6);
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace ulyap
