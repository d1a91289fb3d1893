#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ulyap/cocycle.hpp"
#include "ulyap/lyapunov.hpp"
#include "ulyap/projective.hpp"

namespace ulyap {

struct PhiValue {
  double value = 0.0;
  double stderr = 0.0;  // 0 for the exact branch
  bool exact = false;
};

namespace detail {
inline double log_growth(const Mat2C& m, const ProjPoint& v) {
  const Vec2C& x = v.representative();
  return std::log((m * x).max_norm() / x.max_norm());
}
}  // namespace detail

/// Phi(lambda, v) = E ln(||T v|| / ||v||), max-norm. Finite laws use the exact
/// weighted sum over the factor table; otherwise a Monte Carlo average of
/// `samples` factors drawn from realization stream (seed, 0).
inline PhiValue phi(const Cocycle& cocycle, const ProjPoint& v, std::uint64_t samples = 4096,
                    std::uint64_t seed = 1) {
  if (!cocycle.table().empty()) {
    double sum = 0.0;
    for (const Factor& f : cocycle.table()) sum += f.prob * detail::log_growth(f.matrix, v);
    return {sum, 0.0, true};
  }
  if (samples < 2) throw std::invalid_argument("phi: Monte Carlo branch needs at least 2 samples");
  const RealizationStream s(seed, 0, cocycle.mode());
  std::vector<double> xs(samples);
  for (std::uint64_t k = 0; k < samples; ++k) xs[k] = detail::log_growth(cocycle.factor(s, k), v);
  const SampleStats st = mean_and_stderr(xs);
  return {st.mean, st.stderr, false};
}

/// Monte Carlo branch regardless of the measure kind (consistency checks).
inline PhiValue phi_monte_carlo(const Cocycle& cocycle, const ProjPoint& v, std::uint64_t samples,
                                std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("phi: Monte Carlo branch needs at least 2 samples");
  const RealizationStream s(seed, 0, cocycle.mode());
  std::vector<double> xs(samples);
  for (std::uint64_t k = 0; k < samples; ++k) xs[k] = detail::log_growth(cocycle.factor(s, k), v);
  const SampleStats st = mean_and_stderr(xs);
  return {st.mean, st.stderr, false};
}

inline PhiValue phi(TorusAngle lambda, const ProjPoint& v, const PhaseMeasure& mu, const DisorderParam& d,
                    Model model = Model::anderson, std::uint64_t samples = 4096, std::uint64_t seed = 1) {
  return phi(Cocycle(mu, d, lambda, model, false), v, samples, seed);
}

/// Counts on the 64 x 64 grid of the (u, v) chart, u in [0, pi), v in [0, pi/2].
class Histogram {
 public:
  static constexpr int bins = 64;

  void add(const ProjPoint& p) {
    const auto [u, v] = p.chart();
    const int iu = std::clamp(static_cast<int>(u / pi * bins), 0, bins - 1);
    const int iv = std::clamp(static_cast<int>(v / (0.5 * pi) * bins), 0, bins - 1);
    ++counts_[static_cast<std::size_t>(iu * bins + iv)];
    ++total_;
  }

  std::uint64_t total() const { return total_; }
  std::uint64_t count(int iu, int iv) const { return counts_[static_cast<std::size_t>(iu * bins + iv)]; }
  double mass(std::size_t cell) const { return total_ == 0 ? 0.0 : double(counts_[cell]) / double(total_); }

  /// Total variation distance between the normalized histograms.
  static double tv_distance(const Histogram& a, const Histogram& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.counts_.size(); ++i) s += std::abs(a.mass(i) - b.mass(i));
    return 0.5 * s;
  }

  /// Expected TV distance between two independent samples of sizes n1, n2
  /// from the pooled law (normal approximation per cell).
  static double tv_noise(const Histogram& a, const Histogram& b) {
    const double n1 = double(a.total_), n2 = double(b.total_);
    if (n1 == 0.0 || n2 == 0.0) return 1.0;
    double s = 0.0;
    for (std::size_t i = 0; i < a.counts_.size(); ++i) {
      const double p = double(a.counts_[i] + b.counts_[i]) / (n1 + n2);
      s += std::sqrt(p * (1.0 - p) * (1.0 / n1 + 1.0 / n2));
    }
    return 0.5 * std::sqrt(2.0 / pi) * s;
  }

 private:
  std::array<std::uint64_t, bins * bins> counts_{};
  std::uint64_t total_ = 0;
};

struct InvariantMeasureOptions {
  std::uint64_t burn_in = 1000;
  std::uint64_t samples = 20000;  // total over all orbits
  std::uint64_t orbits = 20;
  double atom_radius = 1e-6;      // proj_distance defining an atom
  double atom_mass_limit = 0.05;
  double drift_sigmas = 3.0;      // half-vs-half TV allowed above its noise level
  double drift_floor = 0.02;
};

/// Samples of nu_lambda from independent orbits, with convergence diagnostics.
struct EmpiricalMeasure {
  std::vector<ProjPoint> points;  // orbit-major: orbit j holds [j*per_orbit, (j+1)*per_orbit)
  std::uint64_t per_orbit = 0;
  Histogram histogram;
  double half_drift = 0.0;  // TV distance, first vs second half of each orbit
  double drift_noise = 0.0;
  double atom_mass = 0.0;
  bool reducible = false;   // the cocycle permutes a pair of lines
  bool converged = true;
  std::string diagnostic;
};

/// Orbit of a random initial direction under the random projective action,
/// after burn_in steps. Orbit j uses realization (seed, j); its start is drawn
/// from positions beyond the factors it consumes.
inline EmpiricalMeasure empirical_invariant_measure(const Cocycle& cocycle, std::uint64_t seed,
                                                    const InvariantMeasureOptions& opt = {}) {
  if (opt.orbits < 1 || opt.samples < 2 * opt.orbits) {
    throw std::invalid_argument("empirical_invariant_measure: need at least two samples per orbit");
  }
  EmpiricalMeasure out;
  out.per_orbit = opt.samples / opt.orbits;
  out.points.reserve(out.per_orbit * opt.orbits);
  Histogram first, second;
  const std::uint64_t steps = opt.burn_in + out.per_orbit;
  for (std::uint64_t j = 0; j < opt.orbits; ++j) {
    const RealizationStream s(seed, j, cocycle.mode());
    const double u0 = s.draw(2 * steps + 2) * pi;
    const double v0 = s.draw(2 * steps + 3) * 0.5 * pi;
    Vec2C x = ProjPoint::from_chart(u0, v0).representative();
    for (std::uint64_t k = 0; k < steps; ++k) {
      x = cocycle.factor(s, k) * x;
      x = x * (1.0 / x.max_norm());
      if (k >= opt.burn_in) {
        out.points.emplace_back(x);
        (k - opt.burn_in < out.per_orbit / 2 ? first : second).add(out.points.back());
        out.histogram.add(out.points.back());
      }
    }
  }
  out.half_drift = Histogram::tv_distance(first, second);
  out.drift_noise = Histogram::tv_noise(first, second);

  std::vector<ProjPoint> candidates;
  if (const auto& mb = cocycle.monomial()) {
    out.reducible = true;
    candidates.emplace_back(mb->basis.a11, mb->basis.a21);
    candidates.emplace_back(mb->basis.a12, mb->basis.a22);
  }
  for (std::size_t i = 0; i < out.points.size() && candidates.size() < 32; i += out.per_orbit) {
    candidates.push_back(out.points[i + out.per_orbit - 1]);
  }
  std::uint64_t in_atoms = 0;
  for (const ProjPoint& p : out.points) {
    for (const ProjPoint& c : candidates) {
      if (proj_distance(p, c) <= opt.atom_radius) {
        ++in_atoms;
        break;
      }
    }
  }
  out.atom_mass = double(in_atoms) / double(out.points.size());

  if (out.reducible) {
    out.converged = false;
    out.diagnostic = "reducible cocycle: the factors permute two fixed lines";
  } else if (out.atom_mass > opt.atom_mass_limit) {
    out.converged = false;
    out.diagnostic = "orbit mass concentrates on atoms";
  } else if (out.half_drift > opt.drift_sigmas * out.drift_noise + opt.drift_floor) {
    out.converged = false;
    out.diagnostic = "orbit histogram drifts between halves";
  }
  return out;
}

inline EmpiricalMeasure empirical_invariant_measure(TorusAngle lambda, const PhaseMeasure& mu, const DisorderParam& d,
                                                    std::uint64_t burn_in, std::uint64_t samples, std::uint64_t seed,
                                                    std::uint64_t orbits = 20, Model model = Model::anderson) {
  InvariantMeasureOptions opt;
  opt.burn_in = burn_in;
  opt.samples = samples;
  opt.orbits = orbits;
  return empirical_invariant_measure(Cocycle(mu, d, lambda, model), seed, opt);
}

/// One random step of the projective action applied to every sample.
inline Histogram push_forward(const Cocycle& cocycle, const EmpiricalMeasure& m, std::uint64_t seed) {
  Histogram h;
  const RealizationStream s(seed, 0, cocycle.mode());
  for (std::size_t i = 0; i < m.points.size(); ++i) h.add(act(cocycle.factor(s, i), m.points[i]));
  return h;
}

struct CrossCheckBudget {
  std::uint64_t n = 20000;
  std::uint64_t realizations = 200;
  InvariantMeasureOptions measure{};
  std::uint64_t phi_samples = 4096;  // Monte Carlo branch only
  unsigned workers = 0;
};

struct CrossCheckResult {
  LyapunovEstimate direct;
  double gamma_integral = 0.0;
  double integral_stderr = 0.0;  // batch means over orbits
  double combined_stderr = 0.0;
  bool flagged = false;
  bool agreement = false;
  std::string diagnostic;
};

/// gamma by the product estimator and by the integral of Phi over the
/// empirical invariant measure.
inline CrossCheckResult furstenberg_cross_check(TorusAngle lambda, const PhaseMeasure& mu, const DisorderParam& d,
                                                const CrossCheckBudget& budget, std::uint64_t seed,
                                                Model model = Model::anderson) {
  CrossCheckResult out;
  EngineOptions eo;
  eo.model = model;
  eo.workers = budget.workers;
  out.direct = estimate_lyapunov(lambda, mu, d, budget.n, budget.realizations, seed, eo);

  const Cocycle cocycle(mu, d, lambda, model);
  const EmpiricalMeasure nu = empirical_invariant_measure(cocycle, derive_seed(seed, 1), budget.measure);
  std::vector<double> orbit_means;
  for (std::size_t j = 0; j * nu.per_orbit < nu.points.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = j * nu.per_orbit; i < (j + 1) * nu.per_orbit; ++i) {
      acc += phi(cocycle, nu.points[i], budget.phi_samples, derive_seed(seed, 2 + i)).value;
    }
    orbit_means.push_back(acc / double(nu.per_orbit));
  }
  const SampleStats st = mean_and_stderr(orbit_means);
  out.gamma_integral = st.mean;
  out.integral_stderr = st.stderr;
  out.combined_stderr = std::hypot(out.direct.stderr, out.integral_stderr);
  if (!nu.converged) {
    out.flagged = true;
    out.diagnostic = nu.diagnostic;
    return out;
  }
  out.agreement = std::abs(out.direct.mean - out.gamma_integral) <= 3.0 * out.combined_stderr;
  return out;
}

}  // namespace ulyap
