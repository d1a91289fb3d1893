#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ulyap/cocycle.hpp"
#include "ulyap/parallel.hpp"

namespace ulyap {

struct EngineOptions {
  Model model = Model::anderson;
  unsigned workers = 0;           // 0: hardware concurrency
  bool exploit_structure = true;  // use the exact monomial path when the cocycle admits one
};

/// Monte Carlo estimate of gamma(lambda) = lim E ln||T_n|| / n.
struct LyapunovEstimate {
  TorusAngle lambda;
  double mean = 0.0;    // nats per 2-step
  double stderr = 0.0;  // sample sd over realizations / sqrt(R)
  std::uint64_t n = 0;
  std::uint64_t realizations = 0;
};

struct SampleStats {
  double mean = 0.0;
  double stderr = 0.0;
};

inline SampleStats mean_and_stderr(std::span<const double> xs) {
  if (xs.empty()) return {};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return {mean, sd / std::sqrt(static_cast<double>(xs.size()))};
}

struct LogNormResult {
  double log_norm = 0.0;
  double sup_log_norm = 0.0;
  std::vector<double> history;  // partial ln||T_k||, k = 1..n, when requested
};

/// ln||T_n|| for one realization, without overflow.
inline LogNormResult renormalized_log_norm(const RealizationStream& stream, TorusAngle lambda, const PhaseMeasure& mu,
                                           const DisorderParam& d, std::uint64_t n, bool record_history = false,
                                           const EngineOptions& opt = {}) {
  if (n < 1) throw std::invalid_argument("renormalized_log_norm: n must be >= 1");
  const Cocycle cocycle(mu, d, lambda, opt.model, opt.exploit_structure);
  const std::uint64_t cp[1] = {n};
  LogNormPath path = cocycle.run(stream, cp, true, record_history);
  return {path.at_checkpoint.front(), path.sup, std::move(path.history)};
}

/// ln||T_n|| per realization at each checkpoint: result[c][r].
struct LogNormSamples {
  std::vector<std::vector<double>> at_checkpoint;
  std::vector<double> sup;  // per realization, when tracked
};

inline LogNormSamples sample_log_norms(const Cocycle& cocycle, std::span<const std::uint64_t> checkpoints,
                                       std::uint64_t realizations, std::uint64_t seed, unsigned workers,
                                       bool track_sup = false) {
  LogNormSamples out;
  out.at_checkpoint.assign(checkpoints.size(), std::vector<double>(realizations));
  out.sup.assign(track_sup ? realizations : 0, 0.0);
  parallel_for(realizations, workers, [&](std::size_t r) {
    const RealizationStream stream(seed, r, cocycle.mode());
    const LogNormPath path = cocycle.run(stream, checkpoints, track_sup);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) out.at_checkpoint[c][r] = path.at_checkpoint[c];
    if (track_sup) out.sup[r] = path.sup;
  });
  return out;
}

inline LyapunovEstimate summarize(TorusAngle lambda, std::span<const double> log_norms, std::uint64_t n) {
  std::vector<double> rates(log_norms.begin(), log_norms.end());
  for (double& x : rates) x /= static_cast<double>(n);
  const SampleStats s = mean_and_stderr(rates);
  return {lambda, s.mean, s.stderr, n, rates.size()};
}

inline void check_budget(std::uint64_t n, std::uint64_t realizations) {
  if (n < 1) throw std::invalid_argument("chain length n must be >= 1");
  if (realizations < 2) throw std::invalid_argument("need at least 2 realizations");
}

inline LyapunovEstimate estimate_lyapunov(TorusAngle lambda, const PhaseMeasure& mu, const DisorderParam& d,
                                          std::uint64_t n, std::uint64_t realizations, std::uint64_t seed,
                                          const EngineOptions& opt = {}) {
  check_budget(n, realizations);
  const Cocycle cocycle(mu, d, lambda, opt.model, opt.exploit_structure);
  const std::uint64_t cp[1] = {n};
  const LogNormSamples s = sample_log_norms(cocycle, cp, realizations, seed, opt.workers);
  return summarize(lambda, s.at_checkpoint.front(), n);
}

/// (1/n) E((ln||T_n||)^2) with its standard error.
inline SampleStats second_moment_stats(std::span<const double> log_norms, std::uint64_t n) {
  std::vector<double> sq(log_norms.begin(), log_norms.end());
  for (double& x : sq) x = x * x / static_cast<double>(n);
  return mean_and_stderr(sq);
}

inline double estimate_second_moment(TorusAngle lambda, const PhaseMeasure& mu, const DisorderParam& d,
                                     std::uint64_t n, std::uint64_t realizations, std::uint64_t seed,
                                     const EngineOptions& opt = {}) {
  check_budget(n, realizations);
  const Cocycle cocycle(mu, d, lambda, opt.model, opt.exploit_structure);
  const std::uint64_t cp[1] = {n};
  const LogNormSamples s = sample_log_norms(cocycle, cp, realizations, seed, opt.workers);
  return second_moment_stats(s.at_checkpoint.front(), n).mean;
}

enum class Regime { positive, diffusive_critical, bounded_critical, inconclusive };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::positive: return "positive";
    case Regime::diffusive_critical: return "diffusive-critical";
    case Regime::bounded_critical: return "bounded-critical";
    case Regime::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct AnomalyThresholds {
  double positive_sigmas = 5.0;     // gamma > positive_sigmas * stderr ...
  double positive_floor = 1e-3;     // ... and gamma > positive_floor, at every rung
  double positive_drift = 0.25;     // relative spread of gamma across the ladder
  double diffusive_drift = 0.10;    // relative spread of gamma sqrt(n) and of the second moment per n
  double bounded_log_norm = std::log(50.0);
};

struct ClassificationBudget {
  std::vector<std::uint64_t> ladder{1000, 10000, 100000};
  std::uint64_t realizations = 1000;
  std::uint64_t seed = 1;
  EngineOptions engine{};
};

struct LadderRung {
  std::uint64_t n = 0;
  LyapunovEstimate gamma;
  SampleStats second_moment;  // per n
};

struct AnomalyReport {
  TorusAngle lambda;
  LyapunovEstimate gamma_hat;        // at the top of the ladder
  double second_moment_per_n = 0.0;  // at the top of the ladder
  double sup_norm_log = 0.0;         // max over realizations and k <= n_max of ln||T_k||
  Regime classification = Regime::inconclusive;
  std::vector<LadderRung> ladder;
};

namespace detail {
inline double relative_spread(std::span<const double> xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  return scale == 0.0 ? 0.0 : (*hi - *lo) / scale;
}
}  // namespace detail

/// Deterministic regime classification from ladder statistics, checked in the
/// order bounded, positive, diffusive.
inline Regime classify(const std::vector<LadderRung>& ladder, double sup_norm_log, const AnomalyThresholds& th) {
  if (ladder.empty()) return Regime::inconclusive;
  if (sup_norm_log < th.bounded_log_norm) return Regime::bounded_critical;

  std::vector<double> gammas, scaled, moments;
  bool significant = true;
  bool moments_positive = true;
  for (const auto& rung : ladder) {
    const double g = rung.gamma.mean;
    significant = significant && g > th.positive_sigmas * rung.gamma.stderr && g > th.positive_floor;
    moments_positive = moments_positive && rung.second_moment.mean > th.positive_sigmas * rung.second_moment.stderr;
    gammas.push_back(g);
    scaled.push_back(g * std::sqrt(static_cast<double>(rung.n)));
    moments.push_back(rung.second_moment.mean);
  }
  if (ladder.size() < 2) return significant ? Regime::positive : Regime::inconclusive;
  if (significant && detail::relative_spread(gammas) <= th.positive_drift) return Regime::positive;
  if (moments_positive && detail::relative_spread(scaled) <= th.diffusive_drift &&
      detail::relative_spread(moments) <= th.diffusive_drift) {
    return Regime::diffusive_critical;
  }
  return Regime::inconclusive;
}

/// Runs the n-ladder on common realizations (each chain is read at every rung).
inline AnomalyReport classify_quasi_energy(TorusAngle lambda, const PhaseMeasure& mu, const DisorderParam& d,
                                           const AnomalyThresholds& th, const ClassificationBudget& budget) {
  std::vector<std::uint64_t> ladder = budget.ladder;
  if (ladder.empty()) throw std::invalid_argument("classify_quasi_energy: empty n-ladder");
  std::sort(ladder.begin(), ladder.end());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
  check_budget(ladder.front(), budget.realizations);

  const Cocycle cocycle(mu, d, lambda, budget.engine.model, budget.engine.exploit_structure);
  const LogNormSamples s =
      sample_log_norms(cocycle, ladder, budget.realizations, budget.seed, budget.engine.workers, true);

  AnomalyReport report;
  report.lambda = lambda;
  for (std::size_t c = 0; c < ladder.size(); ++c) {
    report.ladder.push_back(
        {ladder[c], summarize(lambda, s.at_checkpoint[c], ladder[c]), second_moment_stats(s.at_checkpoint[c], ladder[c])});
  }
  report.gamma_hat = report.ladder.back().gamma;
  report.second_moment_per_n = report.ladder.back().second_moment.mean;
  report.sup_norm_log = *std::max_element(s.sup.begin(), s.sup.end());
  report.classification = classify(report.ladder, report.sup_norm_log, th);
  return report;
}

/// One estimate per grid point. Point i uses seed derive_seed(seed, i), so a
/// one-point grid reproduces estimate_lyapunov exactly.
inline std::vector<LyapunovEstimate> sweep(std::span<const TorusAngle> grid, const PhaseMeasure& mu,
                                           const DisorderParam& d, std::uint64_t n, std::uint64_t realizations,
                                           std::uint64_t seed, const EngineOptions& opt = {}) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  std::vector<LyapunovEstimate> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.push_back(estimate_lyapunov(grid[i], mu, d, n, realizations, derive_seed(seed, i), opt));
  }
  return out;
}

/// Evenly spaced grid of count points from start to stop inclusive.
inline std::vector<TorusAngle> linear_grid(double start, double stop, std::size_t count) {
  if (count == 0) throw std::invalid_argument("linear_grid: empty grid");
  std::vector<TorusAngle> g;
  g.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    g.emplace_back(start + f * (stop - start));
  }
  return g;
}

}  // namespace ulyap
