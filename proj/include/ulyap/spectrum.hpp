#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ulyap/measure.hpp"
#include "ulyap/torus.hpp"

namespace ulyap {

/// Closed arc {e^{i phi} : dist(phi, center) <= half_width}; half_width = pi is the full circle.
struct SpectralArc {
  TorusAngle center;
  double half_width = 0.0;

  bool full_circle() const { return half_width >= pi; }
  bool contains(TorusAngle phi, double tol = 1e-12) const {
    return TorusAngle::distance(center, phi) <= half_width + tol;
  }
};

/// Spectrum of the free operator S(t): the arc of half-width arccos(1 - 2t^2) about 1.
inline SpectralArc spectral_arc(const DisorderParam& d) {
  const double t = d.t();
  return {TorusAngle(0.0), std::acos(std::clamp(1.0 - 2.0 * t * t, -1.0, 1.0))};
}

/// Almost-sure spectrum exp(i supp mu) Sigma(t) as disjoint arcs sorted by center.
inline std::vector<SpectralArc> almost_sure_spectrum(const PhaseMeasure& mu, const DisorderParam& d,
                                                     double touch_tol = 1e-12) {
  if (!mu.is_finite()) {
    throw std::invalid_argument("almost_sure_spectrum: only finitely supported measures are supported");
  }
  const SpectralArc base = spectral_arc(d);
  const SpectralArc full{TorusAngle(0.0), pi};
  if (base.full_circle()) return {full};

  struct Interval {
    double lo, hi;
  };
  std::vector<Interval> iv;
  for (const auto& atom : mu.atoms()) {
    const double lo = TorusAngle(atom.angle.value() - base.half_width).value();
    iv.push_back({lo, lo + 2.0 * base.half_width});
  }
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

  std::vector<Interval> merged{iv.front()};
  for (std::size_t i = 1; i < iv.size(); ++i) {
    if (iv[i].lo <= merged.back().hi + touch_tol) merged.back().hi = std::max(merged.back().hi, iv[i].hi);
    else merged.push_back(iv[i]);
  }
  // Close the circle: the last interval may run past 2pi into the first ones.
  while (merged.size() > 1 && merged.back().hi + touch_tol >= merged.front().lo + two_pi) {
    merged.back().hi = std::max(merged.back().hi, merged.front().hi + two_pi);
    merged.erase(merged.begin());
  }
  std::vector<SpectralArc> arcs;
  for (const auto& m : merged) {
    if (m.hi - m.lo >= two_pi - touch_tol) return {full};
    arcs.push_back({TorusAngle(0.5 * (m.lo + m.hi)), 0.5 * (m.hi - m.lo)});
  }
  std::sort(arcs.begin(), arcs.end(),
            [](const SpectralArc& a, const SpectralArc& b) { return a.center.value() < b.center.value(); });
  return arcs;
}

}  // namespace ulyap
