#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ulyap/mat2.hpp"

namespace ulyap {

/// A direction in P(C^2). The stored representative has max-norm 1 and its
/// first non-zero entry real and positive, so equal directions share one
/// representative up to roundoff.
class ProjPoint {
 public:
  static constexpr double distinct_tolerance = 1e-8;

  explicit ProjPoint(Vec2C v) : rep_(canonicalize(v)) {}
  ProjPoint(cplx x, cplx y) : ProjPoint(Vec2C{x, y}) {}

  const Vec2C& representative() const { return rep_; }

  /// Coordinates (u, v) of the chart e_(u,v) = (e^{iu} cos v, e^{-iu} sin v).
  /// The chart covers every direction twice; this picks v in [0, pi/2] and u in [0, pi).
  std::pair<double, double> chart() const {
    const double ax = modulus(rep_.x);
    const double ay = modulus(rep_.y);
    const double v = std::atan2(ay, ax);
    if (ax == 0.0 || ay == 0.0) return {0.0, v};
    // y/x = e^{-2iu} tan v
    double u = -0.5 * std::arg(rep_.y / rep_.x);
    u = std::fmod(u, pi);
    if (u < 0) u += pi;
    if (u >= pi) u = 0.0;
    return {u, v};
  }

  static ProjPoint from_chart(double u, double v) {
    return ProjPoint(Vec2C{std::polar(1.0, u) * std::cos(v), std::polar(1.0, -u) * std::sin(v)});
  }

 private:
  static Vec2C canonicalize(Vec2C v) {
    if (!std::isfinite(v.x.real()) || !std::isfinite(v.x.imag()) || !std::isfinite(v.y.real()) ||
        !std::isfinite(v.y.imag())) {
      throw std::invalid_argument("ProjPoint: non-finite representative");
    }
    const double m = v.max_norm();
    if (m == 0.0) throw std::invalid_argument("ProjPoint: zero vector has no direction");
    v = v * (1.0 / m);
    // Rotate the first entry that is non-negligible onto the positive real axis.
    const cplx lead = modulus(v.x) > 1e-300 ? v.x : v.y;
    const cplx phase = std::conj(lead) / modulus(lead);
    v = v * phase;
    if (modulus(v.x) > 1e-300) v.x = modulus(v.x);
    else v.y = modulus(v.y);
    return v;
  }

  Vec2C rep_;
};

/// sqrt(1 - |<v,w>|^2 / (|v|^2 |w|^2)), the sine of the angle between the lines.
inline double proj_distance(const ProjPoint& a, const ProjPoint& b) {
  const Vec2C& v = a.representative();
  const Vec2C& w = b.representative();
  const double vv = std::norm(v.x) + std::norm(v.y);
  const double ww = std::norm(w.x) + std::norm(w.y);
  // |v|^2|w|^2 - |<v,w>|^2 = |v1 w2 - v2 w1|^2 (Lagrange identity) avoids cancellation.
  const double cross = std::norm(v.x * w.y - v.y * w.x);
  return std::clamp(std::sqrt(cross / (vv * ww)), 0.0, 1.0);
}

inline bool same_direction(const ProjPoint& a, const ProjPoint& b,
                           double tol = ProjPoint::distinct_tolerance) {
  return proj_distance(a, b) <= tol;
}

/// The projective action A v = direction of A v.
inline ProjPoint act(const Mat2C& m, const ProjPoint& p) {
  if (modulus(m.det()) <= 1e-14) throw std::domain_error("act: singular matrix");
  return ProjPoint(m * p.representative());
}

}  // namespace ulyap
