#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ulyap {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// A point of the torus R / 2piZ, stored as its representative in [0, 2pi).
class TorusAngle {
 public:
  /// Two angles closer than this (circularly) compare equal.
  static constexpr double equality_tolerance = 1e-12;

  constexpr TorusAngle() = default;
  explicit TorusAngle(double radians) : value_(canonical(radians)) {}

  double value() const { return value_; }

  /// Representative in (-pi, pi].
  double centered() const { return value_ > pi ? value_ - two_pi : value_; }

  /// e^{i value}. Quarter turns evaluate to exact +-1, +-i so that the
  /// transfer matrices at phases {0, pi/2, pi, 3pi/2} keep their exact
  /// real/imaginary structure.
  cplx unit() const {
    for (int k = 0; k < 4; ++k) {
      if (std::abs(value_ - k * (pi / 2)) <= snap_tolerance) return quarter_turn(k);
    }
    if (two_pi - value_ <= snap_tolerance) return {1.0, 0.0};
    return {std::cos(value_), std::sin(value_)};
  }

  /// Circular distance in [0, pi].
  static double distance(TorusAngle a, TorusAngle b) {
    const double d = std::abs(a.value_ - b.value_);
    return d > pi ? two_pi - d : d;
  }

  bool approx_equal(TorusAngle other, double tol = equality_tolerance) const {
    return distance(*this, other) <= tol;
  }

  friend bool operator==(TorusAngle a, TorusAngle b) { return a.approx_equal(b); }

  friend TorusAngle operator+(TorusAngle a, TorusAngle b) { return TorusAngle(a.value_ + b.value_); }
  friend TorusAngle operator-(TorusAngle a, TorusAngle b) { return TorusAngle(a.value_ - b.value_); }
  TorusAngle operator-() const { return TorusAngle(-value_); }
  TorusAngle& operator+=(TorusAngle o) { return *this = *this + o; }

 private:
  static constexpr double snap_tolerance = 4e-15;

  static double canonical(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("TorusAngle: non-finite angle");
    double v = std::fmod(x, two_pi);
    if (v < 0) v += two_pi;
    if (v >= two_pi) v = 0.0;
    return v;
  }

  static cplx quarter_turn(int k) {
    switch (k) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }

  double value_ = 0.0;
};

/// The coupling pair (t, r) of the free operator, r = sqrt(1 - t^2), 0 < t < 1.
class DisorderParam {
 public:
  explicit DisorderParam(double t) : t_(t) {
    if (!(t > 0.0 && t < 1.0)) {
      throw std::invalid_argument("DisorderParam: t must lie strictly inside (0, 1), got " +
                                  std::to_string(t));
    }
    // (1-t)(1+t) keeps r accurate as t -> 1.
    r_ = std::sqrt((1.0 - t) * (1.0 + t));
  }

  double t() const { return t_; }
  double r() const { return r_; }
  /// r / t, the ubiquitous off-diagonal ratio.
  double ratio() const { return r_ / t_; }

 private:
  double t_;
  double r_;
};

}  // namespace ulyap
