#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "ulyap/torus.hpp"

namespace ulyap {

/// |z| without the overflow guard of std::abs (hypot is slow in hot loops).
inline double modulus(cplx z) { return std::sqrt(z.real() * z.real() + z.imag() * z.imag()); }

struct Vec2C {
  cplx x{};
  cplx y{};

  /// max(|x|, |y|)
  double max_norm() const { return std::max(modulus(x), modulus(y)); }
  double norm2() const { return std::sqrt(std::norm(x) + std::norm(y)); }
  bool is_zero() const { return x == cplx{} && y == cplx{}; }

  Vec2C operator*(cplx s) const { return {x * s, y * s}; }
  Vec2C operator+(const Vec2C& o) const { return {x + o.x, y + o.y}; }
  Vec2C operator-(const Vec2C& o) const { return {x - o.x, y - o.y}; }
};

/// Hermitian inner product <v, w> = conj(v) . w
inline cplx inner(const Vec2C& v, const Vec2C& w) { return std::conj(v.x) * w.x + std::conj(v.y) * w.y; }

/// 2x2 complex matrix. norm() is the maximum absolute row sum.
struct Mat2C {
  cplx a11{}, a12{}, a21{}, a22{};

  static Mat2C identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2C diag(cplx d1, cplx d2) { return {d1, 0.0, 0.0, d2}; }

  cplx det() const { return a11 * a22 - a12 * a21; }
  cplx trace() const { return a11 + a22; }

  double norm() const {
    return std::max(modulus(a11) + modulus(a12), modulus(a21) + modulus(a22));
  }
  double frobenius() const {
    return std::sqrt(std::norm(a11) + std::norm(a12) + std::norm(a21) + std::norm(a22));
  }
  double max_abs() const {
    return std::max({modulus(a11), modulus(a12), modulus(a21), modulus(a22)});
  }

  Mat2C inverse() const {
    const cplx d = det();
    if (modulus(d) == 0.0) throw std::domain_error("Mat2C::inverse: singular matrix");
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }

  Mat2C adjoint() const { return {std::conj(a11), std::conj(a21), std::conj(a12), std::conj(a22)}; }

  Mat2C operator*(const Mat2C& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  Vec2C operator*(const Vec2C& v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
  Mat2C operator*(cplx s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
  Mat2C operator+(const Mat2C& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
  Mat2C operator-(const Mat2C& o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
  Mat2C& operator*=(double s) {
    a11 *= s;
    a12 *= s;
    a21 *= s;
    a22 *= s;
    return *this;
  }
};

inline double max_abs_diff(const Mat2C& a, const Mat2C& b) { return (a - b).max_abs(); }

/// Row-sum condition number ||m|| * ||m^-1||.
inline double condition(const Mat2C& m) { return m.norm() * m.inverse().norm(); }

/// Eigenvalues of m, ordered by decreasing modulus.
inline std::pair<cplx, cplx> eigenvalues(const Mat2C& m) {
  const cplx half_tr = 0.5 * m.trace();
  const cplx disc = std::sqrt(half_tr * half_tr - m.det());
  cplx l1 = half_tr + disc;
  cplx l2 = half_tr - disc;
  if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);
  return {l1, l2};
}

inline double spectral_radius(const Mat2C& m) { return std::abs(eigenvalues(m).first); }

/// An eigenvector of m for eigenvalue ev, taken from the better-conditioned row of m - ev I.
inline Vec2C eigenvector(const Mat2C& m, cplx ev) {
  const cplx b11 = m.a11 - ev;
  const cplx b22 = m.a22 - ev;
  // Row (b11, a12) annihilates (a12, -b11); row (a21, b22) annihilates (-b22, a21).
  const Vec2C from_row1{m.a12, -b11};
  const Vec2C from_row2{-b22, m.a21};
  const Vec2C v = from_row1.norm2() >= from_row2.norm2() ? from_row1 : from_row2;
  if (v.norm2() == 0.0) return {1.0, 0.0};  // m - ev I vanishes: every vector is an eigenvector
  return v * (1.0 / v.norm2());
}

}  // namespace ulyap
