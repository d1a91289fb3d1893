#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ulyap/mat2.hpp"
#include "ulyap/torus.hpp"

namespace ulyap {

/// The 2x2 matrix propagating (c_{2k-1}, c_{2k}) to (c_{2k+1}, c_{2k+2}) for
/// a generalized eigenvector of D S with local phases theta = theta_{2k}(lambda),
/// eta = theta_{2k+1}(lambda). det = e^{i(theta - eta)}.
inline Mat2C transfer_matrix(TorusAngle theta, TorusAngle eta, const DisorderParam& d) {
  const double t = d.t();
  const double c = d.ratio();
  const double c2 = c * c;
  const cplx e_minus_eta = std::conj(eta.unit());  // e^{-i eta}
  const cplx e_theta = theta.unit();
  const cplx e_diff = e_theta * e_minus_eta;  // e^{i(theta - eta)}
  return {-e_minus_eta, c * (e_diff - e_minus_eta),
          c * (1.0 - e_minus_eta), -e_theta / (t * t) + c2 * (1.0 + e_diff - e_minus_eta)};
}

/// Transfer matrix at quasi-energy lambda: both phases shifted by lambda.
inline Mat2C transfer_matrix_shifted(TorusAngle theta, TorusAngle eta, TorusAngle lambda,
                                     const DisorderParam& d) {
  return transfer_matrix(theta + lambda, eta + lambda, d);
}

namespace detail {
inline long parity(long j) { return ((j % 2) + 2) % 2; }
}  // namespace detail

/// Column range [first, last] where row j of S has non-zero entries.
inline std::pair<long, long> s_row_support(long row) {
  return detail::parity(row) == 0 ? std::pair{row - 1, row + 2} : std::pair{row - 2, row + 1};
}

/// Entry <e_row, S e_col> of the five-diagonal free operator. The origin is
/// fixed by <e_{2k-2}, S e_{2k}> = -t^2: even rows read (rt, r^2, rt, -t^2)
/// on columns row-1..row+2, odd rows (-t^2, -tr, r^2, -rt) on row-2..row+1.
inline double s_entry(const DisorderParam& d, long row, long col) {
  const double r = d.r();
  const double t = d.t();
  const long off = col - row;
  if (detail::parity(row) == 0) {
    switch (off) {
      case -1: return r * t;
      case 0: return r * r;
      case 1: return r * t;
      case 2: return -t * t;
      default: return 0.0;
    }
  }
  switch (off) {
    case -2: return -t * t;
    case -1: return -t * r;
    case 0: return r * r;
    case 1: return -r * t;
    default: return 0.0;
  }
}

/// Square section of S on rows and columns [first, last].
struct BandWindow {
  long first = 0;
  long last = 0;
  std::vector<double> data;  // row-major, (size x size)

  long size() const { return last - first + 1; }
  double at(long row, long col) const { return data[(row - first) * size() + (col - first)]; }
  double& at(long row, long col) { return data[(row - first) * size() + (col - first)]; }

  /// The row's whole band lies inside the window.
  bool interior(long row) const {
    const auto [lo, hi] = s_row_support(row);
    return row >= first && row <= last && lo >= first && hi <= last;
  }
};

inline BandWindow s_matrix_window(const DisorderParam& d, long k_min, long k_max) {
  if (k_max - k_min < 6) {
    throw std::invalid_argument("s_matrix_window: window must span at least 7 sites to hold a full stencil period");
  }
  BandWindow w{k_min, k_max, {}};
  w.data.assign(static_cast<std::size_t>(w.size() * w.size()), 0.0);
  for (long row = k_min; row <= k_max; ++row) {
    const auto [lo, hi] = s_row_support(row);
    for (long col = std::max(lo, k_min); col <= std::min(hi, k_max); ++col) w.at(row, col) = s_entry(d, row, col);
  }
  return w;
}

/// Builds psi from the transfer recursion on phases theta_0..theta_{2n-1}
/// starting at (c_{-1}, c_0), then returns the largest residual of
/// D S psi = e^{i lambda} psi over the interior rows 0..2n-1. Each row's
/// residual is taken relative to the largest |c_j| on its band.
template <class WindowBuilder>
double verify_eigen_recursion(std::span<const TorusAngle> phases, TorusAngle lambda, const DisorderParam& d,
                              Vec2C c_init, WindowBuilder&& build_window) {
  if (phases.size() < 8 || phases.size() % 2 != 0) {
    throw std::invalid_argument("verify_eigen_recursion: need an even number (>= 8) of phases");
  }
  if (c_init.is_zero()) throw std::invalid_argument("verify_eigen_recursion: zero initial vector");

  const long n = static_cast<long>(phases.size() / 2);
  const long first = -1;
  const long last = 2 * n;
  std::vector<cplx> c(static_cast<std::size_t>(last - first + 1));
  auto coef = [&](long j) -> cplx& { return c[static_cast<std::size_t>(j - first)]; };
  coef(-1) = c_init.x;
  coef(0) = c_init.y;
  for (long k = 0; k < n; ++k) {
    const Mat2C tm = transfer_matrix_shifted(phases[2 * k], phases[2 * k + 1], lambda, d);
    const Vec2C next = tm * Vec2C{coef(2 * k - 1), coef(2 * k)};
    coef(2 * k + 1) = next.x;
    coef(2 * k + 2) = next.y;
  }

  const BandWindow window = build_window(d, first, last);
  const cplx eigenvalue = lambda.unit();
  double worst = 0.0;
  for (long row = 0; row < 2 * n; ++row) {
    if (!window.interior(row)) continue;
    const auto [lo, hi] = s_row_support(row);
    cplx s_psi = 0.0;
    double scale = 0.0;
    for (long col = lo; col <= hi; ++col) {
      s_psi += window.at(row, col) * coef(col);
      scale = std::max(scale, std::abs(coef(col)));
    }
    const cplx d_row = std::conj(phases[row].unit());  // D = diag(e^{-i theta_k})
    const double residual = std::abs(d_row * s_psi - eigenvalue * coef(row));
    worst = std::max(worst, residual / scale);
  }
  return worst;
}

inline double verify_eigen_recursion(std::span<const TorusAngle> phases, TorusAngle lambda, const DisorderParam& d,
                                     Vec2C c_init) {
  return verify_eigen_recursion(phases, lambda, d, c_init, [](const DisorderParam& dp, long lo, long hi) {
    return s_matrix_window(dp, lo, hi);
  });
}

}  // namespace ulyap
