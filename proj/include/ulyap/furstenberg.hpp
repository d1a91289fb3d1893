#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ulyap/mat2.hpp"
#include "ulyap/projective.hpp"
#include "ulyap/transfer.hpp"

namespace ulyap {

/// Elements of the group generated by T(theta,theta), T(eta,eta),
/// T(theta,eta), T(eta,theta), in closed form (x = e^{-i theta}, z = e^{-i eta}).
struct GroupWitness {
  Mat2C D, E, L, J, K;
  double trace_K = 2.0;
  double trace_K_closed_form = 2.0;  // 2 + (r^2/t^4)|x conj(z) - 1|^4
  bool degenerate = false;            // theta == eta: K = I
  bool noncompact = false;
};

inline GroupWitness build_witness(TorusAngle theta, TorusAngle eta, const DisorderParam& d) {
  const double c = d.ratio();
  const cplx x = std::conj(theta.unit());
  const cplx z = std::conj(eta.unit());
  const cplx w = x * std::conj(z);  // x conj(z)
  const cplx wb = std::conj(w);     // conj(x) z
  const double m2 = std::norm(w - 1.0);

  GroupWitness g;
  g.D = {w, 0.0, c * (w - 1.0), 1.0};
  g.E = {1.0, c * (1.0 - wb), 0.0, wb};
  g.L = {w, c * (w - 1.0), c * (w - 1.0), wb - c * c * m2};
  g.J = {w - c * c * m2, c * (1.0 - wb), c * (1.0 - wb), wb};
  g.K = g.J.inverse() * g.L;
  g.trace_K = g.K.trace().real();
  const double t = d.t();
  g.trace_K_closed_form = 2.0 + d.r() * d.r() / (t * t * t * t) * m2 * m2;
  g.degenerate = TorusAngle::distance(theta, eta) <= 1e-10;
  g.noncompact = !g.degenerate && g.trace_K > 2.0 + 1e-10;
  return g;
}

namespace detail {
inline double min_pairwise_distance(const std::vector<ProjPoint>& pts) {
  double best = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, proj_distance(pts[i], pts[j]));
  return best;
}
}  // namespace detail

struct PiCaseIrreducibility {
  ProjPoint v_plus{1.0, 0.0};
  ProjPoint v_minus{1.0, 0.0};
  std::array<ProjPoint, 3> images_plus{ProjPoint{1.0, 0.0}, ProjPoint{1.0, 0.0}, ProjPoint{1.0, 0.0}};
  std::array<ProjPoint, 3> images_minus{ProjPoint{1.0, 0.0}, ProjPoint{1.0, 0.0}, ProjPoint{1.0, 0.0}};
  Mat2C L;
  bool distinct_images = false;
  double min_distance = 0.0;
  bool degenerate = false;  // lambda in {-a, -b}
};

/// Images of the hyperbolic directions v+- = (1, (r +- 1)/t) under
/// T(theta,theta), T(theta,eta), T(eta,theta) with theta = a + lambda, eta = theta + pi.
inline PiCaseIrreducibility pi_case_irreducibility(TorusAngle lambda, TorusAngle a, const DisorderParam& d) {
  const TorusAngle theta = a + lambda;
  const TorusAngle eta = theta + TorusAngle(pi);
  const Mat2C tt = transfer_matrix(theta, theta, d);
  const Mat2C te = transfer_matrix(theta, eta, d);
  const Mat2C et = transfer_matrix(eta, theta, d);

  PiCaseIrreducibility out;
  out.v_plus = ProjPoint(1.0, (d.r() + 1.0) / d.t());
  out.v_minus = ProjPoint(1.0, (d.r() - 1.0) / d.t());
  out.images_plus = {act(tt, out.v_plus), act(te, out.v_plus), act(et, out.v_plus)};
  out.images_minus = {act(tt, out.v_minus), act(te, out.v_minus), act(et, out.v_minus)};
  out.L = build_witness(theta, eta, d).L;
  out.min_distance = std::min(
      detail::min_pairwise_distance({out.images_plus.begin(), out.images_plus.end()}),
      detail::min_pairwise_distance({out.images_minus.begin(), out.images_minus.end()}));
  out.distinct_images = out.min_distance > ProjPoint::distinct_tolerance;
  out.degenerate = TorusAngle::distance(theta, TorusAngle(0.0)) <= 1e-10 ||
                   TorusAngle::distance(eta, TorusAngle(0.0)) <= 1e-10;
  return out;
}

struct IrreducibilityWitness {
  std::vector<ProjPoint> orbit;  // v, g v, g^2 v
  char generator = 'E';          // 'E' or 'D'
  bool witnessed = false;
  double min_distance = 0.0;
  std::string note;
};

/// Three distinct images of v under powers of E (for v = (0,1) or v = (1, r/t))
/// or of D (every other direction).
inline IrreducibilityWitness general_irreducibility_witness(TorusAngle lambda, TorusAngle theta0, TorusAngle eta0,
                                                            const DisorderParam& d, const ProjPoint& v) {
  const TorusAngle theta = theta0 + lambda;
  const TorusAngle eta = eta0 + lambda;
  const GroupWitness g = build_witness(theta, eta, d);
  const bool use_e = same_direction(v, ProjPoint(0.0, 1.0)) || same_direction(v, ProjPoint(1.0, d.ratio()));
  const Mat2C& m = use_e ? g.E : g.D;

  IrreducibilityWitness out;
  out.generator = use_e ? 'E' : 'D';
  out.orbit = {v, act(m, v), act(m * m, v)};
  out.min_distance = detail::min_pairwise_distance(out.orbit);
  out.witnessed = out.min_distance > ProjPoint::distinct_tolerance;
  const double diff = TorusAngle::distance(theta, eta);
  if (diff <= 1e-10 || std::abs(diff - pi) <= 1e-10) {
    out.note = "x conj(z) is +-1: the two phases coincide or are opposite";
  }
  return out;
}

enum class DimerRegime { elliptic, hyperbolic, parabolic };

inline const char* to_string(DimerRegime r) {
  switch (r) {
    case DimerRegime::elliptic: return "elliptic";
    case DimerRegime::hyperbolic: return "hyperbolic";
    case DimerRegime::parabolic: return "parabolic";
  }
  return "parabolic";
}

/// tr T(theta, theta) = (2 r^2 - 2 cos theta) / t^2.
inline double dimer_trace(TorusAngle theta, const DisorderParam& d) {
  const double t = d.t();
  return (2.0 * d.r() * d.r() - 2.0 * std::cos(theta.value())) / (t * t);
}

inline DimerRegime dimer_regime(double trace, double tol = 1e-12) {
  if (std::abs(trace) < 2.0 - tol) return DimerRegime::elliptic;
  if (std::abs(trace) > 2.0 + tol) return DimerRegime::hyperbolic;
  return DimerRegime::parabolic;
}

/// The normal form of the dimer pair T(theta,theta), T(eta,eta) obtained by
/// conjugating with N.
struct DimerConjugation {
  double trace = 0.0;
  DimerRegime regime = DimerRegime::parabolic;
  cplx rho{};       // eigenvalue of T(theta,theta): e^{iy}, y in (0,pi), or the one with |rho| > 1
  Mat2C N;
  Mat2C E_diag;     // N T(theta,theta) N^-1
  Mat2C F;          // closed-form entries
  Mat2C F_conj;     // N T(eta,eta) N^-1
  double det_N_residual = 0.0;  // |det N - (x + rho)(rho1 - rho)|
  bool conjugated = false;      // false in the parabolic case
};

inline DimerConjugation dimer_conjugation(TorusAngle theta, TorusAngle eta, const DisorderParam& d) {
  DimerConjugation out;
  out.trace = dimer_trace(theta, d);
  out.regime = dimer_regime(out.trace);
  if (out.regime == DimerRegime::parabolic) return out;

  const double tr = out.trace;
  if (out.regime == DimerRegime::elliptic) {
    out.rho = std::polar(1.0, std::acos(0.5 * tr));
  } else {
    out.rho = 0.5 * tr + std::copysign(std::sqrt(0.25 * tr * tr - 1.0), tr);
  }
  const cplx rho = out.rho;
  const cplx rho1 = 1.0 / rho;
  const double r = d.r(), t = d.t(), c = d.ratio();
  const cplx x = std::conj(theta.unit());
  const cplx z = std::conj(eta.unit());

  out.N = {c * (1.0 - x), x + rho, x + rho, -c * (1.0 - x)};
  out.det_N_residual = std::abs(out.N.det() - (x + rho) * (rho1 - rho));
  const Mat2C n_inv = out.N.inverse();
  out.E_diag = out.N * transfer_matrix(theta, theta, d) * n_inv;
  out.F_conj = out.N * transfer_matrix(eta, eta, d) * n_inv;

  const cplx gap = rho - rho1;
  const double cross = 2.0 * std::real(z * std::conj(x));  // z conj(x) + conj(z) x
  const double zz = 2.0 * z.real();                        // z + conj(z)
  const cplx f11 = (2.0 * r * r * (1.0 + rho) - cross - rho * zz) / (t * t * gap);
  const cplx f12 = cplx(0.0, 2.0 * r) * (x.imag() - z.imag() + (z * std::conj(x)).imag()) / (t * t * t * gap);
  const cplx f22 = -(2.0 * r * r * (1.0 + rho1) - cross - rho1 * zz) / (t * t * gap);
  out.F = {f11, f12, f12, f22};
  out.conjugated = true;
  return out;
}

/// Critical quasi-energies of the dimer model with atoms a, b.
struct CriticalSet {
  std::vector<TorusAngle> points;  // sorted, deduplicated
  std::vector<TorusAngle> M_a, M_b;
  std::vector<TorusAngle> intersection;  // members of M_a also in M_b
};

inline std::vector<TorusAngle> dimer_candidate_set(TorusAngle a, const DisorderParam& d) {
  const double r2 = d.r() * d.r();
  const double t2 = d.t() * d.t();
  const double c1 = std::acos(r2);
  const double c2 = std::acos(std::clamp(r2 - t2, -1.0, 1.0));
  const double av = a.value();
  return {TorusAngle(c1 - av), TorusAngle(two_pi - c1 - av), TorusAngle(c2 - av), TorusAngle(two_pi - c2 - av)};
}

inline CriticalSet dimer_critical_set(TorusAngle a, TorusAngle b, const DisorderParam& d, double tol = 1e-10) {
  if (a.approx_equal(b, tol)) throw std::invalid_argument("dimer_critical_set: a and b must differ");
  CriticalSet out;
  out.M_a = dimer_candidate_set(a, d);
  out.M_b = dimer_candidate_set(b, d);
  auto add_unique = [tol](std::vector<TorusAngle>& v, TorusAngle p) {
    for (const auto& q : v)
      if (q.approx_equal(p, tol)) return;
    v.push_back(p);
  };
  for (const auto& p : out.M_a) {
    for (const auto& q : out.M_b) {
      if (p.approx_equal(q, tol)) add_unique(out.intersection, p);
    }
  }
  add_unique(out.points, -a);
  add_unique(out.points, -b);
  for (const auto& p : out.intersection) add_unique(out.points, p);
  std::sort(out.points.begin(), out.points.end(),
            [](TorusAngle x, TorusAngle y) { return x.value() < y.value(); });
  return out;
}

struct OrbitWitness {
  bool certified = false;
  double achieved_norm = 1.0;   // row-sum norm of the product
  std::vector<int> word;        // E-power applied before each F
  Mat2C product = Mat2C::identity();
  double beta = 0.0;
  double min_step_gain = 0.0;   // smallest |F w|^2 / |w|^2 over the applied steps
  std::string note;
};

/// Steering search for unbounded products in the group generated by E_diag
/// (elliptic, diag(e^{iy}, e^{-iy})) and F: repeatedly apply the smallest
/// power of E that puts the current direction where F expands its squared
/// Euclidean norm by more than 1 + beta^2, then F.
inline OrbitWitness dimer_noncompact_orbit_witness(const Mat2C& E_diag, const Mat2C& F, double growth_target,
                                                   int max_words, int max_power = 4096) {
  OrbitWitness out;
  out.beta = std::abs(F.a12);
  if (std::abs(F.a12) <= 1e-12) {
    out.note = "F is diagonal (beta = 0): no steering available";
    return out;
  }
  const double gain = 1.0 + std::norm(F.a12);
  Vec2C w{1.0, 0.0};
  out.min_step_gain = std::numeric_limits<double>::infinity();
  for (int step = 0; step < max_words; ++step) {
    int power = -1;
    Vec2C cand = w;
    for (int k = 0; k <= max_power; ++k) {
      const double grown = (F * cand).norm2();
      if (grown * grown > gain * cand.norm2() * cand.norm2() * (1.0 + 1e-12)) {
        power = k;
        break;
      }
      cand = E_diag * cand;
    }
    if (power < 0) {
      out.note = "no power of E reaches the expanding region";
      return out;
    }
    Mat2C ep = Mat2C::identity();
    for (int k = 0; k < power; ++k) ep = E_diag * ep;
    const Vec2C next = F * cand;
    out.min_step_gain = std::min(out.min_step_gain, next.norm2() * next.norm2() / (cand.norm2() * cand.norm2()));
    w = next;
    out.product = F * ep * out.product;
    out.word.push_back(power);
    out.achieved_norm = out.product.norm();
    if (out.achieved_norm > growth_target) {
      out.certified = true;
      return out;
    }
  }
  out.note = "growth target not reached within max_words";
  return out;
}

/// Strong irreducibility of the dimer group by E-powers (needs rho^4 != 1)
/// together with a non-vanishing diagonal of F; a or b as base point.
struct DimerIrreducibility {
  bool witnessed = false;
  char base = ' ';  // 'a' or 'b' when witnessed
  std::string note;
};

inline DimerIrreducibility dimer_irreducibility_witness(TorusAngle lambda, TorusAngle a, TorusAngle b,
                                                        const DisorderParam& d) {
  DimerIrreducibility out;
  for (int pass = 0; pass < 2; ++pass) {
    const TorusAngle theta = (pass == 0 ? a : b) + lambda;
    const TorusAngle eta = (pass == 0 ? b : a) + lambda;
    const DimerConjugation c = dimer_conjugation(theta, eta, d);
    if (!c.conjugated) continue;
    const cplx r4 = c.rho * c.rho * c.rho * c.rho;
    if (std::abs(r4 - 1.0) <= 1e-10) continue;
    if (std::abs(c.F.a11) <= 1e-12 && std::abs(c.F.a22) <= 1e-12) continue;
    out.witnessed = true;
    out.base = pass == 0 ? 'a' : 'b';
    return out;
  }
  out.note = "not witnessed: rho^4 = 1 or F has a vanishing diagonal for both base points";
  return out;
}

}  // namespace ulyap
