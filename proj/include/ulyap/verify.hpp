#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ulyap/bernoulli_pi.hpp"
#include "ulyap/furstenberg.hpp"
#include "ulyap/transfer.hpp"

namespace ulyap {

using WindowBuilder = std::function<BandWindow(const DisorderParam&, long, long)>;

struct VerifyOptions {
  std::vector<double> t_values{0.3, 1.0 / std::numbers::sqrt2, 0.9};
  std::uint64_t seed = 20240607;
  std::uint64_t eigen_realizations = 100;
  std::uint64_t eigen_pairs = 50;      // n: 2n phases per realization
  std::uint64_t chain_realizations = 20;
  std::uint64_t chain_steps = 1000;
  int grid = 20;                       // angles per axis in the grid suites
  WindowBuilder window;                // empty: the true stencil
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::uint64_t checks = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string counterexample;  // first failing input, observed vs expected
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool passed() const {
    for (const auto& s : suites)
      if (!s.passed) return false;
    return true;
  }
};

namespace detail {

class SuiteRun {
 public:
  SuiteRun(std::string name, double tol) : start_(std::chrono::steady_clock::now()) {
    r_.name = std::move(name);
    r_.tolerance = tol;
  }

  /// Records one check; `describe` is only called on the first failure.
  template <class Describe>
  void check(double error, Describe&& describe) {
    ++r_.checks;
    r_.worst = std::max(r_.worst, error);
    if (!(error <= r_.tolerance) && r_.passed) {
      r_.passed = false;
      r_.counterexample = describe();
    }
  }

  SuiteResult finish() {
    r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return r_;
  }

 private:
  SuiteResult r_;
  std::chrono::steady_clock::time_point start_;
};

inline std::string fmt(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

inline std::string fmt(const Mat2C& m) {
  return "[[" + fmt(m.a11) + ", " + fmt(m.a12) + "], [" + fmt(m.a21) + ", " + fmt(m.a22) + "]]";
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline double grid_angle(int i, int n) { return two_pi * (i + 0.5) / n; }

}  // namespace detail

/// |det T(theta, eta) - e^{i(theta - eta)}| over a grid.
inline SuiteResult verify_determinant(const VerifyOptions& opt) {
  detail::SuiteRun run("det-identity", 1e-12);
  for (double t : opt.t_values) {
    const DisorderParam d(t);
    for (int i = 0; i < opt.grid; ++i) {
      for (int j = 0; j < opt.grid; ++j) {
        const TorusAngle th(detail::grid_angle(i, opt.grid)), et(detail::grid_angle(j, opt.grid) + 0.1);
        const cplx det = transfer_matrix(th, et, d).det();
        const cplx expected = (th - et).unit();
        run.check(std::abs(det - expected), [&] {
          return "t=" + detail::fmt(t) + " theta=" + detail::fmt(th.value()) + " eta=" + detail::fmt(et.value()) +
                 ": det=" + detail::fmt(det) + " expected " + detail::fmt(expected);
        });
      }
    }
  }
  return run.finish();
}

/// The four A-matrices at phases {0, pi}. The error is relative to max(1, |expected|).
inline SuiteResult verify_a_table(const VerifyOptions& opt) {
  detail::SuiteRun run("a-matrix-table", 1e-12);
  for (double t : opt.t_values) {
    const DisorderParam d(t);
    const double rho = (d.r() + 1.0) * (d.r() + 1.0) / (t * t);
    const TorusAngle zero(0.0), half(pi);
    const struct {
      TorusAngle th, et;
      Mat2C expected;
      const char* label;
    } cases[] = {
        {zero, zero, Mat2C{-1.0, 0.0, 0.0, -1.0}, "A(0,0)"},
        {half, half, Mat2C::diag(rho, 1.0 / rho), "A(pi,pi)"},
        {half, zero, Mat2C{0.0, -1.0 / rho, -rho, 0.0}, "A(pi,0)"},
        {zero, half, Mat2C{0.0, 1.0, 1.0, 0.0}, "A(0,pi)"},
    };
    for (const auto& c : cases) {
      const Mat2C a = basis_change_A(c.th, c.et, d);
      const double err = max_abs_diff(a, c.expected) / std::max(1.0, c.expected.max_abs());
      run.check(err, [&] {
        return std::string(c.label) + " at t=" + detail::fmt(t) + ": got " + detail::fmt(a) + " expected " +
               detail::fmt(c.expected);
      });
    }
  }
  return run.finish();
}

/// tr(J^-1 L) against 2 + (r^2/t^4)|x conj(z) - 1|^4, relative to max(1, closed form).
inline SuiteResult verify_trace_k(const VerifyOptions& opt) {
  detail::SuiteRun run("trace-K-identity", 1e-10);
  for (double t : opt.t_values) {
    const DisorderParam d(t);
    for (int i = 0; i < opt.grid; ++i) {
      for (int j = 0; j < opt.grid; ++j) {
        const TorusAngle th(detail::grid_angle(i, opt.grid)), et(detail::grid_angle(j, opt.grid) + 0.05);
        const GroupWitness g = build_witness(th, et, d);
        const double err = std::abs(g.trace_K - g.trace_K_closed_form) / std::max(1.0, g.trace_K_closed_form);
        run.check(err, [&] {
          return "t=" + detail::fmt(t) + " theta=" + detail::fmt(th.value()) + " eta=" + detail::fmt(et.value()) +
                 ": tr K=" + detail::fmt(g.trace_K) + " expected " + detail::fmt(g.trace_K_closed_form);
        });
      }
    }
  }
  return run.finish();
}

/// Residual of D S psi = e^{i lambda} psi for psi built by the transfer recursion
/// on uniformly random phases.
inline SuiteResult verify_eigen(const VerifyOptions& opt) {
  detail::SuiteRun run("eigen-recursion", 1e-10);
  const WindowBuilder builder = opt.window ? opt.window : WindowBuilder([](const DisorderParam& d, long lo, long hi) {
    return s_matrix_window(d, lo, hi);
  });
  for (std::size_t ti = 0; ti < opt.t_values.size(); ++ti) {
    const DisorderParam d(opt.t_values[ti]);
    for (std::uint64_t r = 0; r < opt.eigen_realizations; ++r) {
      const RealizationStream s(derive_seed(opt.seed, ti), r);
      std::vector<TorusAngle> phases;
      for (std::uint64_t k = 0; k < 2 * opt.eigen_pairs; ++k) phases.emplace_back(two_pi * s.draw(k));
      const std::uint64_t extra = 2 * opt.eigen_pairs;
      const TorusAngle lambda(two_pi * s.draw(extra));
      const Vec2C c0{std::polar(1.0, two_pi * s.draw(extra + 1)), std::polar(1.0, two_pi * s.draw(extra + 2))};
      const double res = verify_eigen_recursion(phases, lambda, d, c0, builder);
      run.check(res, [&] {
        return "t=" + detail::fmt(d.t()) + " realization " + std::to_string(r) + " lambda=" +
               detail::fmt(lambda.value()) + ": residual " + detail::fmt(res) + " expected <= 1e-10";
      });
    }
  }
  return run.finish();
}

/// ln ||Lambda_k u0|| against |x_k| ln rho on common draws (p = 1/2, a = 0).
inline SuiteResult verify_chain(const VerifyOptions& opt) {
  detail::SuiteRun run("chain-vs-transfer", 1e-9);
  for (std::size_t ti = 0; ti < opt.t_values.size(); ++ti) {
    const PiBernoulliParams params(TorusAngle(0.0), 0.5, DisorderParam(opt.t_values[ti]));
    for (std::uint64_t r = 0; r < opt.chain_realizations; ++r) {
      const RealizationStream s(derive_seed(opt.seed + 1, ti), r);
      const double dev = chain_vs_transfer_consistency(s, params, opt.chain_steps);
      run.check(dev, [&] {
        return "t=" + detail::fmt(opt.t_values[ti]) + " realization " + std::to_string(r) + ": deviation " +
               detail::fmt(dev);
      });
    }
  }
  return run.finish();
}

/// Closed-form F against N T(eta, eta) N^-1, relative to max(1, |F|). Points
/// within 1e-3 of the parabolic trace are skipped (N degenerates there).
inline SuiteResult verify_f_matrix(const VerifyOptions& opt) {
  detail::SuiteRun run("f-matrix-conjugation", 1e-10);
  for (double t : opt.t_values) {
    const DisorderParam d(t);
    for (int i = 0; i < opt.grid; ++i) {
      for (int j = 0; j < opt.grid; ++j) {
        const TorusAngle th(detail::grid_angle(i, opt.grid)), et(detail::grid_angle(j, opt.grid) + 0.07);
        if (std::abs(std::abs(dimer_trace(th, d)) - 2.0) < 1e-3) continue;
        const DimerConjugation c = dimer_conjugation(th, et, d);
        const double scale = std::max(1.0, c.F_conj.max_abs());
        const double err = std::max(max_abs_diff(c.F, c.F_conj),
                                    max_abs_diff(c.E_diag, Mat2C::diag(c.rho, 1.0 / c.rho))) / scale;
        run.check(err, [&] {
          return "t=" + detail::fmt(t) + " theta=" + detail::fmt(th.value()) + " eta=" + detail::fmt(et.value()) +
                 ": F=" + detail::fmt(c.F) + " conjugation " + detail::fmt(c.F_conj);
        });
      }
    }
  }
  return run.finish();
}

inline VerifyReport run_verification(const VerifyOptions& opt = {}) {
  VerifyReport rep;
  rep.suites.push_back(verify_determinant(opt));
  rep.suites.push_back(verify_a_table(opt));
  rep.suites.push_back(verify_trace_k(opt));
  rep.suites.push_back(verify_eigen(opt));
  rep.suites.push_back(verify_chain(opt));
  rep.suites.push_back(verify_f_matrix(opt));
  return rep;
}

/// A stencil with one entry of every even row perturbed (negative control).
inline BandWindow corrupted_window(const DisorderParam& d, long lo, long hi) {
  BandWindow w = s_matrix_window(d, lo, hi);
  for (long row = lo; row <= hi; ++row) {
    if (detail::parity(row) == 0) w.at(row, row) += 1e-3;
  }
  return w;
}

}  // namespace ulyap
