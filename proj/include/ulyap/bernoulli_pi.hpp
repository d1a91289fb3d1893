#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ulyap/mat2.hpp"
#include "ulyap/measure.hpp"
#include "ulyap/rng.hpp"
#include "ulyap/transfer.hpp"

namespace ulyap {

/// mu = p delta_a + q delta_{a+pi}, studied at lambda = -a.
class PiBernoulliParams {
 public:
  PiBernoulliParams(TorusAngle a, double p, const DisorderParam& d) : a_(a), p_(p), d_(d) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("PiBernoulliParams: p must lie in (0, 1]");
  }

  TorusAngle a() const { return a_; }
  TorusAngle b() const { return a_ + TorusAngle(pi); }
  double p() const { return p_; }
  double q() const { return 1.0 - p_; }
  double alpha() const { return q() - p_; }
  const DisorderParam& disorder() const { return d_; }
  double rho() const { return (d_.r() + 1.0) * (d_.r() + 1.0) / (d_.t() * d_.t()); }
  double log_rho() const { return std::log(rho()); }
  TorusAngle lambda() const { return -a_; }

  /// p == 1 has a single atom and is returned as a Dirac measure.
  PhaseMeasure measure() const {
    return p_ < 1.0 ? PhaseMeasure::bernoulli(a_, b(), p_) : PhaseMeasure::dirac(a_);
  }

 private:
  TorusAngle a_;
  double p_;
  DisorderParam d_;
};

/// P = [[1, 1], [(r+1)/t, (r-1)/t]]; its columns are eigenvectors of T(pi, pi).
inline Mat2C pi_basis(const DisorderParam& d) {
  return {1.0, 1.0, (d.r() + 1.0) / d.t(), (d.r() - 1.0) / d.t()};
}

/// A(theta, eta) = P^-1 T(theta, eta) P.
inline Mat2C basis_change_A(TorusAngle theta, TorusAngle eta, const DisorderParam& d) {
  const Mat2C p = pi_basis(d);
  return p.inverse() * transfer_matrix(theta, eta, d) * p;
}

/// Which A-matrix a 2-step draw selects; each phase is a (false) or b (true).
struct PiDraw {
  bool first_b = false;
  bool second_b = false;
};

/// x_{n+1} from x_n: A(0,0) keeps x, A(pi,pi) adds 1, A(0,pi) negates,
/// A(pi,0) maps x to -x-1.
inline std::int64_t markov_step(std::int64_t x, PiDraw draw) {
  if (!draw.first_b && !draw.second_b) return x;
  if (draw.first_b && draw.second_b) return x + 1;
  if (!draw.first_b) return -x;
  return -x - 1;
}

struct ChainMoments {
  double mean = 0.0;    // E x_n
  double second = 0.0;  // E x_n^2
};

/// Iterates E x_n = alpha^2 E x_{n-1} + q alpha and
/// E x_n^2 = E x_{n-1}^2 + 2 q E x_{n-1} + q from zero.
inline ChainMoments exact_moments(std::uint64_t n, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("exact_moments: p must lie in (0, 1]");
  const double q = 1.0 - p;
  const double alpha = q - p;
  ChainMoments m;
  for (std::uint64_t k = 0; k < n; ++k) {
    const double prev = m.mean;
    m.mean = alpha * alpha * prev + q * alpha;
    m.second = m.second + 2.0 * q * prev + q;
  }
  return m;
}

/// (ln rho / n) sqrt(E x_n^2), which dominates (ln rho / n) E|x_n|.
inline double gamma_upper_bound(std::uint64_t n, double p, const DisorderParam& d) {
  if (n < 1) throw std::invalid_argument("gamma_upper_bound: n must be >= 1");
  const PiBernoulliParams params(TorusAngle(0.0), p, d);
  return params.log_rho() / static_cast<double>(n) * std::sqrt(exact_moments(n, p).second);
}

/// The draws of realization s, read the same way as the transfer cocycle
/// (site 2k is the first phase of factor k; atom 0 is a, atom 1 is b).
inline PiDraw pi_draw(const RealizationStream& s, const PhaseMeasure& mu, std::uint64_t k) {
  return {mu.atom_index(s.site_uniform(2 * k)) == 1, mu.atom_index(s.site_uniform(2 * k + 1)) == 1};
}

/// x_1..x_n along one realization.
inline std::vector<std::int64_t> simulate_chain(const RealizationStream& s, const PiBernoulliParams& params,
                                                std::uint64_t n) {
  const PhaseMeasure mu = params.measure();
  std::vector<std::int64_t> xs;
  xs.reserve(n);
  std::int64_t x = 0;
  for (std::uint64_t k = 0; k < n; ++k) {
    x = markov_step(x, pi_draw(s, mu, k));
    xs.push_back(x);
  }
  return xs;
}


/// Runs Lambda_k u_0 (u_0 = (1, 1)) and the chain on the same draws and returns
/// max_k | ln ||Lambda_k u_0||_inf - |x_k| ln rho |. The vector is kept as
/// per-component log-moduli and phases, so large rho cannot overflow.
inline double chain_vs_transfer_consistency(const RealizationStream& s, const PiBernoulliParams& params,
                                            std::uint64_t n) {
  if (s.mode() != StreamMode::independent) {
    throw std::invalid_argument("chain_vs_transfer_consistency: needs an independent-mode stream");
  }
  const DisorderParam& d = params.disorder();
  const TorusAngle a = params.a(), b = params.b();
  const TorusAngle lambda = params.lambda();
  // A-matrices at lambda = -a depend only on which phases are b. Equal
  // draws give diagonal matrices, mixed draws anti-diagonal ones. The entries
  // the structure drops count towards the deviation, relative to the largest entry.
  Mat2C table[2][2];
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Mat2C m = basis_change_A((i ? b : a) + lambda, (j ? b : a) + lambda, d);
      const double scale = m.max_abs();
      if (i == j) {
        worst = std::max(worst, std::max(modulus(m.a12), modulus(m.a21)) / scale);
        m.a12 = m.a21 = 0.0;
      } else {
        worst = std::max(worst, std::max(modulus(m.a11), modulus(m.a22)) / scale);
        m.a11 = m.a22 = 0.0;
      }
      table[i][j] = m;
    }
  }
  const PhaseMeasure mu = params.measure();
  double l1 = 0.0, l2 = 0.0;  // log-moduli of the two components
  cplx ph1 = 1.0, ph2 = 1.0;
  std::int64_t x = 0;
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < n; ++k) {
    const PiDraw draw = pi_draw(s, mu, k);
    const Mat2C& m = table[draw.first_b][draw.second_b];
    // A monomial matrix maps (c1, c2) to a permutation of scaled entries.
    auto apply = [](cplx coef, double l, cplx ph, double& lo, cplx& po) {
      if (coef == 0.0 || l == neg_inf) {
        lo = neg_inf;
        po = 1.0;
        return;
      }
      lo = l + std::log(modulus(coef));
      po = ph * coef / modulus(coef);
    };
    double n1, n2;
    cplx p1, p2;
    if (draw.first_b == draw.second_b) {
      apply(m.a11, l1, ph1, n1, p1);
      apply(m.a22, l2, ph2, n2, p2);
    } else {
      apply(m.a12, l2, ph2, n1, p1);
      apply(m.a21, l1, ph1, n2, p2);
    }
    l1 = n1;
    l2 = n2;
    ph1 = p1;
    ph2 = p2;
    x = markov_step(x, draw);
    const double log_norm = std::max(l1, l2);
    worst = std::max(worst, std::abs(log_norm - std::abs(static_cast<double>(x)) * params.log_rho()));
  }
  return worst;
}

}  // namespace ulyap
