#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ulyap/mat2.hpp"
#include "ulyap/measure.hpp"
#include "ulyap/rng.hpp"
#include "ulyap/transfer.hpp"

namespace ulyap {

/// Anderson: phases i.i.d. per site. Dimer: theta_{2k} = theta_{2k+1}.
enum class Model { anderson, dimer };

inline StreamMode stream_mode(Model m) { return m == Model::dimer ? StreamMode::dimer : StreamMode::independent; }

/// A matrix in a basis where it is diag(e1, e2), or [[0, e1], [e2, 0]] when anti.
struct MonomialForm {
  bool anti = false;
  cplx e1{}, e2{};
};

/// A basis in which every generator of a finite cocycle is monomial, i.e. the
/// generators permute a pair of lines. Such cocycles are not strongly
/// irreducible; products of them are tracked exactly in log space.
struct MonomialBasis {
  Mat2C basis;    // columns span the two invariant lines
  Mat2C inverse;
  std::vector<MonomialForm> forms;  // parallel to the generator list
};

namespace detail {

inline std::optional<std::vector<MonomialForm>> monomial_forms(std::span<const Mat2C> gens, const Mat2C& basis,
                                                               const Mat2C& inverse, double tol) {
  std::vector<MonomialForm> forms;
  forms.reserve(gens.size());
  for (const Mat2C& g : gens) {
    const Mat2C b = inverse * g * basis;
    const double scale = b.max_abs();
    const double off = modulus(b.a12) + modulus(b.a21);
    const double on = modulus(b.a11) + modulus(b.a22);
    if (off <= tol * scale) forms.push_back({false, b.a11, b.a22});
    else if (on <= tol * scale) forms.push_back({true, b.a12, b.a21});
    else return std::nullopt;
  }
  return forms;
}

inline bool is_scalar(const Mat2C& g, double tol) {
  const double s = g.max_abs();
  return modulus(g.a12) <= tol * s && modulus(g.a21) <= tol * s && modulus(g.a11 - g.a22) <= tol * s;
}

}  // namespace detail

/// Looks for a common basis making every generator monomial. Candidate bases
/// are eigenbases of the generators and of their pairwise products.
inline std::optional<MonomialBasis> find_monomial_basis(std::span<const Mat2C> gens, double tol = 1e-10) {
  if (gens.empty()) return std::nullopt;
  std::vector<Mat2C> candidates;
  bool all_scalar = true;
  for (const Mat2C& g : gens) all_scalar = all_scalar && detail::is_scalar(g, tol);
  if (all_scalar) candidates.push_back(Mat2C::identity());
  for (const Mat2C& g : gens) candidates.push_back(g);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i; j < gens.size(); ++j) candidates.push_back(gens[i] * gens[j]);
  }

  for (std::size_t c = 0; c < candidates.size(); ++c) {
    Mat2C basis = Mat2C::identity();
    if (!(all_scalar && c == 0)) {
      const Mat2C& g = candidates[c];
      if (detail::is_scalar(g, tol)) continue;
      const auto [l1, l2] = eigenvalues(g);
      if (std::abs(l1 - l2) <= 1e-8 * g.max_abs()) continue;  // defective or nearly so
      const Vec2C v1 = eigenvector(g, l1);
      const Vec2C v2 = eigenvector(g, l2);
      basis = {v1.x, v2.x, v1.y, v2.y};
      if (std::abs(basis.det()) <= 1e-8) continue;
    }
    const Mat2C inverse = basis.inverse();
    if (auto forms = detail::monomial_forms(gens, basis, inverse, tol)) {
      return MonomialBasis{basis, inverse, std::move(*forms)};
    }
  }
  return std::nullopt;
}

struct Factor {
  Mat2C matrix;
  double prob = 0.0;
};

/// ln ||T_n|| at requested checkpoints of one realization.
struct LogNormPath {
  std::vector<double> at_checkpoint;
  double sup = 0.0;             // max_k<=n ln||T_k||, if tracked (T_0 = I gives 0)
  std::vector<double> history;  // ln||T_k|| for k = 1..n, if recorded
};

/// The random transfer-matrix cocycle at a fixed quasi-energy: the law of the
/// 2-step factors, a table of them for finitely supported phase laws, and
/// an exact monomial reduction when one exists.
class Cocycle {
 public:
  Cocycle(PhaseMeasure mu, const DisorderParam& d, TorusAngle lambda, Model model = Model::anderson,
          bool exploit_structure = true)
      : mu_(std::move(mu)), d_(d), lambda_(lambda), model_(model) {
    if (!mu_.is_finite()) return;
    const auto& atoms = mu_.atoms();
    m_ = atoms.size();
    if (model_ == Model::anderson) {
      for (const auto& a : atoms)
        for (const auto& b : atoms)
          table_.push_back({transfer_matrix_shifted(a.angle, b.angle, lambda_, d_), a.prob * b.prob});
    } else {
      for (const auto& a : atoms) table_.push_back({transfer_matrix_shifted(a.angle, a.angle, lambda_, d_), a.prob});
    }
    if (exploit_structure) {
      std::vector<Mat2C> gens;
      for (const auto& f : table_) gens.push_back(f.matrix);
      monomial_ = find_monomial_basis(gens);
      if (monomial_) prepare_log_forms();
    }
  }

  const PhaseMeasure& measure() const { return mu_; }
  const DisorderParam& disorder() const { return d_; }
  TorusAngle lambda() const { return lambda_; }
  Model model() const { return model_; }
  StreamMode mode() const { return stream_mode(model_); }
  const std::vector<Factor>& table() const { return table_; }
  const std::optional<MonomialBasis>& monomial() const { return monomial_; }

  /// Table index of factor k (finite measures).
  std::size_t factor_index(const RealizationStream& s, std::uint64_t k) const {
    const std::size_t i = mu_.atom_index(s.site_uniform(2 * k));
    if (model_ == Model::dimer) return i;
    return i * m_ + mu_.atom_index(s.site_uniform(2 * k + 1));
  }

  /// T(theta_{2k} + lambda, theta_{2k+1} + lambda) for realization s.
  Mat2C factor(const RealizationStream& s, std::uint64_t k) const {
    if (!table_.empty()) return table_[factor_index(s, k)].matrix;
    const TorusAngle theta = mu_.sample(s.site_uniform(2 * k));
    const TorusAngle eta = model_ == Model::dimer ? theta : mu_.sample(s.site_uniform(2 * k + 1));
    return transfer_matrix_shifted(theta, eta, lambda_, d_);
  }

  /// Runs factors [offset, offset + n) and reports ln||.|| of the partial products.
  /// checkpoints must be ascending step counts in [1, n_total].
  LogNormPath run(const RealizationStream& s, std::span<const std::uint64_t> checkpoints, bool track_sup = false,
                  bool record_history = false, std::uint64_t offset = 0) const {
    if (checkpoints.empty() || checkpoints.front() == 0) throw std::invalid_argument("Cocycle::run: no checkpoints");
    for (std::size_t i = 1; i < checkpoints.size(); ++i) {
      if (checkpoints[i] <= checkpoints[i - 1]) throw std::invalid_argument("Cocycle::run: checkpoints must ascend");
    }
    if (s.mode() != mode()) throw std::invalid_argument("Cocycle::run: stream mode does not match the model");
    return monomial_ ? run_monomial(s, checkpoints, track_sup, record_history, offset)
                     : run_generic(s, checkpoints, track_sup, record_history, offset);
  }

  double log_norm(const RealizationStream& s, std::uint64_t n) const {
    const std::uint64_t cp[1] = {n};
    return run(s, cp).at_checkpoint.front();
  }

 private:
  struct LogForm {
    bool anti;
    double log1, log2;
    cplx ph1, ph2;
  };

  void prepare_log_forms() {
    for (const auto& f : monomial_->forms) {
      log_forms_.push_back({f.anti, std::log(modulus(f.e1)), std::log(modulus(f.e2)), f.e1 / modulus(f.e1),
                            f.e2 / modulus(f.e2)});
    }
  }

  LogNormPath run_generic(const RealizationStream& s, std::span<const std::uint64_t> checkpoints, bool track_sup,
                          bool record_history, std::uint64_t offset) const {
    LogNormPath out;
    const std::uint64_t n = checkpoints.back();
    if (record_history) out.history.reserve(n);
    Mat2C m = Mat2C::identity();
    double log_acc = 0.0;
    double scale = 1.0;  // pending product of norms not yet folded into log_acc
    std::size_t next_cp = 0;
    const bool per_step = track_sup || record_history;
    for (std::uint64_t k = 1; k <= n; ++k) {
      m = factor(s, offset + k - 1) * m;
      const double nm = m.norm();
      m *= 1.0 / nm;
      scale *= nm;
      if (scale > 1e150 || scale < 1e-150) {
        log_acc += std::log(scale);
        scale = 1.0;
      }
      const bool at_cp = checkpoints[next_cp] == k;
      if (per_step || at_cp) {
        const double value = log_acc + std::log(scale);
        if (track_sup) out.sup = std::max(out.sup, value);
        if (record_history) out.history.push_back(value);
        if (at_cp) {
          out.at_checkpoint.push_back(value);
          ++next_cp;
        }
      }
    }
    return out;
  }

  /// ln||P Lambda P^-1|| for Lambda monomial with entries e^{l1} ph1, e^{l2} ph2.
  double monomial_log_norm(bool anti, double l1, double l2, cplx ph1, cplx ph2) const {
    const double top = std::max(l1, l2);
    const cplx w1 = ph1 * std::exp(l1 - top);
    const cplx w2 = ph2 * std::exp(l2 - top);
    const Mat2C lam = anti ? Mat2C{0.0, w1, w2, 0.0} : Mat2C{w1, 0.0, 0.0, w2};
    return top + std::log((monomial_->basis * lam * monomial_->inverse).norm());
  }

  LogNormPath run_monomial(const RealizationStream& s, std::span<const std::uint64_t> checkpoints, bool track_sup,
                           bool record_history, std::uint64_t offset) const {
    LogNormPath out;
    const std::uint64_t n = checkpoints.back();
    if (record_history) out.history.reserve(n);
    bool anti = false;
    double l1 = 0.0, l2 = 0.0;
    cplx ph1 = 1.0, ph2 = 1.0;
    std::size_t next_cp = 0;
    const bool per_step = track_sup || record_history;
    for (std::uint64_t k = 1; k <= n; ++k) {
      const LogForm& f = log_forms_[factor_index(s, offset + k - 1)];
      if (!f.anti) {
        l1 += f.log1;
        l2 += f.log2;
        ph1 *= f.ph1;
        ph2 *= f.ph2;
      } else {
        const double nl1 = f.log1 + l2, nl2 = f.log2 + l1;
        const cplx nph1 = f.ph1 * ph2, nph2 = f.ph2 * ph1;
        l1 = nl1;
        l2 = nl2;
        ph1 = nph1;
        ph2 = nph2;
        anti = !anti;
      }
      if ((k & 63) == 0) {
        ph1 /= modulus(ph1);
        ph2 /= modulus(ph2);
      }
      const bool at_cp = checkpoints[next_cp] == k;
      if (per_step || at_cp) {
        const double value = monomial_log_norm(anti, l1, l2, ph1, ph2);
        if (track_sup) out.sup = std::max(out.sup, value);
        if (record_history) out.history.push_back(value);
        if (at_cp) {
          out.at_checkpoint.push_back(value);
          ++next_cp;
        }
      }
    }
    return out;
  }

  PhaseMeasure mu_;
  DisorderParam d_;
  TorusAngle lambda_;
  Model model_;
  std::size_t m_ = 0;
  std::vector<Factor> table_;
  std::optional<MonomialBasis> monomial_;
  std::vector<LogForm> log_forms_;
};

}  // namespace ulyap
