#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ulyap/torus.hpp"

namespace ulyap {

/// Law of a single random phase on the torus.
///
/// Finite measures carry their atoms explicitly; uniform and custom measures
/// are only samplable. Sampling is by inverse CDF from a uniform u in [0, 1),
/// which keeps realization streams position-addressable.
class PhaseMeasure {
 public:
  enum class Kind { finite, uniform, custom };

  struct Atom {
    TorusAngle angle;
    double prob;
  };

  static PhaseMeasure finite(std::vector<Atom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("PhaseMeasure: finite measure needs at least one atom");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!(atoms[i].prob > 0.0)) throw std::invalid_argument("PhaseMeasure: atom probabilities must be positive");
      total += atoms[i].prob;
      for (std::size_t j = 0; j < i; ++j) {
        if (atoms[i].angle == atoms[j].angle) throw std::invalid_argument("PhaseMeasure: duplicate atom");
      }
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("PhaseMeasure: atom probabilities must sum to 1");
    }
    PhaseMeasure m(Kind::finite);
    m.cumulative_.reserve(atoms.size());
    double acc = 0.0;
    for (const auto& a : atoms) {
      acc += a.prob;
      m.cumulative_.push_back(acc);
    }
    m.cumulative_.back() = 1.0;
    m.atoms_ = std::move(atoms);
    return m;
  }

  static PhaseMeasure dirac(TorusAngle a) { return finite({{a, 1.0}}); }

  /// p delta_a + (1 - p) delta_b
  static PhaseMeasure bernoulli(TorusAngle a, TorusAngle b, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("PhaseMeasure: Bernoulli weight must lie in (0, 1)");
    return finite({{a, p}, {b, 1.0 - p}});
  }

  static PhaseMeasure uniform() { return PhaseMeasure(Kind::uniform); }

  /// A measure given by its quantile function u -> angle.
  static PhaseMeasure custom(std::function<double(double)> quantile, std::string label) {
    if (!quantile) throw std::invalid_argument("PhaseMeasure: empty quantile function");
    PhaseMeasure m(Kind::custom);
    m.quantile_ = std::move(quantile);
    m.label_ = std::move(label);
    return m;
  }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::finite; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::string& label() const { return label_; }

  /// supp mu has two or more points.
  bool non_trivial() const { return kind_ != Kind::finite || atoms_.size() >= 2; }

  /// Index of the atom selected by u (finite measures only).
  std::size_t atom_index(double u) const {
    std::size_t i = 0;
    while (i + 1 < cumulative_.size() && u >= cumulative_[i]) ++i;
    return i;
  }

  TorusAngle sample(double u) const {
    switch (kind_) {
      case Kind::finite: return atoms_[atom_index(u)].angle;
      case Kind::uniform: return TorusAngle(two_pi * u);
      case Kind::custom: return TorusAngle(quantile_(u));
    }
    return TorusAngle{};
  }

 private:
  explicit PhaseMeasure(Kind k) : kind_(k) {
    if (k == Kind::uniform) label_ = "uniform";
    if (k == Kind::finite) label_ = "finite";
  }

  Kind kind_;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  std::function<double(double)> quantile_;
  std::string label_;
};

}  // namespace ulyap
