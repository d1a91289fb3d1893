#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ulyap/cocycle.hpp"
#include "ulyap/measure.hpp"

namespace ulyap {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

/// expr := term (('+'|'-') term)*, term := unary (('*'|'/') unary)*,
/// unary := ('+'|'-') unary | primary, primary := number | pi | sqrt(expr) | (expr)
class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : s_(src) {}

  long double parse() {
    const long double v = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("bad expression \"" + std::string(s_) + "\": " + what);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  bool eat_word(std::string_view w) {
    skip();
    if (s_.substr(i_, w.size()) != w) return false;
    const std::size_t end = i_ + w.size();
    if (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) return false;
    i_ = end;
    return true;
  }

  long double expr() {
    long double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  long double term() {
    long double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) {
        const long double den = unary();
        if (den == 0.0L) fail("division by zero");
        v /= den;
      } else {
        return v;
      }
    }
  }
  long double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return primary();
  }
  long double primary() {
    if (eat('(')) {
      const long double v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (eat_word("pi")) return std::numbers::pi_v<long double>;
    if (eat_word("sqrt")) {
      if (!eat('(')) fail("sqrt needs '('");
      const long double v = expr();
      if (!eat(')')) fail("missing ')'");
      if (v < 0.0L) fail("sqrt of a negative number");
      return std::sqrt(v);
    }
    skip();
    long double v = 0.0L;
    const char* first = s_.data() + i_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == first) fail("expected a number at position " + std::to_string(i_));
    i_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// Evaluates an arithmetic expression such as "pi/2" or "1/sqrt(2)" in long
/// double and rounds once to double.
inline double parse_expression(std::string_view text) {
  const long double v = detail::ExprParser(text).parse();
  const double out = static_cast<double>(v);
  if (!std::isfinite(out)) throw ConfigError("expression \"" + std::string(text) + "\" is not finite");
  return out;
}

/// A number as written in the config: the source text is kept so that the
/// config serializes back exactly as given.
struct Scalar {
  std::string text;
  double value = 0.0;

  static Scalar of(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {std::string(buf, res.ptr), v};
  }
  static Scalar parse(std::string text) {
    const double v = parse_expression(text);
    return {std::move(text), v};
  }
};

struct AtomSpec {
  Scalar angle;
  Scalar prob;
};

struct MeasureSpec {
  enum class Kind { finite, uniform } kind = Kind::finite;
  std::vector<AtomSpec> atoms;

  PhaseMeasure build() const {
    if (kind == Kind::uniform) return PhaseMeasure::uniform();
    std::vector<PhaseMeasure::Atom> a;
    for (const auto& s : atoms) a.push_back({TorusAngle(s.angle.value), s.prob.value});
    return PhaseMeasure::finite(std::move(a));
  }
};

struct GridSpec {
  std::optional<Scalar> start, stop;
  std::uint64_t count = 0;
  std::vector<Scalar> values;  // explicit list, used when non-empty

  std::vector<TorusAngle> build() const {
    std::vector<TorusAngle> g;
    if (!values.empty()) {
      for (const auto& v : values) g.emplace_back(v.value);
      return g;
    }
    const double a = start->value, b = stop->value;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      g.emplace_back(a + f * (b - a));
    }
    return g;
  }
};

enum class OutputFormat { csv, json };

struct RunConfig {
  Model model = Model::anderson;
  Scalar t = Scalar::parse("1/sqrt(2)");
  MeasureSpec measure;
  GridSpec lambda;
  std::uint64_t n = 10000;
  std::uint64_t realizations = 100;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool classify = true;
  std::string output = "-";  // "-" is standard output
  OutputFormat format = OutputFormat::csv;

  /// Throws ConfigError naming the first violated precondition.
  void validate() const {
    if (!(t.value > 0.0 && t.value < 1.0)) throw ConfigError("t must lie strictly inside (0, 1)");
    if (measure.kind == MeasureSpec::Kind::finite) {
      if (measure.atoms.empty()) throw ConfigError("finite measure needs at least one atom");
      try {
        (void)measure.build();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("measure: ") + e.what());
      }
    }
    if (lambda.values.empty()) {
      if (!lambda.start || !lambda.stop) throw ConfigError("lambda grid needs start and stop, or values");
      if (lambda.count < 1) throw ConfigError("lambda grid count must be >= 1");
    }
    if (n < 1) throw ConfigError("n must be >= 1");
    if (classify && n < 100) throw ConfigError("classification uses the ladder n/100, n/10, n: n must be >= 100");
    if (realizations < 2) throw ConfigError("realizations must be >= 2");
  }
};

inline std::string to_string(Model m) { return m == Model::dimer ? "dimer" : "anderson"; }

namespace detail {

inline Scalar scalar_from_json(const nlohmann::json& j, const char* field) {
  if (j.is_string()) return Scalar::parse(j.get<std::string>());
  if (j.is_number()) return Scalar::of(j.get<double>());
  throw ConfigError(std::string(field) + " must be a number or an expression string");
}

inline nlohmann::json scalar_to_json(const Scalar& s) { return s.text; }

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char* known[] = {"model", "t", "measure", "lambda", "n", "realizations",
                                "seed", "workers", "classify", "output", "format"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known)) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  RunConfig c;
  const std::string model = detail::get_or<std::string>(j, "model", "anderson");
  if (model == "anderson") c.model = Model::anderson;
  else if (model == "dimer") c.model = Model::dimer;
  else throw ConfigError("model must be 'anderson' or 'dimer'");
  if (j.contains("t")) c.t = detail::scalar_from_json(j.at("t"), "t");

  if (!j.contains("measure")) throw ConfigError("missing 'measure'");
  const auto& m = j.at("measure");
  const std::string kind = detail::get_or<std::string>(m, "kind", "finite");
  if (kind == "uniform") {
    c.measure.kind = MeasureSpec::Kind::uniform;
  } else if (kind == "finite") {
    if (!m.contains("atoms") || !m.at("atoms").is_array()) throw ConfigError("finite measure needs an 'atoms' array");
    for (const auto& a : m.at("atoms")) {
      if (!a.contains("angle") || !a.contains("prob")) throw ConfigError("each atom needs 'angle' and 'prob'");
      c.measure.atoms.push_back({detail::scalar_from_json(a.at("angle"), "angle"),
                                 detail::scalar_from_json(a.at("prob"), "prob")});
    }
  } else {
    throw ConfigError("measure kind must be 'finite' or 'uniform'");
  }

  if (!j.contains("lambda")) throw ConfigError("missing 'lambda'");
  const auto& g = j.at("lambda");
  if (g.contains("values")) {
    for (const auto& v : g.at("values")) c.lambda.values.push_back(detail::scalar_from_json(v, "lambda"));
    if (c.lambda.values.empty()) throw ConfigError("lambda values must not be empty");
  } else {
    if (g.contains("start")) c.lambda.start = detail::scalar_from_json(g.at("start"), "lambda.start");
    if (g.contains("stop")) c.lambda.stop = detail::scalar_from_json(g.at("stop"), "lambda.stop");
    c.lambda.count = detail::get_or<std::uint64_t>(g, "count", 0);
  }
  c.n = detail::get_or<std::uint64_t>(j, "n", c.n);
  c.realizations = detail::get_or<std::uint64_t>(j, "realizations", c.realizations);
  c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed);
  c.workers = detail::get_or<unsigned>(j, "workers", c.workers);
  c.classify = detail::get_or<bool>(j, "classify", c.classify);
  c.output = detail::get_or<std::string>(j, "output", c.output);
  const std::string fmt = detail::get_or<std::string>(j, "format", "csv");
  if (fmt == "csv") c.format = OutputFormat::csv;
  else if (fmt == "json") c.format = OutputFormat::json;
  else throw ConfigError("format must be 'csv' or 'json'");
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["model"] = to_string(c.model);
  j["t"] = detail::scalar_to_json(c.t);
  if (c.measure.kind == MeasureSpec::Kind::uniform) {
    j["measure"] = {{"kind", "uniform"}};
  } else {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : c.measure.atoms) {
      atoms.push_back({{"angle", detail::scalar_to_json(a.angle)}, {"prob", detail::scalar_to_json(a.prob)}});
    }
    j["measure"] = {{"kind", "finite"}, {"atoms", atoms}};
  }
  if (!c.lambda.values.empty()) {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : c.lambda.values) vs.push_back(detail::scalar_to_json(v));
    j["lambda"] = {{"values", vs}};
  } else {
    j["lambda"] = nlohmann::json::object();
    if (c.lambda.start) j["lambda"]["start"] = detail::scalar_to_json(*c.lambda.start);
    if (c.lambda.stop) j["lambda"]["stop"] = detail::scalar_to_json(*c.lambda.stop);
    j["lambda"]["count"] = c.lambda.count;
  }
  j["n"] = c.n;
  j["realizations"] = c.realizations;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["classify"] = c.classify;
  j["output"] = c.output;
  j["format"] = c.format == OutputFormat::json ? "json" : "csv";
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace ulyap
