// ulyap: Lyapunov exponents of the unitary Anderson and dimer models.
//
//   ulyap sweep    --config run.json [overrides]
//   ulyap estimate --config run.json --lambda 0.7
//   ulyap diagnose --config run.json [--lambda 0.7]
//   ulyap verify   [--t 0.999] [--seed N]
//
// Exit codes: 0 success, 1 usage or config error, 2 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ulyap/report.hpp"
#include "ulyap/ulyap.hpp"

using namespace ulyap;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_verify = 2;

struct Overrides {
  std::string config_path;
  std::optional<std::string> t;
  std::optional<std::uint64_t> n, realizations, seed;
  std::optional<unsigned> workers;
  std::optional<std::string> output, format, model;
  bool no_classify = false;
  bool quiet = false;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "run config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--t", o.t, "coupling t in (0,1); expressions like 1/sqrt(2) accepted");
  cmd->add_option("--n", o.n, "chain length (2-steps)");
  cmd->add_option("-R,--realizations", o.realizations, "independent realizations");
  cmd->add_option("--seed", o.seed, "root seed");
  cmd->add_option("-j,--workers", o.workers, "worker threads (0 = all cores)");
  cmd->add_option("-o,--output", o.output, "output path, '-' for stdout");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--model", o.model, "anderson or dimer")->check(CLI::IsMember({"anderson", "dimer"}));
  cmd->add_flag("--no-classify", o.no_classify, "skip the n-ladder classification");
  cmd->add_flag("-q,--quiet", o.quiet, "no progress on stderr");
}

RunConfig resolve(const Overrides& o) {
  json j = config_to_json(load_config(o.config_path));
  if (o.t) j["t"] = *o.t;
  if (o.n) j["n"] = *o.n;
  if (o.realizations) j["realizations"] = *o.realizations;
  if (o.seed) j["seed"] = *o.seed;
  if (o.workers) j["workers"] = *o.workers;
  if (o.output) j["output"] = *o.output;
  if (o.format) j["format"] = *o.format;
  if (o.model) j["model"] = *o.model;
  if (o.no_classify) j["classify"] = false;
  RunConfig c = config_from_json(j);
  c.validate();
  return c;
}

void emit(const RunConfig& c, const std::vector<SweepRow>& rows) {
  auto write = [&](std::ostream& os) {
    if (c.format == OutputFormat::json) write_json(os, c, rows);
    else write_csv(os, c, rows);
  };
  if (c.output == "-") {
    write(std::cout);
    return;
  }
  std::ofstream f(c.output);
  if (!f) throw ConfigError("cannot write output file '" + c.output + "'");
  write(f);
  if (!f) throw ConfigError("failed writing output file '" + c.output + "'");
}

Progress progress_printer(bool quiet) {
  if (quiet) return {};
  return [](std::size_t done, std::size_t total) {
    std::fprintf(stderr, "\r[ulyap] %zu/%zu grid points", done, total);
    if (done == total) std::fprintf(stderr, "\n");
  };
}

int cmd_sweep(const Overrides& o) {
  const RunConfig c = resolve(o);
  emit(c, run_sweep(c, progress_printer(o.quiet)));
  return exit_ok;
}

int cmd_estimate(const Overrides& o, const std::string& lambda) {
  json j = config_to_json(resolve(o));
  j["lambda"] = {{"values", json::array({lambda})}};
  const RunConfig c = config_from_json(j);
  emit(c, run_sweep(c, {}));
  return exit_ok;
}

json witness_json(const GroupWitness& g) {
  return {{"trace_K", g.trace_K}, {"trace_K_closed_form", g.trace_K_closed_form}, {"noncompact", g.noncompact}};
}

int cmd_diagnose(const Overrides& o, const std::optional<std::string>& lambda_text) {
  const RunConfig c = resolve(o);
  if (c.measure.kind != MeasureSpec::Kind::finite) throw ConfigError("diagnose needs a finitely supported measure");
  const PhaseMeasure mu = c.measure.build();
  if (!mu.non_trivial()) {
    json err = {{"error", "non-trivial measure required: the support must contain at least two points"}};
    std::cout << err.dump(2) << "\n";
    return exit_usage;
  }
  const DisorderParam d(c.t.value);
  const TorusAngle lambda = lambda_text ? TorusAngle(parse_expression(*lambda_text)) : c.lambda.build().front();
  const auto& atoms = mu.atoms();

  json rep;
  rep["config"] = config_to_json(c);
  rep["lambda"] = lambda.value();
  rep["pairs"] = json::array();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t k = i + 1; k < atoms.size(); ++k) {
      const TorusAngle a = atoms[i].angle, b = atoms[k].angle;
      json pair;
      pair["a"] = a.value();
      pair["b"] = b.value();
      pair["witness"] = witness_json(build_witness(a + lambda, b + lambda, d));
      const bool opposite = std::abs(TorusAngle::distance(a, b) - pi) <= 1e-10;
      if (c.model == Model::anderson) {
        if (opposite) {
          const PiCaseIrreducibility pc = pi_case_irreducibility(lambda, a, d);
          pair["irreducibility"] = {{"recipe", "hyperbolic-eigenvectors"},
                                    {"witnessed", pc.distinct_images && !pc.degenerate},
                                    {"min_distance", pc.min_distance},
                                    {"critical", pc.degenerate}};
        } else {
          json dirs = json::array();
          bool all = true;
          for (const ProjPoint& v : {ProjPoint(0.0, 1.0), ProjPoint(1.0, d.ratio()), ProjPoint(1.0, 0.0)}) {
            const IrreducibilityWitness w = general_irreducibility_witness(lambda, a, b, d, v);
            all = all && w.witnessed;
            dirs.push_back({{"direction", {v.representative().x.real(), v.representative().y.real()}},
                            {"generator", std::string(1, w.generator)},
                            {"witnessed", w.witnessed},
                            {"min_distance", w.min_distance}});
          }
          pair["irreducibility"] = {{"recipe", "E/D orbits"}, {"witnessed", all}, {"directions", dirs}};
        }
      } else {
        const CriticalSet cs = dimer_critical_set(a, b, d);
        json pts = json::array();
        for (const auto& p : cs.points) pts.push_back(p.value());
        pair["critical_set"] = pts;
        const DimerConjugation dc = dimer_conjugation(a + lambda, b + lambda, d);
        pair["regime"] = to_string(dc.regime);
        const DimerIrreducibility di = dimer_irreducibility_witness(lambda, a, b, d);
        pair["irreducibility"] = {{"witnessed", di.witnessed}, {"note", di.note}};
        bool near = false;
        for (const auto& p : cs.points) near = near || lambda.approx_equal(p, 1e-6);
        pair["lambda_in_critical_set"] = near;
      }
      rep["pairs"].push_back(pair);
    }
  }
  std::cout << rep.dump(2) << "\n";
  return exit_ok;
}

int cmd_verify(const std::vector<std::string>& t_texts, std::optional<std::uint64_t> seed, bool corrupt) {
  VerifyOptions opt;
  if (!t_texts.empty()) {
    opt.t_values.clear();
    for (const auto& s : t_texts) {
      const double t = parse_expression(s);
      if (!(t > 0.0 && t < 1.0)) throw ConfigError("t must lie strictly inside (0, 1)");
      opt.t_values.push_back(t);
    }
  }
  if (seed) opt.seed = *seed;
  if (corrupt) opt.window = corrupted_window;
  const VerifyReport rep = run_verification(opt);
  for (const auto& s : rep.suites) {
    std::printf("%-22s %s  checks=%llu worst=%.3e tol=%.0e time=%.3fs\n", s.name.c_str(), s.passed ? "PASS" : "FAIL",
                static_cast<unsigned long long>(s.checks), s.worst, s.tolerance, s.seconds);
  }
  for (const auto& s : rep.suites) {
    if (!s.passed) {
      std::printf("first counterexample (%s): %s\n", s.name.c_str(), s.counterexample.c_str());
      break;
    }
  }
  return rep.passed() ? exit_ok : exit_verify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov exponents of random unitary band operators"};
  app.require_subcommand(1);

  Overrides sweep_o, est_o, diag_o;
  auto* sweep = app.add_subcommand("sweep", "gamma(lambda) over a grid of quasi-energies");
  add_run_options(sweep, sweep_o);

  auto* estimate = app.add_subcommand("estimate", "gamma at a single quasi-energy");
  add_run_options(estimate, est_o);
  std::string est_lambda;
  estimate->add_option("-l,--lambda", est_lambda, "quasi-energy (radians, expressions accepted)")->required();

  auto* diagnose = app.add_subcommand("diagnose", "non-compactness and irreducibility witnesses");
  add_run_options(diagnose, diag_o);
  std::optional<std::string> diag_lambda;
  diagnose->add_option("-l,--lambda", diag_lambda, "quasi-energy (default: first grid point)");

  auto* verify = app.add_subcommand("verify", "exact-identity suites");
  std::vector<std::string> verify_t;
  std::optional<std::uint64_t> verify_seed;
  bool corrupt = false;
  verify->add_option("--t", verify_t, "coupling values (default 0.3, 1/sqrt(2), 0.9)");
  verify->add_option("--seed", verify_seed, "seed of the randomized suites");
  verify->add_flag("--corrupt-stencil", corrupt, "perturb the band stencil (negative control)")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*sweep) return cmd_sweep(sweep_o);
    if (*estimate) return cmd_estimate(est_o, est_lambda);
    if (*diagnose) return cmd_diagnose(diag_o, diag_lambda);
    if (*verify) return cmd_verify(verify_t, verify_seed, corrupt);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "ulyap: %s\n", e.what());
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "ulyap: %s\n", e.what());
    return exit_usage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ulyap: error: %s\n", e.what());
    return exit_usage;
  }
  return exit_usage;
}
