#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "build_info.hpp"
#include "cajal/diffcheck.hpp"
#include "cajal/eval.hpp"
#include "cajal/fuzz.hpp"
#include "cajal/json_io.hpp"
#include "cajal/parser.hpp"

using namespace cajal;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kVerificationFailure = 2;

struct Options {
  bool json = false;
  std::string file;
  std::string env_file;
  std::string cotangent_file;
  std::string wrt;
  std::size_t trunc = 10;
  bool emit_derivation = false;
  std::uint64_t max_steps = EvalBudget{}.max_steps;
  double h = 1e-5;
  double tol = 1e-5;
  std::size_t trials = 1000;
  std::size_t depth = 6;
  std::size_t max_numeral = 5;
  std::uint64_t seed = 0;
  bool serial = false;
  double lr = 0.1;
  std::size_t steps = 5000;
  std::size_t target = 2;
};

/// Errors reported as `file:line:col: message`.
struct Located : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw JsonFormatError(path + ": " + e.what());
  }
}

std::string where(const std::string& file, SourcePos p) {
  if (p.line == 0) return file;
  return file + ":" + std::to_string(p.line) + ":" + std::to_string(p.column);
}

Expr load_program(const std::string& file) {
  std::string src = read_file(file);
  try {
    return parse(src);
  } catch (const ParseError& e) {
    throw Located(where(file, {e.line(), e.column()}) + ": parse error: " + e.message());
  }
}

Derivation check_program(const std::string& file, const Ctx& ctx, const Expr& e) {
  auto r = try_typecheck(ctx, e);
  if (auto* err = std::get_if<TypeError>(&r))
    throw Located(where(file, err->pos()) + ": " + error_kind_name(err->kind()) + ": " + err->what());
  return std::get<Derivation>(std::move(r));
}

Env load_env(const Options& o) { return o.env_file.empty() ? unit_env() : env_from_json(read_json(o.env_file)); }

/// Dense rows as nested arrays, e.g. [[0,1],[1,0]].
std::string matrix_text(const Matrix& m) {
  std::string s = "[";
  for (std::size_t r = 0; r < m.rows; ++r) {
    s += r ? ",[" : "[";
    for (std::size_t c = 0; c < m.cols; ++c) s += (c ? "," : "") + num(m(r, c));
    s += "]";
  }
  return s + "]";
}

int cmd_check(const Options& o) {
  Env env = load_env(o);
  Derivation d = check_program(o.file, env.ctx, load_program(o.file));
  if (o.json) {
    Json out{{"type", to_string(d.type)}};
    if (o.emit_derivation) out["derivation"] = render(d);
    std::cout << out.dump() << "\n";
  } else {
    std::cout << to_string(d.type) << "\n";
    if (o.emit_derivation) std::cout << render(d);
  }
  return kOk;
}

int cmd_run(const Options& o) {
  Expr e = load_program(o.file);
  Derivation d = check_program(o.file, {}, e);
  EvalResult r = eval_counted(e, EvalBudget{o.max_steps});
  if (o.json)
    std::cout << Json{{"type", to_string(d.type)}, {"value", pretty(r.value)}, {"steps", r.steps}}.dump() << "\n";
  else
    std::cout << pretty(r.value) << "\n";
  return kOk;
}

int cmd_compile(const Options& o) {
  Env env = load_env(o);
  Derivation d = check_program(o.file, env.ctx, load_program(o.file));
  Json v = value_to_json(link(compile(d), env), o.trunc);
  if (o.json)
    std::cout << Json{{"type", to_string(d.type)}, {"denotation", v}}.dump() << "\n";
  else
    std::cout << v.dump() << "\n";
  return kOk;
}

int cmd_matrix(const Options& o) {
  CompiledProgram p = compile(check_program(o.file, {}, load_program(o.file)));
  Matrix m = matrix_of_parallel(p, o.trunc);
  std::cout << (o.json ? matrix_to_json(m).dump() : matrix_text(m)) << "\n";
  return kOk;
}

int cmd_grad(const Options& o) {
  Env env = load_env(o);
  CompiledProgram p = compile(check_program(o.file, env.ctx, load_program(o.file)));
  SemValue cot = value_from_json(read_json(o.cotangent_file), p.result);
  Gradient g = grad_parallel(p, env, o.wrt, cot, o.trunc);
  Json gj;
  if (g.shape.is_base()) {
    gj = value_to_json(from_dense(g.shape, g.values));
  } else {
    Matrix m(g.rows, g.cols);
    m.data = g.values;
    gj = matrix_to_json(m);
  }
  Scalar err = fd_check(p, env, o.wrt, cot, o.trunc, o.h);
  bool ok = err <= o.tol;
  if (o.json) {
    std::cout << Json{{"wrt", o.wrt}, {"gradient", gj}, {"fd_error", err}, {"fd_ok", ok}}.dump() << "\n";
  } else {
    std::cout << gj.dump() << "\n";
    std::cout << "fd_error " << num(err) << (ok ? "" : " (over tolerance)") << "\n";
  }
  if (!ok) std::cerr << "finite-difference check failed: " << num(err) << " > " << num(o.tol) << "\n";
  return ok ? kOk : kVerificationFailure;
}

int cmd_fuzz(const Options& o) {
  GenConfig cfg;
  cfg.seed = o.seed;
  cfg.max_depth = o.depth;
  cfg.max_numeral = o.max_numeral;
  TrialReport rep = o.serial ? run_trials(cfg, o.trials) : run_trials_parallel(cfg, o.trials);
  std::size_t n = rep.verdicts.size();
  if (o.json) {
    Json coverage = Json::object();
    for (int r = 0; r < kRuleCount; ++r) {
      std::size_t c = rep.rule_presence[r];
      coverage[rule_name(static_cast<Rule>(r))] = {{"count", c}, {"fraction", n ? double(c) / n : 0.0}};
    }
    Json cex = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
      const Verdict& v = rep.verdicts[i];
      if (v.pass) continue;
      cex.push_back({{"trial", i},
                     {"program", pretty(v.program)},
                     {"counterexample", pretty(v.counterexample)},
                     {"reason", v.reason}});
    }
    std::cout << Json{{"seed", o.seed},
                      {"trials", n},
                      {"passed", n - rep.failures},
                      {"failed", rep.failures},
                      {"budget_exceeded", rep.budget_exceeded},
                      {"stuck", rep.stuck},
                      {"coverage", coverage},
                      {"counterexamples", cex}}
                     .dump()
              << "\n";
  } else {
    std::cout << "seed " << o.seed << ": " << n - rep.failures << "/" << n << " passed, "
              << rep.budget_exceeded << " over budget, " << rep.stuck << " stuck\n";
    for (int r = 0; r < kRuleCount; ++r)
      std::cout << "  " << rule_name(static_cast<Rule>(r)) << " " << rep.rule_presence[r] << "/" << n
                << "\n";
    for (std::size_t i = 0; i < n; ++i) {
      const Verdict& v = rep.verdicts[i];
      if (v.pass) continue;
      std::cout << "FAIL trial " << i << ": " << v.reason << "\n  program: " << pretty(v.program)
                << "\n  counterexample: " << pretty(v.counterexample) << "\n";
    }
  }
  return rep.failures == 0 ? kOk : kVerificationFailure;
}

int cmd_train(const Options& o) {
  TrainConfig cfg;
  cfg.lr = o.lr;
  cfg.steps = o.steps;
  cfg.trunc = o.trunc;
  cfg.target_step = o.target;
  TrainResult r = toy_train(cfg);
  if (o.json) {
    Json losses = Json::array();
    for (Scalar l : r.losses) losses.push_back(std::isfinite(l) ? Json(l) : Json(num(l)));
    std::cout << Json{{"losses", losses}, {"counts", r.counts}, {"argmax", r.argmax}}.dump() << "\n";
  } else {
    std::cout << "step,loss\n";
    for (std::size_t i = 0; i < r.losses.size(); ++i) std::cout << i << "," << num(r.losses[i]) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Linear programs with iteration, compiled to multilinear maps"};
  app.set_version_flag("--version", std::string("cajal ") + CAJAL_BUILD_INFO);
  app.add_flag("--json", o.json, "Machine-readable output");
  app.require_subcommand(1);
  app.fallthrough();

  auto file_arg = [&](CLI::App* sub) { sub->add_option("file", o.file, "Program source")->required(); };
  auto trunc_opt = [&](CLI::App* sub) {
    sub->add_option("--trunc", o.trunc, "Entries kept on Nat sides")->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "Typecheck a program");
  file_arg(check);
  check->add_option("--env", o.env_file, "Environment whose bindings form the context");
  check->add_flag("--emit-derivation", o.emit_derivation, "Print the typing derivation");

  auto* run = app.add_subcommand("run", "Evaluate a closed program");
  file_arg(run);
  run->add_option("--max-steps", o.max_steps, "Evaluation step budget");

  auto* comp = app.add_subcommand("compile", "Print the denotation as JSON");
  file_arg(comp);
  comp->add_option("--env", o.env_file, "Environment JSON");
  trunc_opt(comp);

  auto* mat = app.add_subcommand("matrix", "Print the truncated matrix of a closed map");
  file_arg(mat);
  trunc_opt(mat);

  auto* gr = app.add_subcommand("grad", "Gradient of <cotangent, program> in one binder");
  file_arg(gr);
  gr->add_option("--env", o.env_file, "Environment JSON")->required();
  gr->add_option("--wrt", o.wrt, "Binder to differentiate in")->required();
  gr->add_option("--cotangent", o.cotangent_file, "Cotangent value JSON")->required();
  trunc_opt(gr);
  gr->add_option("--step", o.h, "Finite-difference step")->check(CLI::PositiveNumber);
  gr->add_option("--tol", o.tol, "Finite-difference tolerance");

  auto* fz = app.add_subcommand("fuzz", "Differential testing of evaluation against compilation");
  fz->add_option("--trials", o.trials, "Number of programs");
  fz->add_option("--depth", o.depth, "Maximum program depth")->check(CLI::PositiveNumber);
  fz->add_option("--max-numeral", o.max_numeral, "Largest generated numeral");
  fz->add_option("--seed", o.seed, "Base seed")->envname("CAJAL_SEED");
  fz->add_flag("--serial", o.serial, "Run trials on one thread");

  auto* tr = app.add_subcommand("demo-train", "Fit an iteration count by gradient descent");
  tr->add_option("--lr", o.lr, "Learning rate");
  tr->add_option("--steps", o.steps, "Gradient steps");
  tr->add_option("--target", o.target, "Step of the system to match");
  trunc_opt(tr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub == check) return cmd_check(o);
    if (sub == run) return cmd_run(o);
    if (sub == comp) return cmd_compile(o);
    if (sub == mat) return cmd_matrix(o);
    if (sub == gr) return cmd_grad(o);
    if (sub == fz) return cmd_fuzz(o);
    return cmd_train(o);
  } catch (const Located& e) {
    std::cerr << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kInputError;
}
