#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "folin/io.hpp"

namespace folin {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string row(const Eigen::MatrixXd& m, Eigen::Index r) {
  std::string s;
  for (Eigen::Index c = 0; c < m.cols(); ++c) s += (c ? ", " : "") + num(m(r, c));
  return s;
}

void print_matrix(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) out << name << (m.rows() > 1 ? "[" + std::to_string(r + 1) + "]" : "") << ": " << row(m, r) << "\n";
}

std::string root_text(const std::complex<double>& z) {
  if (z.imag() == 0.0) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? "-" : "+") + num(std::abs(z.imag())) + "j";
}

void print_alpha(std::ostream& out, const CharPoly& alpha) {
  out << "alpha: " << row(alpha.alpha.transpose(), 0) << "\n";
  out << "roots: ";
  for (std::size_t i = 0; i < alpha.roots.size(); ++i) out << (i ? ", " : "") << root_text(alpha.roots[i]);
  out << "\n";
  out << "stable: " << (alpha.hurwitz ? "yes" : "no") << "\n";
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  f << body;
  if (!f) throw InputError("write to '" + path + "' failed");
}

// Flags shared by check and design.
struct SpanFlags {
  std::string system;
  std::optional<int> order;
  std::string roots, alpha;
  bool joint = false;
  long samples = 200;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  bool skip = false;
};

void add_span_flags(CLI::App* cmd, SpanFlags& f) {
  cmd->add_option("system", f.system, "system JSON file")->required();
  cmd->add_option("--order,-v", f.order, "observer order v");
  auto* r = cmd->add_option("--roots", f.roots, "eigenvalues, comma separated (re+imj for complex)");
  auto* a = cmd->add_option("--alpha", f.alpha, "characteristic coefficients alpha_1..alpha_v");
  auto* j = cmd->add_flag("--joint", f.joint, "treat alpha as unknown");
  r->excludes(a)->excludes(j);
  a->excludes(j);
  cmd->add_option("--samples,-N", f.samples, "number of sample points")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "sampling seed");
  cmd->add_option("--tol", f.tol, "relative residual tolerance")->check(CLI::PositiveNumber);
  cmd->add_flag("--skip-bad-samples", f.skip, "drop samples where evaluation fails instead of stopping");
}

std::optional<CharPoly> requested_alpha(const SpanFlags& f) {
  if (!f.roots.empty()) return char_from_roots(parse_roots(f.roots));
  if (!f.alpha.empty()) return char_from_alpha(parse_vector(f.alpha));
  return std::nullopt;
}

int requested_order(const SpanFlags& f, const std::optional<CharPoly>& alpha) {
  if (!alpha && !f.joint) throw InputError("give one of --roots, --alpha or --joint");
  if (alpha) {
    if (f.order && *f.order != alpha->order()) {
      throw InputError("--order " + std::to_string(*f.order) + " disagrees with " + std::to_string(alpha->order()) +
                       " eigenvalues/coefficients");
    }
    return alpha->order();
  }
  if (!f.order) throw InputError("--joint needs --order");
  if (*f.order < 1) throw InputError("--order must be at least 1");
  return *f.order;
}

struct SpanOutcome {
  CharPoly alpha;
  BetaSet beta;
  int code = 0;
};

SpanOutcome run_span(const SpanFlags& f, const LoadedSystem& sys, std::ostream& out) {
  const auto given = requested_alpha(f);
  const int v = requested_order(f, given);
  SpanOptions opt;
  opt.tol = f.tol;
  opt.policy = f.skip ? SamplePolicy::kSkip : SamplePolicy::kFail;
  const SampleSet samples = sample(sys.model.box(), f.samples, f.seed);

  SpanOutcome res;
  if (given) {
    res.alpha = *given;
    res.beta = solve_beta(sys.model, samples, v, res.alpha, opt);
  } else {
    JointSolution js = solve_joint(sys.model, samples, v, opt);
    res.alpha = js.alpha;
    res.beta = js.beta;
  }

  out << "system: " << f.system << "\n";
  out << "order: " << v << "\n";
  out << "mode: " << (given ? "fixed alpha" : "joint") << "\n";
  print_alpha(out, res.alpha);
  out << "samples: " << samples.count() << " (seed " << f.seed << "), skipped " << res.beta.skipped_samples.size()
      << "\n";
  out << "residual: " << num(res.beta.residual) << "\n";
  out << "tolerance: " << num(res.beta.tolerance) << "\n";
  out << "condition: " << num(res.beta.condition) << "\n";
  for (Eigen::Index k = 0; k < res.beta.rows.rows(); ++k) out << "beta_" << k << ": " << row(res.beta.rows, k) << "\n";
  if (res.beta.feasible && !res.beta.ill_conditioned) {
    const SampleSet fresh = sample(sys.model.box(), f.samples, f.seed + 1);
    out << "fresh-sample residual: " << num(span_residual(sys.model, fresh, res.alpha, res.beta.rows)) << "\n";
  }
  if (res.beta.ill_conditioned) {
    out << "verdict: ill-conditioned\n";
    res.code = 3;
  } else if (!res.beta.feasible) {
    out << "verdict: infeasible\n";
    res.code = 2;
  } else {
    out << "verdict: feasible\n";
  }
  return res;
}

void print_observer(std::ostream& out, const ObserverLTI& obs) {
  print_matrix(out, "A", obs.A);
  print_matrix(out, "B", obs.B);
  print_matrix(out, "C", obs.C);
  print_matrix(out, "D", obs.D);
}

int cmd_check(const SpanFlags& f, std::ostream& out) {
  const LoadedSystem sys = load_system(f.system);
  return run_span(f, sys, out).code;
}

int design_lti(const SpanFlags& f, const LoadedSystem& sys, const std::string& out_path, std::ostream& out) {
  if (!sys.linear) throw InputError("--lti needs a linear system file");
  if (f.roots.empty() && f.alpha.empty()) throw InputError("--lti needs --roots or --alpha");
  const LTISystem& lin = *sys.linear;
  const int vo = obs_index(lin);
  out << "system: " << f.system << "\n";
  out << "observability index: " << vo << "\n";
  const CharPoly alpha = *requested_alpha(f);
  ObserverLTI obs;
  if (alpha.order() == vo - 1) {
    obs = design_corollary(lin, alpha.roots);
  } else {
    const Condition61 cond = condition_61(lin, alpha);
    out << "order: " << alpha.order() << "\n";
    out << "residual: " << num(cond.residual) << "\n";
    if (!cond.feasible) {
      out << "verdict: infeasible\n";
      return 2;
    }
    obs = synthesize(alpha, cond.beta, /*allow_unstable=*/true);
  }
  out << "order: " << obs.order() << "\n";
  print_alpha(out, obs.alpha);
  for (Eigen::Index k = 0; k < obs.beta.rows(); ++k) out << "beta_" << k << ": " << row(obs.beta, k) << "\n";
  print_observer(out, obs);
  const Eigen::MatrixXd t = linear_transform(lin, obs.alpha, obs.beta);
  print_matrix(out, "T", t);
  const LuenbergerReport rep = verify_luenberger(lin, t, obs);
  out << "luenberger pde residual: " << num(rep.pde_residual) << "\n";
  out << "luenberger output residual: " << num(rep.output_residual) << "\n";
  if (!rep.pass) {
    out << "verdict: verification failed\n";
    return 3;
  }
  out << "verdict: feasible\n";
  if (!out_path.empty()) {
    write_text(out_path, observer_to_json(obs));
    out << "written: " << out_path << "\n";
  }
  return 0;
}

int cmd_design(const SpanFlags& f, bool lti, bool allow_unstable, const std::string& out_path, std::ostream& out) {
  const LoadedSystem sys = load_system(f.system);
  if (lti) return design_lti(f, sys, out_path, out);

  const SpanOutcome res = run_span(f, sys, out);
  if (res.code != 0) return res.code;
  const ObserverLTI obs = synthesize(res.alpha, res.beta, allow_unstable);
  print_observer(out, obs);

  const SampleSet fresh = sample(sys.model.box(), f.samples, f.seed + 1);
  const VerifyReport pde = verify_pde(sys.model, obs, fresh, f.tol);
  const VerifyReport output = verify_output(sys.model, obs, fresh, f.tol);
  out << "verify pde (fresh samples): " << num(pde.max_mismatch) << (pde.pass ? " pass" : " FAIL") << "\n";
  out << "verify output (fresh samples): " << num(output.max_mismatch) << (output.pass ? " pass" : " FAIL") << "\n";
  if (!pde.pass || !output.pass) {
    out << "verdict: verification failed, no observer written\n";
    return 2;
  }
  if (!out_path.empty()) {
    write_text(out_path, observer_to_json(obs));
    out << "written: " << out_path << "\n";
  } else {
    out << observer_to_json(obs);
  }
  return 0;
}

struct SimFlags {
  std::string system, observer, scenario, out_csv;
  std::string x0, xi0, init_error;
  bool consistent = false;
  std::optional<double> t_end, dt;
  std::optional<int> stride;
  double tol = 1e-6;
};

int cmd_simulate(const SimFlags& f, std::ostream& out) {
  const LoadedSystem sys = load_system(f.system);
  const AnyObserver obs = load_observer(f.observer, sys.model);
  const Eigen::Index v = std::visit([](const auto& o) { return o.A.rows(); }, obs);

  Scenario sc;
  if (!f.scenario.empty()) {
    sc = load_scenario(f.scenario, sys);
  }
  if (!f.x0.empty()) {
    const Eigen::VectorXd raw = parse_vector(f.x0);
    if (raw.size() != sys.origin.size()) throw InputError("--x0 has wrong size");
    sc.x0 = raw - sys.origin;
  }
  if (sc.x0.size() == 0) throw InputError("initial state needed: --x0 or --scenario");
  if (!f.xi0.empty() || !f.init_error.empty() || f.consistent) {
    sc.xi0.reset();
    sc.init_error.resize(0);
    if (!f.xi0.empty()) sc.xi0 = parse_vector(f.xi0);
    if (!f.init_error.empty()) sc.init_error = parse_vector(f.init_error);
  }
  if (sc.init_error.size() != 0 && sc.init_error.size() != v) {
    throw InputError("initialization error needs " + std::to_string(v) + " entries");
  }
  if (f.t_end) sc.t_end = f.t_end;
  if (f.dt) sc.dt = f.dt;
  if (f.stride) sc.stride = f.stride;
  if (!sc.t_end || !sc.dt) throw InputError("--t-end and --dt needed (or in the scenario)");

  SimConfig cfg;
  cfg.t_end = *sc.t_end;
  cfg.dt = *sc.dt;
  cfg.x0 = sc.x0;
  cfg.xi0 = sc.xi0;
  cfg.xi_offset = sc.init_error;
  cfg.stride = sc.stride.value_or(1);

  const Trajectory tr = simulate(sys.model, obs, cfg);
  if (!f.out_csv.empty()) export_csv(tr, f.out_csv);

  const DecayReport rep = error_decay_check(tr, f.tol);
  out << "records: " << tr.size() << "\n";
  out << "t_end: " << num(tr.t[tr.size() - 1]) << "\n";
  out << "initial error: " << row(tr.e0.transpose(), 0) << "\n";
  out << "err(0): " << num(tr.e_out[0]) << "\n";
  out << "err(t_end): " << num(tr.e_out[tr.size() - 1]) << "\n";
  out << "err_ref(t_end): " << num(tr.e_ref[tr.size() - 1]) << "\n";
  out << "max deviation from linear reference: " << num(rep.max_deviation) << "\n";
  out << "relative deviation: " << num(rep.relative) << "\n";
  out << "manifold residual: " << num(manifold_residual(tr)) << "\n";
  if (!f.out_csv.empty()) out << "written: " << f.out_csv << "\n";
  out << "verdict: " << (rep.pass ? "pass" : "fail") << "\n";
  return rep.pass ? 0 : 2;
}

struct GeneralFlags {
  std::string system, spec;
  long samples = 200;
  std::uint64_t seed = 1;
  double tol = 1e-8;
};

int cmd_verify_general(const GeneralFlags& f, std::ostream& out) {
  const LoadedSystem sys = load_system(f.system);
  const AnyObserver any = load_observer(f.spec, sys.model);
  const auto* obs = std::get_if<GeneralObserver>(&any);
  if (!obs) throw InputError("verify-general needs an observer file of kind 'general'");
  const SampleSet samples = sample(sys.model.box(), f.samples, f.seed);
  const VerifyReport rep = verify_71(sys.model, obs->spec, samples, f.tol);
  out << "system: " << f.system << "\n";
  out << "order: " << obs->order() << "\n";
  print_alpha(out, obs->spec.alpha());
  out << "samples: " << samples.count() << " (seed " << f.seed << ")\n";
  out << "mismatch: " << num(rep.max_mismatch) << "\n";
  out << "tolerance: " << num(rep.tolerance) << "\n";
  print_matrix(out, "A", obs->A);
  print_matrix(out, "C", obs->C);
  out << "G: " << to_string(obs->spec.z0()) << "\n";
  for (int m = 1; m <= obs->order(); ++m) out << "Z" << m << ": " << to_string(obs->spec.zs()[static_cast<std::size_t>(m - 1)]) << "\n";
  out << "verdict: " << (rep.pass ? "pass" : "fail") << "\n";
  return rep.pass ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Functional observers with linear error dynamics", "folin"};
  app.require_subcommand(1);

  SpanFlags check_flags;
  auto* check = app.add_subcommand("check", "test the span condition for a given order");
  add_span_flags(check, check_flags);

  SpanFlags design_flags;
  bool design_lti_flag = false, allow_unstable = false;
  std::string design_out;
  auto* design = app.add_subcommand("design", "synthesize and verify an observer");
  add_span_flags(design, design_flags);
  design->add_flag("--lti", design_lti_flag, "linear system: exact design (observability index minus one)");
  design->add_flag("--allow-unstable", allow_unstable, "accept a non-Hurwitz characteristic polynomial");
  design->add_option("--out,-o", design_out, "observer JSON to write");

  SpanFlags lti_flags;
  std::string lti_out;
  auto* lti = app.add_subcommand("lti", "linear systems: observability index and exact design");
  lti->add_option("system", lti_flags.system, "linear system JSON file")->required();
  lti->add_option("--roots", lti_flags.roots, "eigenvalues, comma separated");
  lti->add_option("--alpha", lti_flags.alpha, "characteristic coefficients");
  lti->add_option("--out,-o", lti_out, "observer JSON to write");

  SimFlags sim_flags;
  auto* simulate_cmd = app.add_subcommand("simulate", "co-simulate plant and observer");
  simulate_cmd->add_option("system", sim_flags.system, "system JSON file")->required();
  simulate_cmd->add_option("observer", sim_flags.observer, "observer JSON file")->required();
  simulate_cmd->add_option("--scenario", sim_flags.scenario, "scenario JSON file");
  simulate_cmd->add_option("--x0", sim_flags.x0, "initial plant state, raw coordinates");
  auto* xi0 = simulate_cmd->add_option("--xi0", sim_flags.xi0, "initial observer state");
  auto* ie = simulate_cmd->add_option("--init-error", sim_flags.init_error, "observer start = T(x0) + this");
  auto* cons = simulate_cmd->add_flag("--consistent", sim_flags.consistent, "observer start = T(x0)");
  xi0->excludes(ie)->excludes(cons);
  ie->excludes(cons);
  simulate_cmd->add_option("--t-end", sim_flags.t_end, "final time");
  simulate_cmd->add_option("--dt", sim_flags.dt, "fixed step");
  simulate_cmd->add_option("--stride", sim_flags.stride, "record every k-th step");
  simulate_cmd->add_option("--out,-o", sim_flags.out_csv, "trajectory CSV to write");
  simulate_cmd->add_option("--tol", sim_flags.tol, "relative tolerance of the error check");

  GeneralFlags gen_flags;
  auto* general = app.add_subcommand("verify-general", "check a generalized observer specification");
  general->add_option("system", gen_flags.system, "system JSON file")->required();
  general->add_option("spec", gen_flags.spec, "observer JSON file of kind general")->required();
  general->add_option("--samples,-N", gen_flags.samples, "number of sample points")->check(CLI::PositiveNumber);
  general->add_option("--seed", gen_flags.seed, "sampling seed");
  general->add_option("--tol", gen_flags.tol, "relative tolerance")->check(CLI::PositiveNumber);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*check) return cmd_check(check_flags, out);
    if (*design) return cmd_design(design_flags, design_lti_flag, allow_unstable, design_out, out);
    if (*lti) return design_lti(lti_flags, load_system(lti_flags.system), lti_out, out);
    if (*simulate_cmd) return cmd_simulate(sim_flags, out);
    if (*general) return cmd_verify_general(gen_flags, out);
  } catch (const SimulationFailure& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace folin
