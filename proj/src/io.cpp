#include "folin/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace folin {

using Json = nlohmann::ordered_json;

namespace {

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(what + " is not valid JSON: " + e.what());
  }
}

const Json& field(const Json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) throw InputError(ctx + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& ctx) {
  if (!j.is_number()) throw InputError(ctx + ": expected a number");
  return j.get<double>();
}

std::string text(const Json& j, const std::string& ctx) {
  if (!j.is_string()) throw InputError(ctx + ": expected a string");
  return j.get<std::string>();
}

Eigen::VectorXd vec(const Json& j, const std::string& ctx) {
  if (!j.is_array()) throw InputError(ctx + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], ctx + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd mat(const Json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw InputError(ctx + ": expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rc = ctx + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols || cols == 0) throw InputError(rc + ": rows must be equal-length arrays");
    m.row(static_cast<Eigen::Index>(r)) = vec(j[r], rc).transpose();
  }
  return m;
}

Json mat_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

Json vec_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Expr expression(const Json& j, const std::string& ctx) {
  const std::string s = text(j, ctx);
  try {
    return parse(s);
  } catch (const InputError& e) {
    throw InputError(ctx + ": " + e.what());
  }
}

Box box_from(const Json& j, const std::string& ctx) {
  return Box(vec(field(j, "lower", ctx), ctx + ".lower"), vec(field(j, "upper", ctx), ctx + ".upper"));
}

CharPoly char_poly(const Json& j, const std::string& ctx) {
  if (j.contains("alpha") && j.contains("roots")) throw InputError(ctx + ": give 'alpha' or 'roots', not both");
  if (j.contains("alpha")) return char_from_alpha(vec(j.at("alpha"), ctx + ".alpha"));
  if (j.contains("roots")) {
    std::vector<std::complex<double>> roots;
    for (const auto& r : j.at("roots")) {
      if (r.is_array() && r.size() == 2) {
        roots.emplace_back(number(r[0], ctx + ".roots"), number(r[1], ctx + ".roots"));
      } else if (r.is_string()) {
        const auto parsed = parse_roots(r.get<std::string>());
        if (parsed.size() != 1) throw InputError(ctx + ".roots: one root per string");
        roots.push_back(parsed.front());
      } else {
        roots.emplace_back(number(r, ctx + ".roots"), 0.0);
      }
    }
    return char_from_roots(roots);
  }
  throw InputError(ctx + ": needs 'alpha' or 'roots'");
}

void same(const Eigen::MatrixXd& stored, const Eigen::MatrixXd& rebuilt, const std::string& name) {
  if (stored.rows() != rebuilt.rows() || stored.cols() != rebuilt.cols()) {
    throw InputError("observer " + name + " has the wrong shape for its alpha/beta");
  }
  const double scale = std::max(1.0, rebuilt.cwiseAbs().maxCoeff());
  if ((stored - rebuilt).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw InputError("observer " + name + " disagrees with the companion form built from alpha/beta");
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedSystem parse_system(const std::string& json_text) {
  const Json j = parse_json(json_text, "system file");
  if (!j.is_object()) throw InputError("system file: expected an object");

  if (j.contains("linear")) {
    const Json& l = j.at("linear");
    LTISystem sys;
    sys.F = mat(field(l, "F", "linear"), "linear.F");
    sys.H = mat(field(l, "H", "linear"), "linear.H");
    sys.q = vec(field(l, "q", "linear"), "linear.q").transpose();
    sys.check();
    const Eigen::Index n = sys.n();
    const Box box = j.contains("box") ? box_from(j.at("box"), "box")
                                      : Box(Eigen::VectorXd::Constant(n, -1.0), Eigen::VectorXd::Constant(n, 1.0));
    if (box.dim() != n) throw InputError("box dimension does not match F");
    return LoadedSystem{to_system_model(sys, box), sys, Eigen::VectorXd::Zero(n)};
  }

  std::vector<std::string> states;
  const Json& js = field(j, "states", "system file");
  if (!js.is_array()) throw InputError("states: expected an array of names");
  for (const auto& s : js) states.push_back(text(s, "states"));

  // Parameters may be numbers or expressions over earlier parameters.
  SystemModel::Parameters params;
  if (j.contains("params")) {
    const Json& jp = j.at("params");
    if (!jp.is_object()) throw InputError("params: expected an object");
    std::map<std::string, double> known;
    for (const auto& [name, value] : jp.items()) {
      double v;
      if (value.is_number()) {
        v = value.get<double>();
      } else {
        const Expr e = expression(value, "params." + name);
        try {
          v = Program::compile(e, {}, known)(std::span<const double>());
        } catch (const std::exception& err) {
          throw InputError("params." + name + ": " + err.what());
        }
      }
      known[name] = v;
      params.emplace_back(name, v);
    }
  }

  auto list = [&](const char* key) {
    const Json& a = field(j, key, "system file");
    if (!a.is_array()) throw InputError(std::string(key) + ": expected an array of expressions");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(expression(a[i], std::string(key) + "[" + std::to_string(i) + "]"));
    return out;
  };
  std::vector<Expr> dynamics = list("dynamics");
  std::vector<Expr> outputs = list("outputs");
  Expr functional = expression(field(j, "functional", "system file"), "functional");
  Box box = box_from(field(j, "box", "system file"), "box");

  SystemModel model(states, params, std::move(dynamics), std::move(outputs), std::move(functional), std::move(box));
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.n()));
  if (j.contains("steady_state")) {
    origin = vec(j.at("steady_state"), "steady_state");
    if (origin.size() != static_cast<Eigen::Index>(model.n())) throw InputError("steady_state has wrong size");
    const bool refine = j.value("refine_steady_state", false);
    if (refine) origin = refine_equilibrium(model, origin);
    model = model.shifted(origin);
  }
  return LoadedSystem{std::move(model), std::nullopt, origin};
}

LoadedSystem load_system(const std::string& path) { return parse_system(read_file(path)); }

AnyObserver parse_observer(const std::string& json_text, const SystemModel& system) {
  const Json j = parse_json(json_text, "observer file");
  const std::string kind = text(field(j, "kind", "observer file"), "kind");
  const CharPoly alpha = char_poly(j, "observer file");
  if (kind == "lti") {
    const Eigen::MatrixXd beta = mat(field(j, "beta", "observer file"), "beta");
    if (beta.cols() != static_cast<Eigen::Index>(system.p())) {
      throw InputError("beta has " + std::to_string(beta.cols()) + " columns, system has " +
                       std::to_string(system.p()) + " outputs");
    }
    ObserverLTI obs = synthesize(alpha, beta, /*allow_unstable=*/true);
    if (j.contains("A")) same(mat(j.at("A"), "A"), obs.A, "A");
    if (j.contains("B")) same(mat(j.at("B"), "B"), obs.B, "B");
    if (j.contains("C")) same(mat(j.at("C"), "C"), obs.C, "C");
    if (j.contains("D")) same(mat(j.at("D"), "D"), obs.D, "D");
    return obs;
  }
  if (kind == "general") {
    const Expr z0 = expression(field(j, "Z0", "observer file"), "Z0");
    const Json& jz = field(j, "Z", "observer file");
    if (!jz.is_array()) throw InputError("Z: expected an array of expressions");
    std::vector<Expr> zs;
    for (std::size_t i = 0; i < jz.size(); ++i) zs.push_back(expression(jz[i], "Z[" + std::to_string(i) + "]"));
    std::optional<Expr> inverse;
    if (j.contains("inverse")) inverse = expression(j.at("inverse"), "inverse");
    std::optional<std::pair<double, double>> bracket;
    if (j.contains("bracket")) {
      const Eigen::VectorXd b = vec(j.at("bracket"), "bracket");
      if (b.size() != 2) throw InputError("bracket: expected [lo, hi]");
      bracket = std::make_pair(b[0], b[1]);
    }
    GeneralSpec spec(system, alpha, z0, zs, inverse, bracket);
    return synthesize_general(spec, /*allow_unstable=*/true);
  }
  throw InputError("observer kind must be 'lti' or 'general', got '" + kind + "'");
}

AnyObserver load_observer(const std::string& path, const SystemModel& system) {
  return parse_observer(read_file(path), system);
}

std::string observer_to_json(const ObserverLTI& observer) {
  Json j;
  j["kind"] = "lti";
  j["alpha"] = vec_json(observer.alpha.alpha);
  j["beta"] = mat_json(observer.beta);
  j["A"] = mat_json(observer.A);
  j["B"] = mat_json(observer.B);
  j["C"] = mat_json(observer.C);
  j["D"] = mat_json(observer.D);
  return j.dump(2) + "\n";
}

std::string observer_to_json(const GeneralSpec& spec) {
  Json j;
  j["kind"] = "general";
  j["alpha"] = vec_json(spec.alpha().alpha);
  j["Z0"] = to_string(spec.z0());
  Json zs = Json::array();
  for (const Expr& e : spec.zs()) zs.push_back(to_string(e));
  j["Z"] = zs;
  if (spec.inverse()) j["inverse"] = to_string(*spec.inverse());
  if (spec.bracket()) j["bracket"] = Json::array({spec.bracket()->first, spec.bracket()->second});
  return j.dump(2) + "\n";
}

Scenario parse_scenario(const std::string& json_text, const LoadedSystem& system) {
  const Json j = parse_json(json_text, "scenario file");
  Scenario sc;
  sc.x0 = vec(field(j, "x0", "scenario file"), "x0");
  if (sc.x0.size() != system.origin.size()) throw InputError("scenario x0 has wrong size");
  sc.x0 -= system.origin;
  if (j.contains("xi0")) sc.xi0 = vec(j.at("xi0"), "xi0");
  if (j.contains("init_error")) {
    const Json& e = j.at("init_error");
    sc.init_error = e.is_array() ? vec(e, "init_error") : Eigen::VectorXd::Constant(1, number(e, "init_error"));
  }
  if (sc.xi0 && sc.init_error.size() != 0) throw InputError("scenario gives both xi0 and init_error");
  if (j.contains("t_end")) sc.t_end = number(j.at("t_end"), "t_end");
  if (j.contains("dt")) sc.dt = number(j.at("dt"), "dt");
  if (j.contains("stride")) {
    if (!j.at("stride").is_number_integer()) throw InputError("stride: expected an integer");
    sc.stride = j.at("stride").get<int>();
  }
  return sc;
}

Scenario load_scenario(const std::string& path, const LoadedSystem& system) {
  return parse_scenario(read_file(path), system);
}

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double strict_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("'" + s + "' is not a number");
  }
  if (used != s.size()) throw InputError("'" + s + "' is not a number");
  return v;
}

}  // namespace

Eigen::VectorXd parse_vector(const std::string& s) {
  const auto parts = split_commas(s);
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = strict_double(parts[i]);
  return v;
}

std::vector<std::complex<double>> parse_roots(const std::string& s) {
  std::vector<std::complex<double>> out;
  for (const std::string& tok : split_commas(s)) {
    if (tok.empty()) throw InputError("empty root in list");
    const char last = tok.back();
    if (last != 'j' && last != 'i') {
      out.emplace_back(strict_double(tok), 0.0);
      continue;
    }
    const std::string body = tok.substr(0, tok.size() - 1);
    std::size_t cut = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
      if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
        cut = k;
        break;
      }
    }
    if (cut == std::string::npos) {
      out.emplace_back(0.0, body.empty() || body == "+" ? 1.0 : (body == "-" ? -1.0 : strict_double(body)));
      continue;
    }
    const std::string im = body.substr(cut);
    const double imag = (im == "+") ? 1.0 : (im == "-") ? -1.0 : strict_double(im);
    out.emplace_back(strict_double(body.substr(0, cut)), imag);
  }
  return out;
}

}  // namespace folin
