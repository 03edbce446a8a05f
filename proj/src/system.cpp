#include "folin/system.hpp"

#include <cmath>
#include <set>

namespace folin {

Box::Box(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw InputError("box bounds have different lengths");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw InputError("box lower bound must be below upper bound in coordinate " + std::to_string(i));
    }
  }
}

bool Box::contains(const Eigen::VectorXd& x) const {
  if (x.size() != lower.size()) return false;
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

SystemModel::SystemModel(std::vector<std::string> states, Parameters params, std::vector<Expr> dynamics,
                         std::vector<Expr> outputs, Expr functional, Box box)
    : states_(std::move(states)),
      params_(std::move(params)),
      dynamics_(std::move(dynamics)),
      outputs_(std::move(outputs)),
      functional_(std::move(functional)),
      box_(std::move(box)) {
  if (states_.empty()) throw InputError("system needs at least one state");
  if (outputs_.empty()) throw InputError("system needs at least one output");
  if (dynamics_.size() != states_.size()) {
    throw InputError("expected " + std::to_string(states_.size()) + " dynamics expressions, got " +
                     std::to_string(dynamics_.size()));
  }
  if (box_.dim() != static_cast<Eigen::Index>(states_.size())) {
    throw InputError("box dimension does not match state count");
  }
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (!slots_.emplace(states_[i], i).second) throw InputError("duplicate state '" + states_[i] + "'");
  }
  for (const auto& [name, value] : params_) {
    if (slots_.contains(name) || !constants_.emplace(name, value).second) {
      throw InputError("parameter '" + name + "' clashes with another name");
    }
  }
  const std::set<std::string> allowed = names();
  auto prepare = [&](const Expr& e) {
    validate(e, allowed);
    return compile(e);
  };
  for (const Expr& e : dynamics_) dynamics_prog_.push_back(prepare(e));
  for (const Expr& e : outputs_) outputs_prog_.push_back(prepare(e));
  functional_prog_ = prepare(functional_);
}

std::set<std::string> SystemModel::names() const {
  std::set<std::string> out(states_.begin(), states_.end());
  for (const auto& [name, value] : params_) out.insert(name);
  return out;
}

Program SystemModel::compile(const Expr& expr) const { return Program::compile(expr, slots_, constants_); }

Eigen::VectorXd SystemModel::f(const Eigen::VectorXd& x) const {
  const std::span<const double> in(x.data(), static_cast<std::size_t>(x.size()));
  Eigen::VectorXd out(static_cast<Eigen::Index>(n()));
  for (std::size_t i = 0; i < n(); ++i) out[static_cast<Eigen::Index>(i)] = dynamics_prog_[i](in);
  return out;
}

Eigen::VectorXd SystemModel::h(const Eigen::VectorXd& x) const {
  const std::span<const double> in(x.data(), static_cast<std::size_t>(x.size()));
  Eigen::VectorXd out(static_cast<Eigen::Index>(p()));
  for (std::size_t j = 0; j < p(); ++j) out[static_cast<Eigen::Index>(j)] = outputs_prog_[j](in);
  return out;
}

double SystemModel::q(const Eigen::VectorXd& x) const {
  return functional_prog_(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

SystemModel SystemModel::with_box(Box box) const {
  return SystemModel(states_, params_, dynamics_, outputs_, functional_, std::move(box));
}

SystemModel SystemModel::shifted(const Eigen::VectorXd& origin) const {
  if (origin.size() != static_cast<Eigen::Index>(n())) throw InputError("shift origin has wrong dimension");
  std::map<std::string, Expr> replace;
  for (std::size_t i = 0; i < n(); ++i) {
    replace.emplace(states_[i], Expr::binary(NodeKind::kAdd, Expr::variable(states_[i]),
                                             Expr::constant(origin[static_cast<Eigen::Index>(i)])));
  }
  const Eigen::VectorXd h0 = h(origin);
  const double q0 = q(origin);

  std::vector<Expr> dynamics;
  for (const Expr& e : dynamics_) dynamics.push_back(substitute(e, replace));
  std::vector<Expr> outputs;
  for (std::size_t j = 0; j < p(); ++j) {
    outputs.push_back(Expr::binary(NodeKind::kSub, substitute(outputs_[j], replace),
                                   Expr::constant(h0[static_cast<Eigen::Index>(j)])));
  }
  Expr functional = Expr::binary(NodeKind::kSub, substitute(functional_, replace), Expr::constant(q0));
  return SystemModel(states_, params_, std::move(dynamics), std::move(outputs), std::move(functional),
                     Box(box_.lower - origin, box_.upper - origin));
}

Eigen::VectorXd refine_equilibrium(const SystemModel& system, const Eigen::VectorXd& guess, double tol,
                                   int max_iterations) {
  const auto n = static_cast<Eigen::Index>(system.n());
  if (guess.size() != n) throw InputError("equilibrium guess has wrong dimension");
  Eigen::VectorXd x = guess;
  Eigen::MatrixXd jac(n, n);
  std::vector<Jet> seeds(static_cast<std::size_t>(n));
  for (int iter = 0; iter < max_iterations; ++iter) {
    const Eigen::VectorXd fx = system.f(x);
    for (Eigen::Index col = 0; col < n; ++col) {
      for (Eigen::Index i = 0; i < n; ++i) seeds[static_cast<std::size_t>(i)] = Jet(1, {x[i], i == col ? 1.0 : 0.0});
      for (Eigen::Index row = 0; row < n; ++row) {
        const Jet d = system.dynamics_program(static_cast<std::size_t>(row))(std::span<const Jet>(seeds), seeds[0]);
        jac(row, col) = d[1];
      }
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(-fx);
    if (!step.allFinite()) throw NumericalError("singular Jacobian while refining equilibrium");
    x += step;
    if (step.norm() <= 1e-15 * (1.0 + x.norm())) break;
  }
  const double residual = system.f(x).cwiseAbs().maxCoeff();
  if (!(residual <= tol)) {
    throw NumericalError("equilibrium refinement did not converge (residual " + std::to_string(residual) + ")");
  }
  return x;
}

}  // namespace folin
