#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "folin/expr.hpp"

namespace folin {

/// Axis-aligned sampling region, lower < upper in every coordinate.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Box() = default;
  Box(Eigen::VectorXd lo, Eigen::VectorXd hi);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Eigen::VectorXd& x) const;
};

/// Unforced nonlinear system dx/dt = F(x), y = H(x), z = q(x).
///
/// Expressions are written over state and parameter names. Parameters are
/// folded to constants when the expressions are compiled, so every
/// evaluation path (reals or jets) sees the same numbers.
class SystemModel {
 public:
  using Parameters = std::vector<std::pair<std::string, double>>;

  SystemModel(std::vector<std::string> states, Parameters params, std::vector<Expr> dynamics,
              std::vector<Expr> outputs, Expr functional, Box box);

  std::size_t n() const { return states_.size(); }
  std::size_t p() const { return outputs_.size(); }

  const std::vector<std::string>& state_names() const { return states_; }
  const Parameters& parameters() const { return params_; }
  const std::vector<Expr>& dynamics() const { return dynamics_; }
  const std::vector<Expr>& outputs() const { return outputs_; }
  const Expr& functional() const { return functional_; }
  const Box& box() const { return box_; }

  /// State and parameter names: the vocabulary every system expression must use.
  std::set<std::string> names() const;

  /// Compiles an expression over this system's states (slots) and parameters (constants).
  Program compile(const Expr& expr) const;

  const Program& dynamics_program(std::size_t i) const { return dynamics_prog_[i]; }
  const Program& output_program(std::size_t j) const { return outputs_prog_[j]; }
  const Program& functional_program() const { return functional_prog_; }

  Eigen::VectorXd f(const Eigen::VectorXd& x) const;
  Eigen::VectorXd h(const Eigen::VectorXd& x) const;
  double q(const Eigen::VectorXd& x) const;

  /// Same system with a different sampling box.
  SystemModel with_box(Box box) const;

  /// Deviation coordinates around `origin`: x' = x - origin, with outputs and
  /// functional re-zeroed so that H'(0) = 0 and q'(0) = 0. The box is shifted too.
  SystemModel shifted(const Eigen::VectorXd& origin) const;

 private:
  std::vector<std::string> states_;
  Parameters params_;
  std::vector<Expr> dynamics_;
  std::vector<Expr> outputs_;
  Expr functional_;
  Box box_;

  std::map<std::string, std::size_t> slots_;
  std::map<std::string, double> constants_;
  std::vector<Program> dynamics_prog_;
  std::vector<Program> outputs_prog_;
  Program functional_prog_;
};

/// Newton iteration for F(x) = 0 from `guess`, Jacobian by first-order jets.
/// Throws NumericalError when the residual does not drop below `tol` (max-norm).
Eigen::VectorXd refine_equilibrium(const SystemModel& system, const Eigen::VectorXd& guess,
                                   double tol = 1e-9, int max_iterations = 50);

}  // namespace folin
