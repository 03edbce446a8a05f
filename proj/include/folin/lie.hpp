#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "folin/jet.hpp"
#include "folin/system.hpp"

namespace folin {

/// Taylor coefficients of the flow of dx/dt = F(x) through x0, one jet per state.
///
/// X_0 = x0 and X_{k+1} = [F(X)]_k / (k+1), where [F(X)]_k only depends on
/// X_0..X_k. The result is the unique order-K Taylor polynomial of x(t).
std::vector<Jet> taylor_flow(const SystemModel& system, const Eigen::VectorXd& x0, int order);

/// Evaluates a compiled system expression along a flow expansion.
Jet along_flow(const Program& program, std::span<const Jet> flow);

/// L_F^k f(x0) for k = 0..order, via k! times the Taylor coefficients of f(x(t)).
std::vector<double> lie_derivatives(const SystemModel& system, const Expr& f, const Eigen::VectorXd& x0,
                                    int order);

/// Lie derivatives of every output and of the functional at one point.
struct LieTable {
  Eigen::MatrixXd outputs;     // p x (order+1), (j, i) = L_F^i H_j(x0)
  Eigen::VectorXd functional;  // order+1, i -> L_F^i q(x0)

  int order() const { return static_cast<int>(functional.size()) - 1; }
};

/// One flow expansion shared by all outputs and the functional.
LieTable lie_table(const SystemModel& system, const Eigen::VectorXd& x0, int order);

/// Jet coefficients scaled to derivatives: returns (L^0 g, ..., L^K g).
std::vector<double> derivatives_of(const Jet& jet);

}  // namespace folin
