#include "folin/lie.hpp"

#include <string>

namespace folin {

namespace {

void check_point(const SystemModel& system, const Eigen::VectorXd& x0, int order) {
  if (x0.size() != static_cast<Eigen::Index>(system.n())) {
    throw InputError("state vector has " + std::to_string(x0.size()) + " entries, system has " +
                     std::to_string(system.n()));
  }
  if (order < 0 || order > kMaxJetOrder) {
    throw InputError("Lie derivative order " + std::to_string(order) + " outside [0, " +
                     std::to_string(kMaxJetOrder) + "]");
  }
}

}  // namespace

std::vector<Jet> taylor_flow(const SystemModel& system, const Eigen::VectorXd& x0, int order) {
  check_point(system, x0, order);
  const std::size_t n = system.n();
  std::vector<Jet> flow;
  flow.reserve(n);
  for (std::size_t i = 0; i < n; ++i) flow.emplace_back(order, x0[static_cast<Eigen::Index>(i)]);

  std::vector<Jet> truncated(n);
  for (int k = 0; k < order; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      Jet t(k, 0.0);
      for (int m = 0; m <= k; ++m) t[m] = flow[i][m];
      truncated[i] = t;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Jet fi = system.dynamics_program(i)(std::span<const Jet>(truncated), truncated[0]);
      flow[i][k + 1] = fi[k] / static_cast<double>(k + 1);
    }
  }
  return flow;
}

Jet along_flow(const Program& program, std::span<const Jet> flow) { return program(flow, flow.front()); }

std::vector<double> derivatives_of(const Jet& jet) {
  std::vector<double> out(jet.coefficients().begin(), jet.coefficients().end());
  scale_by_factorials(out);
  return out;
}

std::vector<double> lie_derivatives(const SystemModel& system, const Expr& f, const Eigen::VectorXd& x0,
                                    int order) {
  validate(f, system.names());
  const Program program = system.compile(f);
  const std::vector<Jet> flow = taylor_flow(system, x0, order);
  return derivatives_of(along_flow(program, flow));
}

LieTable lie_table(const SystemModel& system, const Eigen::VectorXd& x0, int order) {
  const std::vector<Jet> flow = taylor_flow(system, x0, order);
  LieTable table;
  table.outputs.resize(static_cast<Eigen::Index>(system.p()), order + 1);
  for (std::size_t j = 0; j < system.p(); ++j) {
    const std::vector<double> d = derivatives_of(along_flow(system.output_program(j), flow));
    for (int i = 0; i <= order; ++i) table.outputs(static_cast<Eigen::Index>(j), i) = d[static_cast<std::size_t>(i)];
  }
  const std::vector<double> dq = derivatives_of(along_flow(system.functional_program(), flow));
  table.functional = Eigen::Map<const Eigen::VectorXd>(dq.data(), order + 1);
  return table;
}

}  // namespace folin
