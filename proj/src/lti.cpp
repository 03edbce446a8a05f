#include "folin/lti.hpp"

#include <algorithm>

#include "folin/lsq.hpp"

namespace folin {

void LTISystem::check() const {
  if (F.rows() < 1 || F.rows() != F.cols()) throw InputError("F must be square and non-empty");
  if (H.rows() < 1 || H.cols() != F.cols()) throw InputError("H must have n columns and at least one row");
  if (q.size() != F.cols()) throw InputError("q must have n entries");
  if (!F.allFinite() || !H.allFinite() || !q.allFinite()) throw InputError("system matrices must be finite");
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double threshold = static_cast<double>(std::max(m.rows(), m.cols())) * sv(0) * 1e-12;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  return rank;
}

int obs_index(const LTISystem& sys) {
  sys.check();
  const Eigen::Index n = sys.n();
  const Eigen::Index p = sys.p();
  Eigen::MatrixXd stacked(0, n);
  Eigen::MatrixXd block = sys.H;
  Eigen::Index rank = 0;
  for (int k = 1; k <= n; ++k) {
    stacked.conservativeResize(stacked.rows() + p, Eigen::NoChange);
    stacked.bottomRows(p) = block;
    rank = numerical_rank(stacked);
    if (rank == n) return k;
    block = block * sys.F;
  }
  throw UnobservableError(rank, n);
}

namespace {

// powers[i] = F^i for i = 0..count-1
std::vector<Eigen::MatrixXd> matrix_powers(const Eigen::MatrixXd& f, int count) {
  std::vector<Eigen::MatrixXd> out;
  out.push_back(Eigen::MatrixXd::Identity(f.rows(), f.cols()));
  for (int i = 1; i < count; ++i) out.push_back(out.back() * f);
  return out;
}

}  // namespace

Condition61 condition_61(const LTISystem& sys, const CharPoly& alpha) {
  sys.check();
  const int v = alpha.order();
  if (v < 1) throw InputError("observer order must be at least 1");
  const Eigen::Index n = sys.n();
  const Eigen::Index p = sys.p();
  const auto powers = matrix_powers(sys.F, v + 1);

  Eigen::MatrixXd m(n, (v + 1) * p);
  for (int k = 0; k <= v; ++k) {
    const Eigen::MatrixXd hf = sys.H * powers[static_cast<std::size_t>(v - k)];
    for (Eigen::Index j = 0; j < p; ++j) m.col(k * p + j) = hf.row(j).transpose();
  }
  Eigen::VectorXd target = Eigen::VectorXd::Zero(n);
  for (int i = 0; i <= v; ++i) {
    target += alpha.coefficient(i) * (sys.q * powers[static_cast<std::size_t>(v - i)]).transpose();
  }

  const double dep_tol = static_cast<double>(std::max(n, (v + 1) * p)) * 1e-12;
  const auto fit = solve_ordered_lsq(m, target, beta_column_preference(v, p), dep_tol);

  Condition61 out;
  out.beta.resize(v + 1, p);
  for (int k = 0; k <= v; ++k) {
    for (Eigen::Index j = 0; j < p; ++j) out.beta(k, j) = fit.solution[k * p + j];
  }
  out.residual = fit.residual_norm / std::max(target.norm(), kResidualFloor);
  out.feasible = out.residual <= kLinearSpanTol;
  return out;
}

Eigen::MatrixXd linear_transform(const LTISystem& sys, const CharPoly& alpha, const Eigen::MatrixXd& beta) {
  const int v = alpha.order();
  if (beta.rows() != v + 1 || beta.cols() != sys.p()) throw InputError("beta has wrong shape for this system");
  const auto powers = matrix_powers(sys.F, v);
  Eigen::MatrixXd t(v, sys.n());
  for (int i = 1; i <= v; ++i) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(sys.n());
    for (int k = 0; k <= v - i; ++k) {
      const Eigen::MatrixXd& fp = powers[static_cast<std::size_t>(v - i - k)];
      row += alpha.coefficient(k) * sys.q * fp - beta.row(k) * sys.H * fp;
    }
    t.row(i - 1) = row;
  }
  return t;
}

ObserverLTI design_corollary(const LTISystem& sys, std::span<const std::complex<double>> roots) {
  const int vo = obs_index(sys);
  const int v = vo - 1;
  if (v < 1) {
    throw InputError("observability index is 1: the functional is a static output map, no dynamic observer needed");
  }
  if (static_cast<int>(roots.size()) != v) {
    throw InputError("expected " + std::to_string(v) + " eigenvalues (observability index minus one), got " +
                     std::to_string(roots.size()));
  }
  const CharPoly alpha = char_from_roots(roots);
  const Condition61 cond = condition_61(sys, alpha);
  if (!cond.feasible) {
    throw NumericalError("span condition failed at order v_o - 1 (residual " + std::to_string(cond.residual) +
                         "); numerical rank trouble");
  }
  return synthesize(alpha, cond.beta, /*allow_unstable=*/true);
}

LuenbergerReport verify_luenberger(const LTISystem& sys, const Eigen::MatrixXd& T, const ObserverLTI& observer,
                                   double tol) {
  if (T.rows() != observer.order() || T.cols() != sys.n()) throw InputError("T must be v x n");
  const Eigen::MatrixXd& a = observer.A;
  const Eigen::MatrixXd& b = observer.B;
  const Eigen::MatrixXd& c = observer.C;
  const Eigen::MatrixXd& d = observer.D;

  LuenbergerReport out;
  const double pde_scale = T.norm() * sys.F.norm() + a.norm() * T.norm() + b.norm() * sys.H.norm();
  out.pde_residual = (T * sys.F - a * T - b * sys.H).norm() / std::max(pde_scale, kResidualFloor);
  const double out_scale = sys.q.norm() + c.norm() * T.norm() + d.norm() * sys.H.norm();
  out.output_residual = (sys.q - c * T - d * sys.H).norm() / std::max(out_scale, kResidualFloor);
  out.pass = out.pde_residual <= tol && out.output_residual <= tol;
  return out;
}

SystemModel to_system_model(const LTISystem& sys, const Box& box) {
  sys.check();
  const Eigen::Index n = sys.n();
  std::vector<std::string> states;
  for (Eigen::Index i = 0; i < n; ++i) states.push_back("x" + std::to_string(i + 1));

  auto linear_form = [&](const Eigen::RowVectorXd& row) {
    Expr e = Expr::binary(NodeKind::kMul, Expr::constant(row[0]), Expr::variable(states[0]));
    for (Eigen::Index k = 1; k < n; ++k) {
      e = Expr::binary(NodeKind::kAdd, e,
                       Expr::binary(NodeKind::kMul, Expr::constant(row[k]),
                                    Expr::variable(states[static_cast<std::size_t>(k)])));
    }
    return e;
  };
  std::vector<Expr> dynamics, outputs;
  for (Eigen::Index i = 0; i < n; ++i) dynamics.push_back(linear_form(sys.F.row(i)));
  for (Eigen::Index j = 0; j < sys.p(); ++j) outputs.push_back(linear_form(sys.H.row(j)));
  return SystemModel(std::move(states), {}, std::move(dynamics), std::move(outputs), linear_form(sys.q), box);
}

}  // namespace folin
