#include "folin/synth.hpp"

#include <algorithm>
#include <cmath>

#include "folin/parallel.hpp"

namespace folin {

ObserverLTI synthesize(const CharPoly& alpha, const Eigen::MatrixXd& beta, bool allow_unstable) {
  const int v = alpha.order();
  if (v < 1) throw InputError("observer order must be at least 1");
  if (beta.rows() != v + 1) {
    throw InputError("beta has " + std::to_string(beta.rows()) + " rows, expected " + std::to_string(v + 1));
  }
  if (beta.cols() < 1) throw InputError("beta needs at least one column");
  if (!alpha.hurwitz && !allow_unstable) {
    throw InputError("characteristic polynomial is not Hurwitz (pass allow_unstable to study it anyway)");
  }
  ObserverLTI obs;
  obs.A = companion(alpha.alpha);
  obs.B.resize(v, beta.cols());
  for (int i = 1; i <= v; ++i) {
    const int k = v + 1 - i;
    obs.B.row(i - 1) = beta.row(k) - alpha.coefficient(k) * beta.row(0);
  }
  obs.C = Eigen::MatrixXd::Zero(1, v);
  obs.C(0, v - 1) = 1.0;
  obs.D = beta.row(0);
  obs.alpha = alpha;
  obs.beta = beta;
  return obs;
}

ObserverLTI synthesize(const CharPoly& alpha, const BetaSet& beta, bool allow_unstable) {
  if (!beta.feasible) throw InputError("span condition not satisfied; no observer to synthesize");
  return synthesize(alpha, beta.rows, allow_unstable);
}

BetaSet beta_from_observer(const ObserverLTI& observer, const CharPoly& alpha) {
  const int v = observer.order();
  if (alpha.order() != v) throw InputError("characteristic polynomial order does not match observer");
  const Eigen::Index p = observer.outputs();
  if (observer.C.cols() != v || observer.D.cols() != p) throw InputError("observer matrices have inconsistent shapes");

  // CA^m B for m = 0..v-1
  std::vector<Eigen::RowVectorXd> markov;
  Eigen::RowVectorXd ca = observer.C.row(0);
  for (int m = 0; m < v; ++m) {
    markov.emplace_back(ca * observer.B);
    ca = ca * observer.A;
  }
  BetaSet out;
  out.rows.resize(v + 1, p);
  out.rows.row(0) = observer.D.row(0);
  for (int k = 1; k <= v; ++k) {
    Eigen::RowVectorXd b = alpha.coefficient(k) * observer.D.row(0);
    for (int i = 0; i < k; ++i) b += alpha.coefficient(i) * markov[static_cast<std::size_t>(k - 1 - i)];
    out.rows.row(k) = b;
  }
  out.feasible = true;
  return out;
}

Eigen::VectorXd transform_from_table(const LieTable& table, const CharPoly& alpha, const Eigen::MatrixXd& beta,
                                     int extra) {
  const int v = alpha.order();
  if (table.order() < v - 1 + extra) throw InputError("Lie table order too low for the transform");
  Eigen::VectorXd t(v);
  for (int i = 1; i <= v; ++i) {
    double sum = 0.0;
    for (int k = 0; k <= v - i; ++k) {
      const int d = v - i - k + extra;
      sum += alpha.coefficient(k) * table.functional[d];
      sum -= beta.row(k).dot(table.outputs.col(d));
    }
    t[i - 1] = sum;
  }
  return t;
}

Eigen::VectorXd transform_eval(const SystemModel& system, const CharPoly& alpha, const Eigen::MatrixXd& beta,
                               const Eigen::VectorXd& x) {
  if (beta.rows() != alpha.order() + 1 || beta.cols() != static_cast<Eigen::Index>(system.p())) {
    throw InputError("beta has wrong shape for this system");
  }
  return transform_from_table(lie_table(system, x, alpha.order() - 1), alpha, beta);
}

// Mismatch reported relative to the largest magnitude seen.
VerifyReport compare_on_samples(const SampleSet& samples, double tol, const SidesFn& sides) {
  const auto count = static_cast<std::size_t>(samples.count());
  std::vector<double> diff(count), scale(count);
  std::vector<std::string> errors(count);
  parallel_for(count, [&](std::size_t s) {
    try {
      const auto [lhs, rhs] = sides(samples.point(static_cast<Eigen::Index>(s)));
      diff[s] = (lhs - rhs).cwiseAbs().maxCoeff();
      scale[s] = std::max(lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff());
    } catch (const DomainError& e) {
      errors[s] = e.what();
    }
  });
  for (std::size_t s = 0; s < count; ++s) {
    if (!errors[s].empty()) throw DomainError("sample " + std::to_string(s) + ": " + errors[s]);
  }
  VerifyReport report;
  report.tolerance = tol;
  report.sample_mismatch = diff;
  const double worst = diff.empty() ? 0.0 : *std::max_element(diff.begin(), diff.end());
  const double mag = scale.empty() ? 0.0 : *std::max_element(scale.begin(), scale.end());
  report.max_mismatch = worst == 0.0 ? 0.0 : worst / std::max(mag, kResidualFloor);
  report.pass = report.max_mismatch <= tol;
  return report;
}

VerifyReport verify_pde(const SystemModel& system, const ObserverLTI& observer, const SampleSet& samples,
                        double tol) {
  const int v = observer.order();
  return compare_on_samples(samples, tol, [&](const Eigen::VectorXd& x) {
    const LieTable table = lie_table(system, x, v);
    const Eigen::VectorXd t = transform_from_table(table, observer.alpha, observer.beta);
    const Eigen::VectorXd lt = transform_from_table(table, observer.alpha, observer.beta, 1);
    const Eigen::VectorXd rhs = observer.A * t + observer.B * table.outputs.col(0);
    return std::pair<Eigen::VectorXd, Eigen::VectorXd>(lt, rhs);
  });
}

VerifyReport verify_output(const SystemModel& system, const ObserverLTI& observer, const SampleSet& samples,
                           double tol) {
  const int v = observer.order();
  return compare_on_samples(samples, tol, [&](const Eigen::VectorXd& x) {
    const LieTable table = lie_table(system, x, v - 1);
    const Eigen::VectorXd t = transform_from_table(table, observer.alpha, observer.beta);
    Eigen::VectorXd lhs(1), rhs(1);
    lhs[0] = table.functional[0];
    rhs = observer.C * t + observer.D * table.outputs.col(0);
    return std::pair<Eigen::VectorXd, Eigen::VectorXd>(lhs, rhs);
  });
}

}  // namespace folin
