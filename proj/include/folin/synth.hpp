#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "folin/lie.hpp"
#include "folin/span.hpp"
#include "folin/system.hpp"

namespace folin {

/// Linear functional observer
///   dxi/dt = A xi + B y,  zhat = C xi + D y
/// in companion form, together with the (alpha, beta) it was built from.
struct ObserverLTI {
  Eigen::MatrixXd A;  // v x v
  Eigen::MatrixXd B;  // v x p
  Eigen::MatrixXd C;  // 1 x v
  Eigen::MatrixXd D;  // 1 x p
  CharPoly alpha;
  Eigen::MatrixXd beta;  // (v+1) x p

  int order() const { return static_cast<int>(A.rows()); }
  Eigen::Index outputs() const { return B.cols(); }
};

/// A = companion(alpha), B row i = beta_{v+1-i} - alpha_{v+1-i} beta_0, C = (0..0 1), D = beta_0.
/// Throws InputError on shape mismatch, or for a non-Hurwitz alpha unless `allow_unstable`.
ObserverLTI synthesize(const CharPoly& alpha, const Eigen::MatrixXd& beta, bool allow_unstable = false);

/// As above, additionally requiring a feasible span solution.
ObserverLTI synthesize(const CharPoly& alpha, const BetaSet& beta, bool allow_unstable = false);

/// beta_0 = D, beta_k = sum_{i<k} alpha_i C A^{k-1-i} B + alpha_k D (alpha_0 = 1).
BetaSet beta_from_observer(const ObserverLTI& observer, const CharPoly& alpha);

/// Transform components from a Lie table: T_i = sum_{k=0}^{v-i} (alpha_k L^{v-i-k} q - L^{v-i-k}(beta_k H)).
/// With `extra` = 1 the same combination is taken one Lie order higher, giving L_F T.
Eigen::VectorXd transform_from_table(const LieTable& table, const CharPoly& alpha, const Eigen::MatrixXd& beta,
                                     int extra = 0);

/// The immersion T(x) in R^v; the last component is q(x) - beta_0 H(x).
Eigen::VectorXd transform_eval(const SystemModel& system, const CharPoly& alpha, const Eigen::MatrixXd& beta,
                               const Eigen::VectorXd& x);

struct VerifyReport {
  double max_mismatch = 0.0;           // relative to the largest side magnitude
  std::vector<double> sample_mismatch;  // absolute, per sample
  double tolerance = 0.0;
  bool pass = false;
};

/// Evaluates (lhs, rhs) at every sample in parallel. Domain errors are rethrown
/// naming the lowest failing sample.
using SidesFn = std::function<std::pair<Eigen::VectorXd, Eigen::VectorXd>(const Eigen::VectorXd&)>;
VerifyReport compare_on_samples(const SampleSet& samples, double tol, const SidesFn& sides);

/// Checks dT/dx F(x) = A T(x) + B H(x) at the samples; L_F T comes from one extra jet order.
VerifyReport verify_pde(const SystemModel& system, const ObserverLTI& observer, const SampleSet& samples,
                        double tol);

/// Checks q(x) = C T(x) + D H(x) at the samples.
VerifyReport verify_output(const SystemModel& system, const ObserverLTI& observer, const SampleSet& samples,
                           double tol);

}  // namespace folin
