#pragma once

#include <complex>
#include <optional>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "folin/lie.hpp"
#include "folin/system.hpp"

namespace folin {

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Sample points drawn uniformly and independently per coordinate inside a box.
struct SampleSet {
  std::uint64_t seed = 0;
  Box box;
  Eigen::MatrixXd points;  // one sample per row

  Eigen::Index count() const { return points.rows(); }
  Eigen::VectorXd point(Eigen::Index s) const { return points.row(s).transpose(); }
};

/// Counter-based generator: coordinate i of sample s depends only on (seed, s, i).
SampleSet sample(const Box& box, Eigen::Index count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Characteristic polynomial
// ---------------------------------------------------------------------------

/// lambda^v + alpha_1 lambda^{v-1} + ... + alpha_v with its roots.
struct CharPoly {
  Eigen::VectorXd alpha;  // alpha_1..alpha_v
  std::vector<std::complex<double>> roots;
  bool hurwitz = false;

  int order() const { return static_cast<int>(alpha.size()); }
  /// alpha_k with alpha_0 = 1.
  double coefficient(int k) const { return k == 0 ? 1.0 : alpha[k - 1]; }
};

/// Real polynomial with the given roots. Complex roots must come with their conjugates.
CharPoly char_from_roots(std::span<const std::complex<double>> roots);

/// Roots computed as eigenvalues of the companion matrix.
CharPoly char_from_alpha(const Eigen::VectorXd& alpha);

/// v x v companion matrix: ones on the sub-diagonal, last column (-alpha_v, ..., -alpha_1).
Eigen::MatrixXd companion(const Eigen::VectorXd& alpha);

// ---------------------------------------------------------------------------
// Span test
// ---------------------------------------------------------------------------

/// Coefficients beta_0..beta_v of the output Lie derivatives.
struct BetaSet {
  Eigen::MatrixXd rows;     // (v+1) x p, row k = beta_k
  double residual = 0.0;    // ||M beta - r|| / max(||r||, 1e-12)
  double tolerance = 0.0;
  double condition = 1.0;   // kept design columns, normalized
  bool feasible = false;    // residual <= tolerance
  bool ill_conditioned = false;
  std::vector<Eigen::Index> skipped_samples;

  int order() const { return static_cast<int>(rows.rows()) - 1; }
};

enum class SamplePolicy { kFail, kSkip };

struct SpanOptions {
  double tol = 1e-8;
  SamplePolicy policy = SamplePolicy::kFail;
  /// Relative size below which a design column counts as a combination of preferred ones.
  double dependence_tol = 1e-12;
  double condition_limit = 1e10;
};

inline constexpr double kResidualFloor = 1e-12;

/// Design matrix and right-hand side of the span test.
///
/// Column k*p + j of a row holds L_F^{v-k} H_j at that sample (derivative
/// order descending, output index fastest), so column k*p + j multiplies
/// beta_{k,j}. The right-hand side is sum_{i=0..v} alpha_i L_F^{v-i} q.
struct LsqSystem {
  Eigen::MatrixXd design;
  Eigen::VectorXd rhs;
  std::vector<Eigen::Index> used_samples;
  std::vector<Eigen::Index> skipped_samples;
};

LsqSystem build_lsq(const SystemModel& system, const SampleSet& samples, int order, const CharPoly& alpha,
                    SamplePolicy policy = SamplePolicy::kFail);

/// Lie tables of order `order` at every sample; failed samples are empty under kSkip.
std::vector<std::optional<LieTable>> lie_tables(const SystemModel& system, const SampleSet& samples, int order,
                                                SamplePolicy policy);

/// Fixed-alpha span test.
BetaSet solve_beta(const SystemModel& system, const SampleSet& samples, int order, const CharPoly& alpha,
                   const SpanOptions& options = {});

struct JointSolution {
  CharPoly alpha;
  BetaSet beta;  // feasible additionally requires a Hurwitz alpha
};

/// Span test with alpha as additional unknowns (alpha enters linearly).
JointSolution solve_joint(const SystemModel& system, const SampleSet& samples, int order,
                          const SpanOptions& options = {});

/// Relative residual of a given beta on a (possibly fresh) sample set.
double span_residual(const SystemModel& system, const SampleSet& samples, const CharPoly& alpha,
                     const Eigen::MatrixXd& beta);

/// Column preference used by the basic solution: H_j before L_F H_j before L_F^2 H_j ...
std::vector<Eigen::Index> beta_column_preference(int order, Eigen::Index outputs, Eigen::Index offset = 0);

}  // namespace folin
