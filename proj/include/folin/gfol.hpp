#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "folin/expr.hpp"
#include "folin/span.hpp"
#include "folin/synth.hpp"
#include "folin/system.hpp"

namespace folin {

/// Output-side functions of the generalized observer.
///
/// Z0(z, y) is written over z and y1..yp, Z1..Zv over y1..yp (plain `y` is an
/// alias of y1 when p = 1). The optional inverse is written over zeta and the
/// outputs and must satisfy Z0(inverse(zeta, y), y) = zeta.
class GeneralSpec {
 public:
  /// Validates names and spot-checks that Z0 is strictly monotone in z
  /// (64 samples: y = H(x) over the system box, z over the bracket or over q(x)).
  /// Throws InputError when neither an inverse nor a bracket is given.
  GeneralSpec(const SystemModel& system, CharPoly alpha, Expr z0, std::vector<Expr> zs,
              std::optional<Expr> inverse, std::optional<std::pair<double, double>> bracket,
              std::uint64_t seed = 0x5eed);

  int order() const { return alpha_.order(); }
  std::size_t outputs() const { return p_; }
  const CharPoly& alpha() const { return alpha_; }
  const Expr& z0() const { return z0_; }
  const std::vector<Expr>& zs() const { return zs_; }
  const std::optional<Expr>& inverse() const { return inverse_; }
  const std::optional<std::pair<double, double>>& bracket() const { return bracket_; }

  /// Z0(z, y), and dZ0/dz by a first-order jet.
  double g(double z, const Eigen::VectorXd& y) const;
  double dg_dz(double z, const Eigen::VectorXd& y) const;
  /// (Z1(y), ..., Zv(y)).
  Eigen::VectorXd zvec(const Eigen::VectorXd& y) const;

  const Program& z0_program() const { return z0_prog_; }
  const Program& z_program(int m) const { return z_prog_[static_cast<std::size_t>(m - 1)]; }
  const std::optional<Program>& inverse_program() const { return inverse_prog_; }

 private:
  CharPoly alpha_;
  std::size_t p_;
  Expr z0_;
  std::vector<Expr> zs_;
  std::optional<Expr> inverse_;
  std::optional<std::pair<double, double>> bracket_;
  Program z0_prog_;
  std::vector<Program> z_prog_;
  std::optional<Program> inverse_prog_;
};

/// Output variable names allowed in Z-expressions: y1..yp, plus y when p = 1.
std::map<std::string, std::size_t> output_slots(std::size_t p, std::size_t offset);

/// dxi/dt = A xi + (Z1(y), ..., Zv(y)),  Z0(zhat, y) = C xi.
struct GeneralObserver {
  Eigen::MatrixXd A;
  Eigen::MatrixXd C;
  GeneralSpec spec;

  int order() const { return static_cast<int>(A.rows()); }
};

/// Both sides of
///   sum_k alpha_k L^{v-k} Z0(q, H) = sum_{m=1..v} L^{m-1} Zm(H)
/// at every sample, from one flow expansion per sample.
VerifyReport verify_71(const SystemModel& system, const GeneralSpec& spec, const SampleSet& samples,
                       double tol);

/// Companion A, C = e_v, components Z1..Zv. Requires a Hurwitz alpha unless `allow_unstable`.
GeneralObserver synthesize_general(const GeneralSpec& spec, bool allow_unstable = false);

/// T_i = sum_{k=0}^{v-i} alpha_k L^{v-i-k} Z0(q,H) - sum_{m=i+1}^{v} L^{m-i-1} Zm(H).
Eigen::VectorXd transform_general(const SystemModel& system, const GeneralSpec& spec, const Eigen::VectorXd& x);

/// Solves Z0(zhat, y) = zeta. Uses the explicit inverse when present, otherwise
/// safeguarded Newton inside the bracket (bisection fallback, 100 iterations).
/// `guess` seeds Newton when it lies inside the bracket.
double invert_G(const GeneralSpec& spec, double zeta, const Eigen::VectorXd& y,
                std::optional<double> guess = std::nullopt);

/// The general form of a linear observer: Z0 = z - beta_0 y, Zm = (row m of B) y.
GeneralSpec general_from_linear(const SystemModel& system, const ObserverLTI& observer);

}  // namespace folin
