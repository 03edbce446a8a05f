#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

#include "folin/span.hpp"
#include "folin/synth.hpp"
#include "folin/system.hpp"

namespace folin {

/// dx/dt = F x, y = H x, z = q x.
struct LTISystem {
  Eigen::MatrixXd F;  // n x n
  Eigen::MatrixXd H;  // p x n
  Eigen::RowVectorXd q;

  /// Throws InputError on inconsistent shapes or non-finite entries.
  void check() const;
  Eigen::Index n() const { return F.rows(); }
  Eigen::Index p() const { return H.rows(); }
};

class UnobservableError : public NumericalError {
 public:
  UnobservableError(Eigen::Index rank, Eigen::Index n)
      : NumericalError("(H, F) is not observable: rank stalls at " + std::to_string(rank) + " of " +
                       std::to_string(n)),
        rank_(rank) {}
  Eigen::Index rank() const noexcept { return rank_; }

 private:
  Eigen::Index rank_;
};

/// Numerical rank with threshold max(rows, cols) * sigma_max * 1e-12.
Eigen::Index numerical_rank(const Eigen::MatrixXd& m);

/// Smallest k with rank [H; HF; ...; HF^{k-1}] = n.
int obs_index(const LTISystem& sys);

struct Condition61 {
  bool feasible = false;
  Eigen::MatrixXd beta;  // (v+1) x p, same layout as BetaSet::rows
  double residual = 0.0;
};

inline constexpr double kLinearSpanTol = 1e-10;

/// Is q F^v + alpha_1 q F^{v-1} + ... + alpha_v q in span{H_j F^i}?
Condition61 condition_61(const LTISystem& sys, const CharPoly& alpha);

/// Rows of T: T_i = sum_{k=0}^{v-i} (alpha_k q F^{v-i-k} - beta_k H F^{v-i-k}).
Eigen::MatrixXd linear_transform(const LTISystem& sys, const CharPoly& alpha, const Eigen::MatrixXd& beta);

/// Order v_o - 1 observer with the requested eigenvalues.
ObserverLTI design_corollary(const LTISystem& sys, std::span<const std::complex<double>> roots);

struct LuenbergerReport {
  double pde_residual = 0.0;     // ||TF - AT - BH|| relative to operand norms
  double output_residual = 0.0;  // ||q - CT - DH|| relative to operand norms
  bool pass = false;
};

LuenbergerReport verify_luenberger(const LTISystem& sys, const Eigen::MatrixXd& T, const ObserverLTI& observer,
                                   double tol = 1e-10);

/// The same plant written as expressions over states x1..xn.
SystemModel to_system_model(const LTISystem& sys, const Box& box);

}  // namespace folin
