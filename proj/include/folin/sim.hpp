#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "folin/gfol.hpp"
#include "folin/synth.hpp"
#include "folin/system.hpp"

namespace folin {

using AnyObserver = std::variant<ObserverLTI, GeneralObserver>;

struct SimConfig {
  double t_end = 0.0;
  double dt = 0.0;
  Eigen::VectorXd x0;
  /// Observer start. Empty means consistent: xi0 = T(x0) + xi_offset.
  std::optional<Eigen::VectorXd> xi0;
  /// Added to T(x0) when xi0 is empty; zero-sized means no offset.
  Eigen::VectorXd xi_offset;
  int stride = 1;
};

/// Recorded samples, one row per recorded time.
struct Trajectory {
  Eigen::VectorXd t;
  Eigen::MatrixXd x;        // N x n
  Eigen::MatrixXd y;        // N x p
  Eigen::VectorXd z;
  Eigen::MatrixXd xi;       // N x v
  Eigen::MatrixXd tx;       // N x v, T(x(t))
  Eigen::VectorXd zhat;
  Eigen::VectorXd e_out;    // zhat - z
  Eigen::VectorXd e_lin;    // G(zhat, y) - G(z, y); equals e_out for linear observers
  Eigen::VectorXd e_ref;    // C e(t), e' = A e, e(0) = xi(0) - T(x(0))
  Eigen::VectorXd e0;       // xi(0) - T(x(0))

  Eigen::Index size() const { return t.size(); }
};

/// Integration stopped because the right-hand side could not be evaluated.
class SimulationFailure : public std::runtime_error {
 public:
  SimulationFailure(double time, const std::string& what)
      : std::runtime_error("simulation failed at t = " + std::to_string(time) + ": " + what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Classic RK4 on (x, xi, e) with fixed step; e is the linear reference error.
Trajectory simulate(const SystemModel& system, const AnyObserver& observer, const SimConfig& config);

/// T(x) for either observer kind.
Eigen::VectorXd observer_transform(const SystemModel& system, const AnyObserver& observer, const Eigen::VectorXd& x);

struct DecayReport {
  double max_deviation = 0.0;  // max_t |e_lin - e_ref|, absolute
  double scale = 0.0;          // max(|e_out(0)|, ||e(0)||)
  double relative = 0.0;
  double tolerance = 1e-6;
  bool pass = false;
};

/// Compares the recorded error with the co-integrated reference. With zero initial
/// error the check passes iff the absolute deviation stays below 1e-8.
DecayReport error_decay_check(const Trajectory& traj, double tol = 1e-6);

/// max_t ||xi - T(x)|| / (1 + ||T(x)||).
double manifold_residual(const Trajectory& traj);

/// Header t,x1..xn,y1..yp,z,zhat,err,err_ref and one row per record, %.17g.
void write_csv(const Trajectory& traj, std::ostream& out);
void export_csv(const Trajectory& traj, const std::string& path);

}  // namespace folin
