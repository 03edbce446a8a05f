#include "folin/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace folin {

namespace {

const Eigen::MatrixXd& a_of(const AnyObserver& obs) {
  return std::visit([](const auto& o) -> const Eigen::MatrixXd& { return o.A; }, obs);
}

const Eigen::MatrixXd& c_of(const AnyObserver& obs) {
  return std::visit([](const auto& o) -> const Eigen::MatrixXd& { return o.C; }, obs);
}

Eigen::Index outputs_of(const AnyObserver& obs) {
  if (const auto* lti = std::get_if<ObserverLTI>(&obs)) return lti->outputs();
  return static_cast<Eigen::Index>(std::get<GeneralObserver>(obs).spec.outputs());
}

// Observer input term: B y or (Z1(y), ..., Zv(y)).
Eigen::VectorXd drive(const AnyObserver& obs, const Eigen::VectorXd& y) {
  if (const auto* lti = std::get_if<ObserverLTI>(&obs)) return lti->B * y;
  return std::get<GeneralObserver>(obs).spec.zvec(y);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Eigen::VectorXd observer_transform(const SystemModel& system, const AnyObserver& observer, const Eigen::VectorXd& x) {
  if (const auto* lti = std::get_if<ObserverLTI>(&observer)) return transform_eval(system, lti->alpha, lti->beta, x);
  return transform_general(system, std::get<GeneralObserver>(observer).spec, x);
}

Trajectory simulate(const SystemModel& system, const AnyObserver& observer, const SimConfig& config) {
  const auto n = static_cast<Eigen::Index>(system.n());
  const auto p = static_cast<Eigen::Index>(system.p());
  const Eigen::MatrixXd& a = a_of(observer);
  const Eigen::MatrixXd& c = c_of(observer);
  const Eigen::Index v = a.rows();

  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw InputError("dt must be positive");
  if (!(config.t_end >= config.dt) || !std::isfinite(config.t_end)) throw InputError("t_end must be at least dt");
  if (config.stride < 1) throw InputError("record stride must be at least 1");
  if (config.x0.size() != n) throw InputError("x0 has " + std::to_string(config.x0.size()) + " entries, expected " +
                                              std::to_string(n));
  if (outputs_of(observer) != p) throw InputError("observer and system disagree on the number of outputs");
  if (config.xi0 && config.xi0->size() != v) throw InputError("xi0 must have " + std::to_string(v) + " entries");
  if (config.xi_offset.size() != 0 && config.xi_offset.size() != v) {
    throw InputError("initial observer offset must have " + std::to_string(v) + " entries");
  }
  const double ratio = config.t_end / config.dt;
  const long long steps = std::llround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-6 * std::max(1.0, ratio)) {
    throw InputError("t_end must be an integer multiple of dt");
  }

  Eigen::VectorXd t0;
  try {
    t0 = observer_transform(system, observer, config.x0);
  } catch (const DomainError& e) {
    throw SimulationFailure(0.0, e.what());
  }
  Eigen::VectorXd xi0 = config.xi0 ? *config.xi0 : t0;
  if (!config.xi0 && config.xi_offset.size() == v) xi0 += config.xi_offset;

  Eigen::VectorXd s(n + 2 * v);
  s << config.x0, xi0, xi0 - t0;

  auto rhs = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd x = u.head(n);
    const Eigen::VectorXd y = system.h(x);
    Eigen::VectorXd du(u.size());
    du.head(n) = system.f(x);
    du.segment(n, v) = a * u.segment(n, v) + drive(observer, y);
    du.tail(v) = a * u.tail(v);
    return du;
  };

  const Eigen::Index records = static_cast<Eigen::Index>(steps / config.stride) + 1;
  Trajectory tr;
  tr.t.resize(records);
  tr.x.resize(records, n);
  tr.y.resize(records, p);
  tr.z.resize(records);
  tr.xi.resize(records, v);
  tr.tx.resize(records, v);
  tr.zhat.resize(records);
  tr.e_out.resize(records);
  tr.e_lin.resize(records);
  tr.e_ref.resize(records);
  tr.e0 = xi0 - t0;

  const auto* general = std::get_if<GeneralObserver>(&observer);
  const auto* lti = std::get_if<ObserverLTI>(&observer);
  std::optional<double> last_zhat;
  auto record = [&](Eigen::Index r, double t) {
    const Eigen::VectorXd x = s.head(n);
    const Eigen::VectorXd xi = s.segment(n, v);
    const Eigen::VectorXd y = system.h(x);
    const double z = system.q(x);
    const double cxi = (c * xi)(0);
    double zhat, elin;
    if (lti) {
      zhat = cxi + (lti->D * y)(0);
      elin = zhat - z;
    } else {
      zhat = invert_G(general->spec, cxi, y, last_zhat);
      elin = cxi - general->spec.g(z, y);
    }
    last_zhat = zhat;
    tr.t[r] = t;
    tr.x.row(r) = x.transpose();
    tr.y.row(r) = y.transpose();
    tr.z[r] = z;
    tr.xi.row(r) = xi.transpose();
    tr.tx.row(r) = observer_transform(system, observer, x).transpose();
    tr.zhat[r] = zhat;
    tr.e_out[r] = zhat - z;
    tr.e_lin[r] = elin;
    tr.e_ref[r] = (c * s.tail(v))(0);
  };

  const double h = config.dt;
  double t = 0.0;
  try {
    record(0, 0.0);
    for (long long k = 1; k <= steps; ++k) {
      t = static_cast<double>(k - 1) * h;
      const Eigen::VectorXd k1 = rhs(s);
      const Eigen::VectorXd k2 = rhs(s + 0.5 * h * k1);
      const Eigen::VectorXd k3 = rhs(s + 0.5 * h * k2);
      const Eigen::VectorXd k4 = rhs(s + h * k3);
      s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = static_cast<double>(k) * h;
      if (!s.allFinite()) throw SimulationFailure(t, "state became non-finite");
      if (k % config.stride == 0) record(static_cast<Eigen::Index>(k / config.stride), t);
    }
  } catch (const DomainError& e) {
    throw SimulationFailure(t, e.what());
  } catch (const NumericalError& e) {
    throw SimulationFailure(t, e.what());
  }
  return tr;
}

DecayReport error_decay_check(const Trajectory& traj, double tol) {
  if (traj.size() < 10) throw InputError("error check needs at least 10 recorded points");
  DecayReport out;
  out.tolerance = tol;
  out.max_deviation = (traj.e_lin - traj.e_ref).cwiseAbs().maxCoeff();
  out.scale = std::max(std::abs(traj.e_out[0]), traj.e0.norm());
  if (out.scale == 0.0) {
    out.relative = out.max_deviation;
    out.pass = out.max_deviation <= 1e-8;
  } else {
    out.relative = out.max_deviation / out.scale;
    out.pass = out.relative <= tol;
  }
  return out;
}

double manifold_residual(const Trajectory& traj) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < traj.size(); ++r) {
    const double res = (traj.xi.row(r) - traj.tx.row(r)).norm() / (1.0 + traj.tx.row(r).norm());
    worst = std::max(worst, res);
  }
  return worst;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  out << "t";
  for (Eigen::Index i = 0; i < traj.x.cols(); ++i) out << ",x" << i + 1;
  for (Eigen::Index j = 0; j < traj.y.cols(); ++j) out << ",y" << j + 1;
  out << ",z,zhat,err,err_ref\n";
  for (Eigen::Index r = 0; r < traj.size(); ++r) {
    out << fmt(traj.t[r]);
    for (Eigen::Index i = 0; i < traj.x.cols(); ++i) out << ',' << fmt(traj.x(r, i));
    for (Eigen::Index j = 0; j < traj.y.cols(); ++j) out << ',' << fmt(traj.y(r, j));
    out << ',' << fmt(traj.z[r]) << ',' << fmt(traj.zhat[r]) << ',' << fmt(traj.e_out[r]) << ','
        << fmt(traj.e_ref[r]) << '\n';
  }
}

void export_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw InputError("cannot open '" + path + "' for writing");
  write_csv(traj, file);
  if (!file) throw InputError("write to '" + path + "' failed");
}

}  // namespace folin
