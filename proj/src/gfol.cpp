#include "folin/gfol.hpp"

#include <cmath>
#include <limits>

#include "folin/lie.hpp"

namespace folin {

std::map<std::string, std::size_t> output_slots(std::size_t p, std::size_t offset) {
  std::map<std::string, std::size_t> slots;
  for (std::size_t j = 0; j < p; ++j) slots["y" + std::to_string(j + 1)] = offset + j;
  if (p == 1) slots["y"] = offset;
  return slots;
}

namespace {

Program compile_with(const Expr& e, const std::map<std::string, std::size_t>& slots, const char* what) {
  std::set<std::string> allowed;
  for (const auto& [name, _] : slots) allowed.insert(name);
  try {
    validate(e, allowed);
  } catch (const InputError& err) {
    throw InputError(std::string(what) + ": " + err.what());
  }
  return Program::compile(e, slots);
}

std::vector<double> with_outputs(double head, const Eigen::VectorXd& y) {
  std::vector<double> in(static_cast<std::size_t>(y.size()) + 1);
  in[0] = head;
  for (Eigen::Index j = 0; j < y.size(); ++j) in[static_cast<std::size_t>(j) + 1] = y[j];
  return in;
}

// Lie derivatives of Z0(q, H) (orders 0..order) and of each Zm(H) along one flow expansion.
struct ZDerivatives {
  std::vector<double> z0;
  std::vector<std::vector<double>> zm;  // zm[m-1]
};

ZDerivatives z_derivatives(const SystemModel& system, const GeneralSpec& spec, const Eigen::VectorXd& x,
                           int order) {
  const std::vector<Jet> flow = taylor_flow(system, x, order);
  std::vector<Jet> in;
  in.reserve(system.p() + 1);
  in.push_back(along_flow(system.functional_program(), flow));
  for (std::size_t j = 0; j < system.p(); ++j) in.push_back(along_flow(system.output_program(j), flow));

  ZDerivatives out;
  out.z0 = derivatives_of(spec.z0_program()(std::span<const Jet>(in), in[0]));
  const std::span<const Jet> ys(in.data() + 1, system.p());
  for (int m = 1; m <= spec.order(); ++m) out.zm.push_back(derivatives_of(spec.z_program(m)(ys, in[0])));
  return out;
}

void check_outputs(const SystemModel& system, const GeneralSpec& spec) {
  if (system.p() != spec.outputs()) {
    throw InputError("spec is written for " + std::to_string(spec.outputs()) + " outputs, system has " +
                     std::to_string(system.p()));
  }
}

}  // namespace

GeneralSpec::GeneralSpec(const SystemModel& system, CharPoly alpha, Expr z0, std::vector<Expr> zs,
                         std::optional<Expr> inverse, std::optional<std::pair<double, double>> bracket,
                         std::uint64_t seed)
    : alpha_(std::move(alpha)),
      p_(system.p()),
      z0_(std::move(z0)),
      zs_(std::move(zs)),
      inverse_(std::move(inverse)),
      bracket_(bracket) {
  const int v = alpha_.order();
  if (v < 1) throw InputError("observer order must be at least 1");
  if (static_cast<int>(zs_.size()) != v) {
    throw InputError("expected " + std::to_string(v) + " functions Z1..Zv, got " + std::to_string(zs_.size()));
  }
  if (bracket_ && !(bracket_->first < bracket_->second)) throw InputError("bracket must satisfy lo < hi");
  if (!bracket_ && !inverse_) {
    throw InputError("Z0 needs an explicit inverse or an inversion bracket");
  }

  auto z_slots = output_slots(p_, 1);
  z_slots["z"] = 0;
  z0_prog_ = compile_with(z0_, z_slots, "Z0");
  const auto y_slots = output_slots(p_, 0);
  for (std::size_t m = 0; m < zs_.size(); ++m) {
    z_prog_.push_back(compile_with(zs_[m], y_slots, ("Z" + std::to_string(m + 1)).c_str()));
  }
  if (inverse_) {
    auto inv_slots = output_slots(p_, 1);
    inv_slots["zeta"] = 0;
    inverse_prog_ = compile_with(*inverse_, inv_slots, "inverse");
  }

  // Monotonicity spot check.
  constexpr Eigen::Index kChecks = 64;
  const SampleSet xs = sample(system.box(), kChecks, seed);
  std::optional<SampleSet> zs_in;
  if (bracket_) {
    zs_in = sample(Box(Eigen::VectorXd::Constant(1, bracket_->first), Eigen::VectorXd::Constant(1, bracket_->second)),
                   kChecks, seed + 1);
  }
  int sign = 0;
  for (Eigen::Index s = 0; s < kChecks; ++s) {
    try {
      const Eigen::VectorXd x = xs.point(s);
      const Eigen::VectorXd y = system.h(x);
      const double z = zs_in ? zs_in->points(s, 0) : system.q(x);
      const double d = dg_dz(z, y);
      const int sd = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
      if (sd == 0 || !std::isfinite(d) || (sign != 0 && sd != sign)) {
        throw InputError("Z0 is not strictly monotone in z (dZ0/dz = " + std::to_string(d) + " at check " +
                         std::to_string(s) + ")");
      }
      sign = sd;
    } catch (const DomainError& e) {
      throw InputError(std::string("monotonicity check of Z0: ") + e.what());
    }
  }
}

double GeneralSpec::g(double z, const Eigen::VectorXd& y) const {
  const auto in = with_outputs(z, y);
  return z0_prog_(std::span<const double>(in));
}

double GeneralSpec::dg_dz(double z, const Eigen::VectorXd& y) const {
  std::vector<Jet> in;
  in.emplace_back(1, std::initializer_list<double>{z, 1.0});
  for (Eigen::Index j = 0; j < y.size(); ++j) in.emplace_back(1, y[j]);
  return z0_prog_(std::span<const Jet>(in), in[0])[1];
}

Eigen::VectorXd GeneralSpec::zvec(const Eigen::VectorXd& y) const {
  Eigen::VectorXd out(order());
  const std::span<const double> ys(y.data(), static_cast<std::size_t>(y.size()));
  for (int m = 1; m <= order(); ++m) out[m - 1] = z_program(m)(ys);
  return out;
}

VerifyReport verify_71(const SystemModel& system, const GeneralSpec& spec, const SampleSet& samples,
                       double tol) {
  check_outputs(system, spec);
  const int v = spec.order();
  return compare_on_samples(samples, tol, [&](const Eigen::VectorXd& x) {
    const ZDerivatives d = z_derivatives(system, spec, x, v);
    Eigen::VectorXd lhs = Eigen::VectorXd::Zero(1), rhs = Eigen::VectorXd::Zero(1);
    for (int k = 0; k <= v; ++k) lhs[0] += spec.alpha().coefficient(k) * d.z0[static_cast<std::size_t>(v - k)];
    for (int m = 1; m <= v; ++m) rhs[0] += d.zm[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(m - 1)];
    return std::pair<Eigen::VectorXd, Eigen::VectorXd>(lhs, rhs);
  });
}

GeneralObserver synthesize_general(const GeneralSpec& spec, bool allow_unstable) {
  if (!spec.alpha().hurwitz && !allow_unstable) {
    throw InputError("characteristic polynomial is not Hurwitz (pass allow_unstable to study it anyway)");
  }
  const int v = spec.order();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, v);
  c(0, v - 1) = 1.0;
  return GeneralObserver{companion(spec.alpha().alpha), c, spec};
}

Eigen::VectorXd transform_general(const SystemModel& system, const GeneralSpec& spec, const Eigen::VectorXd& x) {
  check_outputs(system, spec);
  const int v = spec.order();
  const ZDerivatives d = z_derivatives(system, spec, x, v - 1);
  Eigen::VectorXd t(v);
  for (int i = 1; i <= v; ++i) {
    double sum = 0.0;
    for (int k = 0; k <= v - i; ++k) sum += spec.alpha().coefficient(k) * d.z0[static_cast<std::size_t>(v - i - k)];
    for (int m = i + 1; m <= v; ++m) sum -= d.zm[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(m - i - 1)];
    t[i - 1] = sum;
  }
  return t;
}

double invert_G(const GeneralSpec& spec, double zeta, const Eigen::VectorXd& y, std::optional<double> guess) {
  if (static_cast<std::size_t>(y.size()) != spec.outputs()) throw InputError("output vector has wrong size");
  if (const auto& inv = spec.inverse_program()) {
    const auto in = with_outputs(zeta, y);
    return (*inv)(std::span<const double>(in));
  }
  if (!spec.bracket()) throw InputError("Z0 needs an explicit inverse or an inversion bracket");

  const double tol = 1e-12 * std::max(1.0, std::abs(zeta));
  double lo = spec.bracket()->first, hi = spec.bracket()->second;
  double glo = spec.g(lo, y) - zeta;
  const double ghi = spec.g(hi, y) - zeta;
  if (std::abs(glo) <= tol) return lo;
  if (std::abs(ghi) <= tol) return hi;
  if ((glo > 0.0) == (ghi > 0.0)) {
    throw NumericalError("Z0(z, y) - zeta does not change sign over the bracket [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
  }

  double z = (guess && *guess > lo && *guess < hi) ? *guess : 0.5 * (lo + hi);
  double step_old = hi - lo;
  for (int it = 0; it < 100; ++it) {
    const double gz = spec.g(z, y) - zeta;
    if (std::abs(gz) <= tol) return z;
    if ((gz > 0.0) == (glo > 0.0)) {
      lo = z;
      glo = gz;
    } else {
      hi = z;
    }
    const double d = spec.dg_dz(z, y);
    double next = z - gz / d;
    // Newton only while it stays inside the bracket and at least halves the step.
    if (!std::isfinite(next) || next <= lo || next >= hi || std::abs(2.0 * (next - z)) > std::abs(step_old)) {
      next = 0.5 * (lo + hi);
    }
    step_old = next - z;
    if (next == z || std::nextafter(lo, hi) >= hi) break;
    z = next;
  }
  const double gz = spec.g(z, y) - zeta;
  if (std::abs(gz) <= tol) return z;
  throw NumericalError("inversion of Z0 did not converge (|Z0 - zeta| = " + std::to_string(std::abs(gz)) + ")");
}

GeneralSpec general_from_linear(const SystemModel& system, const ObserverLTI& observer) {
  const auto p = static_cast<Eigen::Index>(system.p());
  if (observer.outputs() != p) throw InputError("observer and system disagree on the number of outputs");
  auto combo = [&](Expr head, const Eigen::RowVectorXd& w, double sign) {
    for (Eigen::Index j = 0; j < p; ++j) {
      head = Expr::binary(NodeKind::kAdd, head,
                          Expr::binary(NodeKind::kMul, Expr::constant(sign * w[j]),
                                       Expr::variable("y" + std::to_string(j + 1))));
    }
    return head;
  };
  const Eigen::RowVectorXd d = observer.D.row(0);
  Expr z0 = combo(Expr::variable("z"), d, -1.0);
  Expr inverse = combo(Expr::variable("zeta"), d, 1.0);
  std::vector<Expr> zs;
  for (int m = 0; m < observer.order(); ++m) zs.push_back(combo(Expr::constant(0.0), observer.B.row(m), 1.0));
  return GeneralSpec(system, observer.alpha, z0, zs, inverse, std::nullopt);
}

}  // namespace folin
