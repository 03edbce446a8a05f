#include "folin/span.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "folin/lsq.hpp"
#include "folin/parallel.hpp"

namespace folin {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = splitmix64(splitmix64(seed) ^ splitmix64(counter));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

bool is_real(const std::complex<double>& z) {
  return std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z));
}

}  // namespace

SampleSet sample(const Box& box, Eigen::Index count, std::uint64_t seed) {
  if (count < 1) throw InputError("sample count must be at least 1");
  const Box checked(box.lower, box.upper);
  SampleSet out;
  out.seed = seed;
  out.box = checked;
  const Eigen::Index n = box.dim();
  out.points.resize(count, n);
  for (Eigen::Index s = 0; s < count; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = unit_uniform(seed, static_cast<std::uint64_t>(s * n + i));
      out.points(s, i) = box.lower[i] + u * (box.upper[i] - box.lower[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

CharPoly char_from_roots(std::span<const std::complex<double>> roots) {
  if (roots.empty()) throw InputError("characteristic polynomial needs at least one root");
  std::vector<bool> paired(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (paired[i] || is_real(roots[i])) continue;
    const double tol = 1e-12 * std::max(1.0, std::abs(roots[i]));
    bool found = false;
    for (std::size_t j = 0; j < roots.size() && !found; ++j) {
      if (j != i && !paired[j] && std::abs(roots[j] - std::conj(roots[i])) <= tol) {
        paired[i] = paired[j] = true;
        found = true;
      }
    }
    if (!found) {
      throw InputError("complex root (" + std::to_string(roots[i].real()) + ", " +
                       std::to_string(roots[i].imag()) + ") has no conjugate partner");
    }
  }

  std::vector<std::complex<double>> c(roots.size() + 1, 0.0);
  c[0] = 1.0;
  for (std::size_t m = 0; m < roots.size(); ++m) {
    for (std::size_t k = m + 1; k >= 1; --k) c[k] -= roots[m] * c[k - 1];
  }
  CharPoly out;
  out.alpha.resize(static_cast<Eigen::Index>(roots.size()));
  for (std::size_t k = 1; k <= roots.size(); ++k) out.alpha[static_cast<Eigen::Index>(k - 1)] = c[k].real();
  out.roots.assign(roots.begin(), roots.end());
  out.hurwitz = std::all_of(roots.begin(), roots.end(), [](const auto& z) { return z.real() < 0.0; });
  return out;
}

Eigen::MatrixXd companion(const Eigen::VectorXd& alpha) {
  const Eigen::Index v = alpha.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(v, v);
  for (Eigen::Index i = 1; i < v; ++i) a(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < v; ++i) a(i, v - 1) = -alpha[v - 1 - i];
  return a;
}

CharPoly char_from_alpha(const Eigen::VectorXd& alpha) {
  if (alpha.size() < 1) throw InputError("characteristic polynomial order must be at least 1");
  if (!alpha.allFinite()) throw InputError("characteristic polynomial coefficients must be finite");
  CharPoly out;
  out.alpha = alpha;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion(alpha), false);
  const auto& ev = solver.eigenvalues();
  out.roots.assign(ev.data(), ev.data() + ev.size());
  out.hurwitz = std::all_of(out.roots.begin(), out.roots.end(), [](const auto& z) { return z.real() < 0.0; });
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::optional<LieTable>> lie_tables(const SystemModel& system, const SampleSet& samples, int order,
                                                SamplePolicy policy) {
  const auto count = static_cast<std::size_t>(samples.count());
  std::vector<std::optional<LieTable>> tables(count);
  std::vector<std::string> errors(count);
  parallel_for(count, [&](std::size_t s) {
    try {
      tables[s] = lie_table(system, samples.point(static_cast<Eigen::Index>(s)), order);
    } catch (const DomainError& e) {
      errors[s] = e.what();
      if (errors[s].empty()) errors[s] = "domain error";
    }
  });
  if (policy == SamplePolicy::kFail) {
    for (std::size_t s = 0; s < count; ++s) {
      if (!errors[s].empty()) throw DomainError("sample " + std::to_string(s) + ": " + errors[s]);
    }
  }
  return tables;
}

LsqSystem build_lsq(const SystemModel& system, const SampleSet& samples, int order, const CharPoly& alpha,
                    SamplePolicy policy) {
  if (order < 1) throw InputError("observer order must be at least 1");
  if (alpha.order() != order) throw InputError("characteristic polynomial order does not match observer order");
  const auto tables = lie_tables(system, samples, order, policy);
  const auto p = static_cast<Eigen::Index>(system.p());

  LsqSystem out;
  for (std::size_t s = 0; s < tables.size(); ++s) {
    if (tables[s]) {
      out.used_samples.push_back(static_cast<Eigen::Index>(s));
    } else {
      out.skipped_samples.push_back(static_cast<Eigen::Index>(s));
    }
  }
  const auto rows = static_cast<Eigen::Index>(out.used_samples.size());
  out.design.resize(rows, (order + 1) * p);
  out.rhs.resize(rows);
  for (Eigen::Index row = 0; row < rows; ++row) {
    const LieTable& t = *tables[static_cast<std::size_t>(out.used_samples[static_cast<std::size_t>(row)])];
    for (int k = 0; k <= order; ++k) {
      for (Eigen::Index j = 0; j < p; ++j) out.design(row, k * p + j) = t.outputs(j, order - k);
    }
    double r = 0.0;
    for (int i = 0; i <= order; ++i) r += alpha.coefficient(i) * t.functional[order - i];
    out.rhs[row] = r;
  }
  return out;
}

std::vector<Eigen::Index> beta_column_preference(int order, Eigen::Index outputs, Eigen::Index offset) {
  std::vector<Eigen::Index> pref;
  for (int k = order; k >= 0; --k) {
    for (Eigen::Index j = 0; j < outputs; ++j) pref.push_back(offset + k * outputs + j);
  }
  return pref;
}

namespace {

void check_oversampling(Eigen::Index available, Eigen::Index unknowns, const char* what) {
  if (available < 3 * unknowns) {
    throw InputError(std::string(what) + ": need at least " + std::to_string(3 * unknowns) +
                     " samples for " + std::to_string(unknowns) + " unknowns, have " + std::to_string(available));
  }
}

Eigen::MatrixXd unpack_beta(const Eigen::VectorXd& flat, Eigen::Index offset, int order, Eigen::Index p) {
  Eigen::MatrixXd beta(order + 1, p);
  for (int k = 0; k <= order; ++k) {
    for (Eigen::Index j = 0; j < p; ++j) beta(k, j) = flat[offset + k * p + j];
  }
  return beta;
}

}  // namespace

BetaSet solve_beta(const SystemModel& system, const SampleSet& samples, int order, const CharPoly& alpha,
                   const SpanOptions& options) {
  const auto p = static_cast<Eigen::Index>(system.p());
  const Eigen::Index unknowns = (order + 1) * p;
  check_oversampling(samples.count(), unknowns, "span test");
  const LsqSystem lsq = build_lsq(system, samples, order, alpha, options.policy);
  check_oversampling(static_cast<Eigen::Index>(lsq.used_samples.size()), unknowns, "span test after skipping");

  const auto pref = beta_column_preference(order, p);
  const OrderedLsqResult fit = solve_ordered_lsq(lsq.design, lsq.rhs, pref, options.dependence_tol);

  BetaSet out;
  out.rows = unpack_beta(fit.solution, 0, order, p);
  out.residual = fit.residual_norm / std::max(lsq.rhs.norm(), kResidualFloor);
  out.tolerance = options.tol;
  out.condition = fit.condition;
  out.ill_conditioned = !(fit.condition <= options.condition_limit);
  out.feasible = out.residual <= options.tol;
  out.skipped_samples = lsq.skipped_samples;
  return out;
}

double span_residual(const SystemModel& system, const SampleSet& samples, const CharPoly& alpha,
                     const Eigen::MatrixXd& beta) {
  const int order = alpha.order();
  const auto p = static_cast<Eigen::Index>(system.p());
  if (beta.rows() != order + 1 || beta.cols() != p) throw InputError("beta has wrong shape");
  const LsqSystem lsq = build_lsq(system, samples, order, alpha);
  Eigen::VectorXd flat((order + 1) * p);
  for (int k = 0; k <= order; ++k) {
    for (Eigen::Index j = 0; j < p; ++j) flat[k * p + j] = beta(k, j);
  }
  return (lsq.design * flat - lsq.rhs).norm() / std::max(lsq.rhs.norm(), kResidualFloor);
}

JointSolution solve_joint(const SystemModel& system, const SampleSet& samples, int order,
                          const SpanOptions& options) {
  if (order < 1) throw InputError("observer order must be at least 1");
  const auto p = static_cast<Eigen::Index>(system.p());
  const Eigen::Index unknowns = order + (order + 1) * p;
  check_oversampling(samples.count(), unknowns, "joint span test");
  const auto tables = lie_tables(system, samples, order, options.policy);

  std::vector<Eigen::Index> used, skipped;
  for (std::size_t s = 0; s < tables.size(); ++s) {
    (tables[s] ? used : skipped).push_back(static_cast<Eigen::Index>(s));
  }
  check_oversampling(static_cast<Eigen::Index>(used.size()), unknowns, "joint span test after skipping");

  // L_F^v q = -sum_i alpha_i L_F^{v-i} q + sum_k beta_k L_F^{v-k} H
  const auto rows = static_cast<Eigen::Index>(used.size());
  Eigen::MatrixXd m(rows, unknowns);
  Eigen::VectorXd r(rows);
  for (Eigen::Index row = 0; row < rows; ++row) {
    const LieTable& t = *tables[static_cast<std::size_t>(used[static_cast<std::size_t>(row)])];
    for (int i = 1; i <= order; ++i) m(row, i - 1) = -t.functional[order - i];
    for (int k = 0; k <= order; ++k) {
      for (Eigen::Index j = 0; j < p; ++j) m(row, order + k * p + j) = t.outputs(j, order - k);
    }
    r[row] = t.functional[order];
  }

  std::vector<Eigen::Index> pref;
  for (int i = order; i >= 1; --i) pref.push_back(i - 1);
  for (Eigen::Index c : beta_column_preference(order, p, order)) pref.push_back(c);
  const OrderedLsqResult fit = solve_ordered_lsq(m, r, pref, options.dependence_tol);

  JointSolution out;
  out.alpha = char_from_alpha(fit.solution.head(order));
  out.beta.rows = unpack_beta(fit.solution, order, order, p);
  out.beta.residual = fit.residual_norm / std::max(r.norm(), kResidualFloor);
  out.beta.tolerance = options.tol;
  out.beta.condition = fit.condition;
  out.beta.ill_conditioned = !(fit.condition <= options.condition_limit);
  out.beta.feasible = out.beta.residual <= options.tol && out.alpha.hurwitz;
  out.beta.skipped_samples = std::move(skipped);
  return out;
}

}  // namespace folin
