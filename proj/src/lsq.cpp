#include "folin/lsq.hpp"

#include <cmath>
#include <limits>

#include "folin/error.hpp"

namespace folin {

OrderedLsqResult solve_ordered_lsq(const Eigen::MatrixXd& m, const Eigen::VectorXd& r,
                                   std::span<const Eigen::Index> preference, double dependence_tol) {
  if (m.rows() != r.size()) throw InputError("least-squares dimensions disagree");
  const Eigen::Index rows = m.rows();

  OrderedLsqResult out;
  out.kept.assign(static_cast<std::size_t>(m.cols()), false);
  out.solution = Eigen::VectorXd::Zero(m.cols());

  Eigen::MatrixXd basis(rows, 0);
  std::vector<Eigen::Index> kept_cols;
  std::vector<double> norms;
  for (Eigen::Index c : preference) {
    const double norm = m.col(c).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) continue;
    Eigen::VectorXd u = m.col(c) / norm;
    // Classical Gram-Schmidt with one reorthogonalization pass.
    for (int pass = 0; pass < 2 && basis.cols() > 0; ++pass) u -= basis * (basis.transpose() * u);
    const double rest = u.norm();
    if (rest <= dependence_tol) continue;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = u / rest;
    kept_cols.push_back(c);
    norms.push_back(norm);
  }

  if (!kept_cols.empty()) {
    Eigen::MatrixXd reduced(rows, static_cast<Eigen::Index>(kept_cols.size()));
    for (std::size_t k = 0; k < kept_cols.size(); ++k) {
      reduced.col(static_cast<Eigen::Index>(k)) = m.col(kept_cols[k]) / norms[k];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    out.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    const Eigen::VectorXd y = svd.solve(r);
    for (std::size_t k = 0; k < kept_cols.size(); ++k) {
      out.solution[kept_cols[k]] = y[static_cast<Eigen::Index>(k)] / norms[k];
      out.kept[static_cast<std::size_t>(kept_cols[k])] = true;
    }
  }
  out.residual_norm = (m * out.solution - r).norm();
  return out;
}

}  // namespace folin
