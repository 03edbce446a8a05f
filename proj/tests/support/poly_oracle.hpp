#pragma once

// Independent oracle for Lie derivatives of polynomial systems: exact
// symbolic differentiation on sparse monomial maps, no jets involved.

#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Exponents = std::vector<int>;

struct Poly {
  std::map<Exponents, double> terms;
  int n = 0;

  explicit Poly(int vars = 0) : n(vars) {}

  Poly& operator+=(const Poly& o) {
    for (const auto& [e, c] : o.terms) terms[e] += c;
    return *this;
  }

  Poly operator*(const Poly& o) const {
    Poly out(n);
    for (const auto& [ea, ca] : terms) {
      for (const auto& [eb, cb] : o.terms) {
        Exponents e(ea);
        for (int i = 0; i < n; ++i) e[i] += eb[i];
        out.terms[e] += ca * cb;
      }
    }
    return out;
  }

  Poly diff(int var) const {
    Poly out(n);
    for (const auto& [e, c] : terms) {
      if (e[var] == 0) continue;
      Exponents d(e);
      d[var] -= 1;
      out.terms[d] += c * e[var];
    }
    return out;
  }

  double operator()(const Eigen::VectorXd& x) const {
    double sum = 0.0;
    for (const auto& [e, c] : terms) {
      double m = c;
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < e[i]; ++k) m *= x[i];
      }
      sum += m;
    }
    return sum;
  }

  std::string text() const {
    std::string s;
    for (const auto& [e, c] : terms) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", c);
      s += s.empty() ? "" : " + ";
      s += std::string("(") + buf + ")";
      for (int i = 0; i < n; ++i) {
        if (e[i] > 0) s += "*x" + std::to_string(i + 1) + "^" + std::to_string(e[i]);
      }
    }
    return s.empty() ? "0" : s;
  }
};

/// L_F p = sum_i dp/dx_i F_i
inline Poly lie(const Poly& p, const std::vector<Poly>& f) {
  Poly out(p.n);
  for (int i = 0; i < p.n; ++i) out += p.diff(i) * f[static_cast<std::size_t>(i)];
  return out;
}

/// Random polynomial with up to `terms` monomials of total degree <= degree.
inline Poly random_poly(std::mt19937_64& rng, int n, int degree, int terms) {
  std::uniform_int_distribution<int> deg(0, degree);
  std::uniform_int_distribution<int> var(0, n - 1);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Poly p(n);
  for (int t = 0; t < terms; ++t) {
    Exponents e(static_cast<std::size_t>(n), 0);
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) e[static_cast<std::size_t>(var(rng))] += 1;
    p.terms[e] += coef(rng);
  }
  return p;
}

}  // namespace oracle
