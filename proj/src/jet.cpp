#include "folin/jet.hpp"

#include <algorithm>
#include <string>

namespace folin {
namespace {

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw InputError("jet order " + std::to_string(order) + " outside [0, " +
                     std::to_string(kMaxJetOrder) + "]");
  }
}

void check_same_order(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) {
    throw InputError("jet order mismatch (" + std::to_string(a.order()) + " vs " +
                     std::to_string(b.order()) + ")");
  }
}

}  // namespace

Jet::Jet(int order, double value) : order_(order) {
  check_order(order);
  c_[0] = value;
}

Jet::Jet(int order, std::initializer_list<double> coefficients) : order_(order) {
  check_order(order);
  if (coefficients.size() > static_cast<std::size_t>(order) + 1) {
    throw InputError("too many coefficients for jet order " + std::to_string(order));
  }
  std::copy(coefficients.begin(), coefficients.end(), c_.begin());
}

Jet& Jet::operator+=(const Jet& rhs) {
  check_same_order(*this, rhs);
  for (int k = 0; k <= order_; ++k) (*this)[k] += rhs[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  check_same_order(*this, rhs);
  for (int k = 0; k <= order_; ++k) (*this)[k] -= rhs[k];
  return *this;
}

Jet& Jet::operator*=(const Jet& rhs) {
  check_same_order(*this, rhs);
  Jet out(order_, 0.0);
  for (int k = 0; k <= order_; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += (*this)[i] * rhs[k - i];
    out[k] = s;
  }
  return *this = out;
}

Jet& Jet::operator/=(const Jet& rhs) {
  check_same_order(*this, rhs);
  if (rhs[0] == 0.0) throw DomainError("division by zero");
  Jet out(order_, 0.0);
  for (int k = 0; k <= order_; ++k) {
    double s = (*this)[k];
    for (int i = 1; i <= k; ++i) s -= rhs[i] * out[k - i];
    out[k] = s / rhs[0];
  }
  return *this = out;
}

Jet operator-(Jet x) {
  for (int k = 0; k <= x.order_; ++k) x[k] = -x[k];
  return x;
}

bool operator==(const Jet& a, const Jet& b) {
  if (a.order_ != b.order_) return false;
  for (int k = 0; k <= a.order_; ++k) {
    if (a[k] != b[k]) return false;
  }
  return true;
}

namespace {

// s = sin(x), c = cos(x), computed together through s' = c x', c' = -s x'.
void sin_cos(const Jet& x, Jet& s, Jet& c) {
  const int order = x.order();
  s = Jet(order, std::sin(x[0]));
  c = Jet(order, std::cos(x[0]));
  for (int k = 1; k <= order; ++k) {
    double ds = 0.0;
    double dc = 0.0;
    for (int j = 1; j <= k; ++j) {
      ds += j * x[j] * c[k - j];
      dc += j * x[j] * s[k - j];
    }
    s[k] = ds / k;
    c[k] = -dc / k;
  }
}

}  // namespace

Jet sin(const Jet& x) {
  Jet s, c;
  sin_cos(x, s, c);
  return s;
}

Jet cos(const Jet& x) {
  Jet s, c;
  sin_cos(x, s, c);
  return c;
}

Jet exp(const Jet& x) {
  const int order = x.order();
  Jet e(order, std::exp(x[0]));
  for (int k = 1; k <= order; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * x[j] * e[k - j];
    e[k] = s / k;
  }
  return e;
}

Jet log(const Jet& x) {
  if (!(x[0] > 0.0)) throw DomainError("log of non-positive value");
  const int order = x.order();
  Jet l(order, std::log(x[0]));
  for (int k = 1; k <= order; ++k) {
    double s = 0.0;
    for (int j = 1; j < k; ++j) s += j * l[j] * x[k - j];
    l[k] = (x[k] - s / k) / x[0];
  }
  return l;
}

Jet sqrt(const Jet& x) {
  if (x[0] < 0.0) throw DomainError("sqrt of negative value");
  const int order = x.order();
  if (order > 0 && x[0] == 0.0) throw DomainError("sqrt is not differentiable at zero");
  Jet r(order, std::sqrt(x[0]));
  for (int k = 1; k <= order; ++k) {
    double s = x[k];
    for (int j = 1; j < k; ++j) s -= r[j] * r[k - j];
    r[k] = s / (2.0 * r[0]);
  }
  return r;
}

Jet abs(const Jet& x) {
  // Sign of the leading nonzero coefficient decides the branch for small t > 0.
  for (int k = 0; k <= x.order(); ++k) {
    if (x[k] != 0.0) return x[k] < 0.0 ? -x : x;
  }
  return x;
}

void scale_by_factorials(std::span<double> coefficients) {
  double factorial = 1.0;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (k > 0) factorial *= static_cast<double>(k);
    coefficients[k] *= factorial;
  }
}

}  // namespace folin
