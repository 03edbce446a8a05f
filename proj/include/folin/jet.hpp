#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "folin/error.hpp"

namespace folin {

/// Highest Taylor order carried by a Jet.
inline constexpr int kMaxJetOrder = 32;

/// Truncated Taylor series c_0 + c_1 t + ... + c_K t^K.
///
/// All arithmetic closes at the order of the operands by truncation. Mixing
/// jets of different orders is an error. Storage is inline, so jets are cheap
/// to copy and never allocate.
class Jet {
 public:
  Jet() = default;

  /// Constant jet of the given order.
  Jet(int order, double value);

  /// Jet with explicit leading coefficients; the rest are zero.
  Jet(int order, std::initializer_list<double> coefficients);

  int order() const noexcept { return order_; }
  double operator[](int k) const noexcept { return c_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) noexcept { return c_[static_cast<std::size_t>(k)]; }
  double value() const noexcept { return c_[0]; }

  std::span<const double> coefficients() const noexcept {
    return {c_.data(), static_cast<std::size_t>(order_) + 1};
  }

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);

  friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
  friend Jet operator*(Jet lhs, const Jet& rhs) { return lhs *= rhs; }
  friend Jet operator/(Jet lhs, const Jet& rhs) { return lhs /= rhs; }
  friend Jet operator-(Jet x);

  friend bool operator==(const Jet& a, const Jet& b);

 private:
  int order_ = 0;
  std::array<double, kMaxJetOrder + 1> c_{};
};

Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sqrt(const Jet& x);
Jet abs(const Jet& x);

/// Multiplies coefficient k by k!, turning Taylor coefficients into derivatives.
void scale_by_factorials(std::span<double> coefficients);

}  // namespace folin
