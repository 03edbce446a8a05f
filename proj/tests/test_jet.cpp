#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "folin/jet.hpp"

using namespace folin;

namespace {

// t as a jet of the given order
Jet t_jet(int order) { return Jet(order, {0.0, 1.0}); }

void expect_coeffs(const Jet& j, std::initializer_list<double> want, double tol = 1e-14) {
  int k = 0;
  for (double w : want) {
    EXPECT_NEAR(j[k], w, tol * std::max(1.0, std::abs(w))) << "coefficient " << k;
    ++k;
  }
}

}  // namespace

TEST(Jet, ConstantAndOrder) {
  const Jet c(4, 2.5);
  EXPECT_EQ(c.order(), 4);
  expect_coeffs(c, {2.5, 0, 0, 0, 0});
  EXPECT_THROW(Jet(kMaxJetOrder + 1, 0.0), InputError);
  EXPECT_THROW(Jet(-1, 0.0), InputError);
}

TEST(Jet, OrderMismatchIsError) { EXPECT_THROW(Jet(2, 1.0) + Jet(3, 1.0), InputError); }

TEST(Jet, Cube) {
  const Jet x(2, {2.0, 1.0});
  expect_coeffs(x * x * x, {8.0, 12.0, 6.0});
}

TEST(Jet, Division) {
  // 1/(1-t) = 1 + t + t^2 + ...
  const Jet one(6, 1.0);
  expect_coeffs(one / (one - t_jet(6)), {1, 1, 1, 1, 1, 1, 1});
  EXPECT_THROW(one / t_jet(6), DomainError);
}

TEST(Jet, Exp) {
  // exp(t) = sum t^k / k!
  expect_coeffs(exp(t_jet(5)), {1, 1, 0.5, 1.0 / 6, 1.0 / 24, 1.0 / 120});
}

TEST(Jet, SinCos) {
  const Jet t = t_jet(5);
  expect_coeffs(sin(t), {0, 1, 0, -1.0 / 6, 0, 1.0 / 120});
  expect_coeffs(cos(t), {1, 0, -0.5, 0, 1.0 / 24, 0});
}

TEST(Jet, LogAndSqrt) {
  const Jet one(5, 1.0);
  // log(1+t) = t - t^2/2 + t^3/3 - ...
  expect_coeffs(log(one + t_jet(5)), {0, 1, -0.5, 1.0 / 3, -0.25, 0.2});
  // sqrt(1+t) = 1 + t/2 - t^2/8 + t^3/16 - 5t^4/128
  expect_coeffs(sqrt(one + t_jet(5)), {1, 0.5, -0.125, 0.0625, -5.0 / 128});
  EXPECT_THROW(log(t_jet(5)), DomainError);
  EXPECT_THROW(log(Jet(2, -1.0)), DomainError);
  EXPECT_THROW(sqrt(t_jet(3)), DomainError);
  EXPECT_NO_THROW(sqrt(Jet(0, 0.0)));
}

TEST(Jet, Abs) {
  const Jet x(3, {-2.0, 1.0, 0.5});
  expect_coeffs(abs(x), {2.0, -1.0, -0.5});
  const Jet y(3, {0.0, -1.0});
  expect_coeffs(abs(y), {0.0, 1.0});
}

TEST(Jet, IdentitiesOnRandomSeries) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Jet x(8, 0.0);
    x[0] = 1.0 + std::abs(u(rng));
    for (int k = 1; k <= 8; ++k) x[k] = u(rng);
    const Jet s = sin(x), c = cos(x);
    const Jet one = s * s + c * c;
    EXPECT_NEAR(one[0], 1.0, 1e-13);
    for (int k = 1; k <= 8; ++k) EXPECT_NEAR(one[k], 0.0, 1e-12);
    const Jet back = log(exp(x));
    for (int k = 0; k <= 8; ++k) EXPECT_NEAR(back[k], x[k], 1e-12);
    const Jet sq = sqrt(x) * sqrt(x);
    for (int k = 0; k <= 8; ++k) EXPECT_NEAR(sq[k], x[k], 1e-12);
    const Jet q = (x * x) / x;
    for (int k = 0; k <= 8; ++k) EXPECT_NEAR(q[k], x[k], 1e-12);
  }
}

TEST(Jet, FactorialScaling) {
  std::vector<double> c{1.0, 1.0, 1.0, 1.0, 1.0};
  scale_by_factorials(c);
  EXPECT_EQ(c, (std::vector<double>{1, 1, 2, 6, 24}));
}
