#include <gtest/gtest.h>

#include "folin/io.hpp"
#include "folin/system.hpp"
#include "support/models.hpp"
#include "support/paths.hpp"

using namespace folin;

TEST(Box, Validation) {
  EXPECT_THROW(Box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)), InputError);
  EXPECT_THROW(Box(Eigen::Vector2d(0, 0), Eigen::Vector3d(1, 1, 1)), InputError);
  const Box b(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 2));
  EXPECT_TRUE(b.contains(Eigen::Vector2d(0.5, 1.5)));
  EXPECT_FALSE(b.contains(Eigen::Vector2d(0.5, 2.5)));
}

TEST(SystemModel, RejectsUnknownNames) {
  EXPECT_THROW(make_model({"x"}, {"x + k"}, {"x"}, "x"), InputError);
  EXPECT_THROW(make_model({"x"}, {"x"}, {"x"}, "x + w"), InputError);
  EXPECT_NO_THROW(make_model({"x"}, {"-k*x"}, {"x"}, "x", 1.0, {{"k", 2.0}}));
}

TEST(SystemModel, RejectsDuplicateAndShapeErrors) {
  EXPECT_THROW(make_model({"x", "x"}, {"x", "x"}, {"x"}, "x"), InputError);
  EXPECT_THROW(make_model({"x", "y"}, {"x"}, {"x"}, "x"), InputError);
}

TEST(SystemModel, ParametersAreFolded) {
  const SystemModel m = make_model({"x"}, {"-k*x"}, {"2*x"}, "x^2", 1.0, {{"k", 3.0}});
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 2.0);
  EXPECT_DOUBLE_EQ(m.f(x)[0], -6.0);
  EXPECT_DOUBLE_EQ(m.h(x)[0], 4.0);
  EXPECT_DOUBLE_EQ(m.q(x), 4.0);
}

TEST(SystemModel, ShiftedCoordinates) {
  const SystemModel m = make_model({"x", "y"}, {"1 - x", "x*y - y"}, {"x^2"}, "x + y");
  const Eigen::Vector2d origin(1.0, 0.5);
  const SystemModel s = m.shifted(origin);
  const Eigen::Vector2d d(0.3, -0.2);
  EXPECT_NEAR(s.f(d)[0], m.f(d + origin)[0], 1e-15);
  EXPECT_NEAR(s.f(d)[1], m.f(d + origin)[1], 1e-15);
  EXPECT_NEAR(s.h(d)[0], m.h(d + origin)[0] - m.h(origin)[0], 1e-15);
  EXPECT_NEAR(s.q(d), m.q(d + origin) - m.q(origin), 1e-15);
  EXPECT_NEAR(s.h(Eigen::Vector2d::Zero())[0], 0.0, 1e-15);
  EXPECT_NEAR(s.box().lower[0], m.box().lower[0] - 1.0, 1e-15);
}

TEST(RefineEquilibrium, ConvergesOnCstr) {
  const LoadedSystem cstr = load_system(data_file("cstr.json"));
  // The loader already refined: the shifted origin is an equilibrium.
  EXPECT_LT(cstr.model.f(Eigen::Vector4d::Zero()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(cstr.origin[0], 3.9899951, 1e-6);
  EXPECT_NEAR(cstr.origin[2], 333.01135, 1e-4);
}

TEST(RefineEquilibrium, FailsWithoutEquilibrium) {
  const SystemModel m = make_model({"x"}, {"1 + x^2"}, {"x"}, "x");
  EXPECT_THROW(refine_equilibrium(m, Eigen::VectorXd::Constant(1, 0.0)), NumericalError);
}
