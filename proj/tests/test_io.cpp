#include <gtest/gtest.h>

#include "folin/io.hpp"
#include "support/paths.hpp"

using namespace folin;

TEST(SystemFile, ShippedFilesLoad) {
  const LoadedSystem cstr = load_system(data_file("cstr.json"));
  EXPECT_EQ(cstr.model.n(), 4u);
  EXPECT_EQ(cstr.model.p(), 2u);
  EXPECT_FALSE(cstr.linear);
  const LoadedSystem ex = load_system(data_file("example75.json"));
  EXPECT_EQ(ex.model.n(), 3u);
  EXPECT_EQ(ex.origin, Eigen::Vector3d::Zero());
  const LoadedSystem dbl = load_system(data_file("dblint.json"));
  ASSERT_TRUE(dbl.linear);
  EXPECT_EQ(dbl.model.box().lower, Eigen::Vector2d(-1, -1));
  EXPECT_EQ(dbl.model.f(Eigen::Vector2d(2, 3)), Eigen::Vector2d(3, 0));
}

TEST(SystemFile, ParameterExpressions) {
  const LoadedSystem s = parse_system(R"json({
    "states": ["x"], "params": {"a": 2, "b": "a^2 + exp(0)"},
    "dynamics": ["-b*x"], "outputs": ["x"], "functional": "x",
    "box": {"lower": [-1], "upper": [1]}})json");
  EXPECT_DOUBLE_EQ(s.model.f(Eigen::VectorXd::Constant(1, 1.0))[0], -5.0);
}

TEST(SystemFile, Errors) {
  EXPECT_THROW(parse_system("{"), InputError);
  EXPECT_THROW(parse_system(R"json({"states": ["x"]})json"), InputError);
  EXPECT_THROW(parse_system(R"json({"states": ["x"], "dynamics": ["x +"], "outputs": ["x"], "functional": "x",
                                "box": {"lower": [-1], "upper": [1]}})json"),
               InputError);
  EXPECT_THROW(parse_system(R"json({"states": ["x"], "params": {"b": "c"}, "dynamics": ["x"], "outputs": ["x"],
                                "functional": "x", "box": {"lower": [-1], "upper": [1]}})json"),
               InputError);
  EXPECT_THROW(parse_system(R"json({"linear": {"F": [[0, 1], [0]], "H": [[1, 0]], "q": [0, 1]}})json"), InputError);
  EXPECT_THROW(parse_system(R"json({"linear": {"F": [[0, 1], [0, 0]], "H": [[1, 0]], "q": [0, 1, 2]}})json"), InputError);
  try {
    parse_system(R"json({"states": ["x"], "dynamics": ["x +"], "outputs": ["x"], "functional": "x",
                     "box": {"lower": [-1], "upper": [1]}})json");
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("dynamics[0]"), std::string::npos);
  }
}

TEST(ObserverFile, LtiRoundTrip) {
  const LoadedSystem dbl = load_system(data_file("dblint.json"));
  const std::vector<std::complex<double>> r{{-3.0, 0.0}};
  const ObserverLTI obs = design_corollary(*dbl.linear, r);
  const AnyObserver back = parse_observer(observer_to_json(obs), dbl.model);
  const auto& o = std::get<ObserverLTI>(back);
  EXPECT_EQ(o.A, obs.A);
  EXPECT_EQ(o.B, obs.B);
  EXPECT_EQ(o.D, obs.D);
  EXPECT_EQ(o.beta, obs.beta);
}

TEST(ObserverFile, LtiInconsistentMatricesRejected) {
  const LoadedSystem dbl = load_system(data_file("dblint.json"));
  EXPECT_THROW(parse_observer(R"json({"kind": "lti", "alpha": [3], "beta": [[3], [0]], "A": [[-2]]})json", dbl.model),
               InputError);
  EXPECT_THROW(parse_observer(R"json({"kind": "lti", "alpha": [3], "beta": [[3, 1], [0, 1]]})json", dbl.model), InputError);
  EXPECT_THROW(parse_observer(R"json({"kind": "other", "alpha": [3]})json", dbl.model), InputError);
  EXPECT_NO_THROW(parse_observer(R"json({"kind": "lti", "roots": [-3], "beta": [[3], [0]], "B": [[-9]]})json", dbl.model));
}

TEST(ObserverFile, General) {
  const LoadedSystem ex = load_system(data_file("example75.json"));
  const AnyObserver any = load_observer(data_file("example75_general.json"), ex.model);
  const auto& g = std::get<GeneralObserver>(any);
  EXPECT_EQ(g.A(0, 0), -1.0);
  const AnyObserver again = parse_observer(observer_to_json(g.spec), ex.model);
  EXPECT_TRUE(std::get<GeneralObserver>(again).spec.z0() == g.spec.z0());
  EXPECT_THROW(parse_observer(R"json({"kind": "general", "alpha": [1], "Z0": "z - y^2", "Z": ["-y^3"]})json", ex.model),
               InputError);
}

TEST(ScenarioFile, ShiftsToDeviationCoordinates) {
  const LoadedSystem cstr = load_system(data_file("cstr.json"));
  const Scenario sc = load_scenario(data_file("cstr_startup.json"), cstr);
  EXPECT_NEAR(sc.x0[2], 300.0 - cstr.origin[2], 1e-12);
  EXPECT_EQ(sc.init_error, Eigen::VectorXd::Constant(1, 1.0));
  EXPECT_EQ(*sc.t_end, 300.0);
  EXPECT_THROW(parse_scenario(R"json({"x0": [1, 2]})json", cstr), InputError);
  EXPECT_THROW(parse_scenario(R"json({"x0": [0, 0, 0, 0], "xi0": [1], "init_error": 1})json", cstr), InputError);
}

TEST(Parsing, RootsAndVectors) {
  const auto r = parse_roots("-1, -2+3j,-2-3j, -1e-2");
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[1], std::complex<double>(-2, 3));
  EXPECT_EQ(r[2], std::complex<double>(-2, -3));
  EXPECT_EQ(r[3], std::complex<double>(-0.01, 0));
  EXPECT_EQ(parse_roots("-1e-1+2e-1j")[0], std::complex<double>(-0.1, 0.2));
  EXPECT_THROW(parse_roots("-1,,2"), InputError);
  EXPECT_THROW(parse_roots("abc"), InputError);
  EXPECT_EQ(parse_vector("1, 2.5,-3"), Eigen::Vector3d(1, 2.5, -3));
  EXPECT_THROW(parse_vector("1;2"), InputError);
}

TEST(ObserverFile, RootForms) {
  const LoadedSystem dbl = load_system(data_file("dblint.json"));
  for (const char* roots : {"[-3]", "[[-3, 0]]", "[\"-3\"]"}) {
    const auto o = std::get<ObserverLTI>(
        parse_observer(std::string(R"json({"kind": "lti", "roots": )json") + roots + R"json(, "beta": [[3], [0]]})json",
                       dbl.model));
    EXPECT_EQ(o.A(0, 0), -3.0) << roots;
  }
  EXPECT_THROW(parse_observer(R"json({"kind": "lti", "roots": [-3], "alpha": [3], "beta": [[3], [0]]})json", dbl.model),
               InputError);
}
