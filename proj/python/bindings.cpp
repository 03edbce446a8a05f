#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "folin/error.hpp"
#include "folin/gfol.hpp"
#include "folin/io.hpp"
#include "folin/lie.hpp"
#include "folin/lti.hpp"
#include "folin/sim.hpp"
#include "folin/span.hpp"
#include "folin/synth.hpp"

namespace py = pybind11;
using namespace folin;

namespace {

CharPoly make_alpha(std::optional<std::vector<std::complex<double>>> roots, std::optional<Eigen::VectorXd> alpha) {
  if (roots.has_value() == alpha.has_value()) throw InputError("give exactly one of roots= or alpha=");
  return roots ? char_from_roots(*roots) : char_from_alpha(*alpha);
}

SampleSet samples_for(const SystemModel& m, Eigen::Index n, std::uint64_t seed) { return sample(m.box(), n, seed); }

}  // namespace

PYBIND11_MODULE(_folin, mod) {
  mod.doc() = "Functional observers for nonlinear systems (C++ core)";

  auto input_error = py::register_exception<InputError>(mod, "InputError", PyExc_ValueError);
  py::register_exception<DomainError>(mod, "DomainError", PyExc_ArithmeticError);
  auto numerical = py::register_exception<NumericalError>(mod, "NumericalError", PyExc_RuntimeError);
  py::register_exception<SimulationFailure>(mod, "SimulationFailure", PyExc_RuntimeError);
  (void)input_error;
  (void)numerical;

  py::class_<SystemModel>(mod, "SystemModel")
      .def_property_readonly("n", &SystemModel::n)
      .def_property_readonly("p", &SystemModel::p)
      .def_property_readonly("states", &SystemModel::state_names)
      .def_property_readonly("lower", [](const SystemModel& m) { return m.box().lower; })
      .def_property_readonly("upper", [](const SystemModel& m) { return m.box().upper; })
      .def("f", &SystemModel::f)
      .def("h", &SystemModel::h)
      .def("q", &SystemModel::q);

  py::class_<LTISystem>(mod, "LTISystem")
      .def(py::init([](Eigen::MatrixXd F, Eigen::MatrixXd H, Eigen::RowVectorXd q) {
             LTISystem s{std::move(F), std::move(H), std::move(q)};
             s.check();
             return s;
           }),
           py::arg("F"), py::arg("H"), py::arg("q"))
      .def_readonly("F", &LTISystem::F)
      .def_readonly("H", &LTISystem::H)
      .def_readonly("q", &LTISystem::q);

  py::class_<LoadedSystem>(mod, "LoadedSystem")
      .def_readonly("model", &LoadedSystem::model)
      .def_readonly("linear", &LoadedSystem::linear)
      .def_readonly("origin", &LoadedSystem::origin);

  mod.def("load_system", &load_system, py::arg("path"));
  mod.def("parse_system", &parse_system, py::arg("text"));

  py::class_<CharPoly>(mod, "CharPoly")
      .def_readonly("alpha", &CharPoly::alpha)
      .def_readonly("roots", &CharPoly::roots)
      .def_readonly("hurwitz", &CharPoly::hurwitz);
  mod.def("char_poly", &make_alpha, py::kw_only(), py::arg("roots") = py::none(), py::arg("alpha") = py::none());

  py::class_<BetaSet>(mod, "BetaSet")
      .def_readonly("beta", &BetaSet::rows)
      .def_readonly("residual", &BetaSet::residual)
      .def_readonly("tolerance", &BetaSet::tolerance)
      .def_readonly("condition", &BetaSet::condition)
      .def_readonly("feasible", &BetaSet::feasible)
      .def_readonly("ill_conditioned", &BetaSet::ill_conditioned);

  mod.def(
      "solve_beta",
      [](const SystemModel& m, int order, std::optional<std::vector<std::complex<double>>> roots,
         std::optional<Eigen::VectorXd> alpha, Eigen::Index samples, std::uint64_t seed, double tol) {
        SpanOptions opt;
        opt.tol = tol;
        return solve_beta(m, samples_for(m, samples, seed), order, make_alpha(roots, alpha), opt);
      },
      py::arg("system"), py::arg("order"), py::kw_only(), py::arg("roots") = py::none(), py::arg("alpha") = py::none(),
      py::arg("samples") = 200, py::arg("seed") = 1, py::arg("tol") = 1e-8,
      py::call_guard<py::gil_scoped_release>());

  py::class_<ObserverLTI>(mod, "ObserverLTI")
      .def_readonly("A", &ObserverLTI::A)
      .def_readonly("B", &ObserverLTI::B)
      .def_readonly("C", &ObserverLTI::C)
      .def_readonly("D", &ObserverLTI::D)
      .def_readonly("alpha", &ObserverLTI::alpha)
      .def_readonly("beta", &ObserverLTI::beta)
      .def("to_json", [](const ObserverLTI& o) { return observer_to_json(o); });

  mod.def(
      "synthesize",
      [](const CharPoly& alpha, const Eigen::MatrixXd& beta, bool allow_unstable) {
        return synthesize(alpha, beta, allow_unstable);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("allow_unstable") = false);
  mod.def(
      "beta_from_observer",
      [](const ObserverLTI& o) { return beta_from_observer(o, o.alpha).rows; }, py::arg("observer"));
  mod.def("obs_index", &obs_index, py::arg("system"));
  mod.def(
      "design_corollary",
      [](const LTISystem& s, const std::vector<std::complex<double>>& roots) { return design_corollary(s, roots); },
      py::arg("system"), py::arg("roots"));

  py::class_<VerifyReport>(mod, "VerifyReport")
      .def_readonly("max_mismatch", &VerifyReport::max_mismatch)
      .def_readonly("tolerance", &VerifyReport::tolerance)
      .def_readonly("passed", &VerifyReport::pass);

  py::class_<GeneralSpec>(mod, "GeneralSpec")
      .def_property_readonly("order", &GeneralSpec::order)
      .def("g", &GeneralSpec::g)
      .def("zvec", &GeneralSpec::zvec)
      .def("to_json", [](const GeneralSpec& s) { return observer_to_json(s); });
  py::class_<GeneralObserver>(mod, "GeneralObserver")
      .def_readonly("A", &GeneralObserver::A)
      .def_readonly("C", &GeneralObserver::C)
      .def_readonly("spec", &GeneralObserver::spec);

  mod.def("load_observer", &load_observer, py::arg("path"), py::arg("system"));
  mod.def("parse_observer", &parse_observer, py::arg("text"), py::arg("system"));
  mod.def(
      "verify_71",
      [](const SystemModel& m, const GeneralSpec& spec, Eigen::Index samples, std::uint64_t seed, double tol) {
        return verify_71(m, spec, samples_for(m, samples, seed), tol);
      },
      py::arg("system"), py::arg("spec"), py::kw_only(), py::arg("samples") = 200, py::arg("seed") = 1,
      py::arg("tol") = 1e-8);
  mod.def(
      "invert_G",
      [](const GeneralSpec& spec, double zeta, const Eigen::VectorXd& y) { return invert_G(spec, zeta, y); },
      py::arg("spec"), py::arg("zeta"), py::arg("y"));

  mod.def(
      "lie_derivatives",
      [](const SystemModel& m, const std::string& f, const Eigen::VectorXd& x, int order) {
        return lie_derivatives(m, parse(f), x, order);
      },
      py::arg("system"), py::arg("f"), py::arg("x"), py::arg("order"));

  py::class_<Trajectory>(mod, "Trajectory")
      .def_readonly("t", &Trajectory::t)
      .def_readonly("x", &Trajectory::x)
      .def_readonly("y", &Trajectory::y)
      .def_readonly("z", &Trajectory::z)
      .def_readonly("xi", &Trajectory::xi)
      .def_readonly("zhat", &Trajectory::zhat)
      .def_readonly("e_out", &Trajectory::e_out)
      .def_readonly("e_ref", &Trajectory::e_ref)
      .def("to_csv", &export_csv, py::arg("path"));

  py::class_<DecayReport>(mod, "DecayReport")
      .def_readonly("max_deviation", &DecayReport::max_deviation)
      .def_readonly("relative", &DecayReport::relative)
      .def_readonly("passed", &DecayReport::pass);

  mod.def(
      "simulate",
      [](const SystemModel& m, const AnyObserver& obs, const Eigen::VectorXd& x0, double t_end, double dt,
         std::optional<Eigen::VectorXd> xi0, std::optional<Eigen::VectorXd> init_error, int stride) {
        SimConfig cfg;
        cfg.t_end = t_end;
        cfg.dt = dt;
        cfg.x0 = x0;
        cfg.xi0 = xi0;
        if (init_error) cfg.xi_offset = *init_error;
        cfg.stride = stride;
        return simulate(m, obs, cfg);
      },
      py::arg("system"), py::arg("observer"), py::arg("x0"), py::kw_only(), py::arg("t_end"), py::arg("dt"),
      py::arg("xi0") = py::none(), py::arg("init_error") = py::none(), py::arg("stride") = 1,
      py::call_guard<py::gil_scoped_release>());
  mod.def("error_decay_check", &error_decay_check, py::arg("trajectory"), py::arg("tol") = 1e-6);
  mod.def("manifold_residual", &manifold_residual, py::arg("trajectory"));
}
