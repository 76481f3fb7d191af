#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "poolmech/errors.hpp"
#include "poolmech/oracle.hpp"
#include "poolmech/serialize.hpp"
#include "poolmech/solve_endo.hpp"
#include "poolmech/solve_exo.hpp"

namespace py = pybind11;
using namespace poolmech;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Joint information structure and menu design for a monopolist";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsupportedProbe>(m, "UnsupportedProbe", PyExc_ValueError);
  py::register_exception<RefusedError>(m, "RefusedError", PyExc_ValueError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_RuntimeError);

  py::class_<Dist>(m, "Dist")
      .def_static("power_cdf", &Dist::power_cdf, py::arg("exponent"), py::arg("lo"), py::arg("hi"))
      .def_static("uniform", &Dist::uniform, py::arg("lo"), py::arg("hi"))
      .def_static("discrete", &Dist::discrete, py::arg("atoms"))
      .def_static("point_mass", &Dist::point_mass, py::arg("at"))
      .def_static(
          "piecewise_linear",
          [](const std::vector<std::pair<double, double>>& knots) {
            std::vector<Dist::Knot> k;
            for (const auto& [v, F] : knots) {
              k.push_back({v, F});
            }
            return Dist::piecewise_linear(std::move(k));
          },
          py::arg("knots"))
      .def_property_readonly("family", [](const Dist& d) { return std::string(d.family_name()); })
      .def_property_readonly("lo", &Dist::lo)
      .def_property_readonly("hi", &Dist::hi)
      .def("cdf", &Dist::cdf)
      .def("quantile", &Dist::quantile)
      .def("density", &Dist::density)
      .def("mean", &Dist::mean)
      .def("integrate_quantile", &Dist::integrate_quantile)
      .def("conditional_mean", &Dist::conditional_mean)
      .def("virtual_value", &Dist::virtual_value)
      .def("discretize", [](const Dist& d, std::size_t n) { return d.discretize(n).values; });

  py::enum_<CellMode>(m, "CellMode")
      .value("POOL", CellMode::Pool)
      .value("DISCLOSE", CellMode::Disclose);

  py::class_<QuantilePartition>(m, "QuantilePartition")
      .def(py::init([](std::vector<double> breakpoints, double exclusion) {
             return QuantilePartition::pooled(std::move(breakpoints), exclusion);
           }),
           py::arg("breakpoints"), py::arg("exclusion") = 0.0)
      .def_readwrite("breakpoints", &QuantilePartition::breakpoints)
      .def_readwrite("exclusion", &QuantilePartition::exclusion)
      .def_readwrite("modes", &QuantilePartition::modes)
      .def("cells", &QuantilePartition::cells);

  py::class_<MechanismCell>(m, "MechanismCell")
      .def_readonly("mass", &MechanismCell::mass)
      .def_readonly("value", &MechanismCell::value)
      .def_readonly("quality", &MechanismCell::quality)
      .def_readonly("price", &MechanismCell::price)
      .def_readonly("virtual_value", &MechanismCell::virtual_value)
      .def_readonly("cost", &MechanismCell::cost);

  py::class_<Mechanism>(m, "Mechanism")
      .def_readonly("partition", &Mechanism::partition)
      .def_readonly("cells", &Mechanism::cells)
      .def_readonly("elasticity", &Mechanism::elasticity)
      .def_readonly("revenue", &Mechanism::revenue)
      .def_readonly("profit", &Mechanism::profit)
      .def("positive_items", &Mechanism::positive_items)
      .def("to_json", [](const Mechanism& x) { return to_json(x).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return mechanism_from_json(nlohmann::json::parse(text));
      });

  py::class_<Check>(m, "Check")
      .def_readonly("name", &Check::name)
      .def_readonly("passed", &Check::passed)
      .def_readonly("hard", &Check::hard)
      .def_readonly("detail", &Check::detail);

  py::class_<VerifyReport>(m, "VerifyReport")
      .def_readonly("checks", &VerifyReport::checks)
      .def("hard_pass", &VerifyReport::hard_pass)
      .def("all_pass", &VerifyReport::all_pass);

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("grid", &SolveOptions::grid)
      .def_readwrite("polish", &SolveOptions::polish)
      .def_readwrite("seed", &SolveOptions::seed)
      .def_readwrite("polish_starts", &SolveOptions::polish_starts)
      .def_readwrite("oracle_check", &SolveOptions::oracle_check);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("mechanism", &SolveReport::mechanism)
      .def_readonly("verification", &SolveReport::verification)
      .def_readonly("oracle_gap", &SolveReport::oracle_gap)
      .def_property_readonly("profit", &SolveReport::profit)
      .def("to_json", [](const SolveReport& r) { return to_json(r).dump(); });

  m.def("build_mechanism", &build_mechanism, py::arg("values"), py::arg("qualities"),
        py::arg("partition"));
  m.def(
      "verify",
      [](const Mechanism& mech, const Dist& f, const std::optional<Dist>& q) {
        return verify(mech, f, q ? &*q : nullptr);
      },
      py::arg("mechanism"), py::arg("values"), py::arg("qualities") = std::nullopt);

  m.def("solve_exogenous", &solve_exogenous, py::arg("values"), py::arg("qualities"),
        py::arg("options") = SolveOptions{});
  m.def(
      "solve_endogenous",
      [](const Dist& f, double eta, const SolveOptions& o) {
        return solve_endogenous(f, Elasticity(eta), o);
      },
      py::arg("values"), py::arg("eta"), py::arg("options") = SolveOptions{});

  m.def(
      "oracle_exogenous",
      [](const std::vector<double>& v, const std::vector<double>& q) {
        const auto r = oracle_exo(GridDist{v}, GridDist{q});
        return py::make_tuple(r.best.value, r.best.partition.cuts, r.best.partition.exclusion);
      },
      py::arg("values"), py::arg("qualities"),
      "Best (profit, cuts, exclusion) over all grid partitions.");
  m.def(
      "oracle_endogenous",
      [](const std::vector<double>& v, double eta) {
        const auto r = oracle_endo(GridDist{v}, Elasticity(eta));
        return py::make_tuple(r.best.value, r.best.partition.cuts);
      },
      py::arg("values"), py::arg("eta"));

  m.def(
      "benchmark_profits",
      [](const Dist& f, double eta) {
        const auto b = benchmark_profits(f, Elasticity(eta));
        return py::make_tuple(b.pooling, b.disclosure);
      },
      py::arg("values"), py::arg("eta"), "(pooling, disclosure or None)");
  m.def(
      "upper_threshold",
      [](const Dist& f, const QuantilePartition& structure) {
        return eta_thresholds(structure_cells(f, structure), f).upper;
      },
      py::arg("values"), py::arg("structure"),
      "Elasticity above which the structure earns less than pooling.");
  m.def(
      "pooling_optimal",
      [](const Dist& f, double eta) {
        return check_pooling_condition(f, Elasticity(eta)).pooling_optimal;
      },
      py::arg("values"), py::arg("eta"));
}
