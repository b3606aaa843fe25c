#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drlcp/ambiguity.hpp"
#include "drlcp/inventory.hpp"
#include "drlcp/milp/io.hpp"
#include "drlcp/oracle.hpp"

namespace py = pybind11;
using namespace drlcp;

namespace {

SolverChoice make_choice(double gap, double time_limit_s, const std::string& external) {
  SolverChoice choice;
  choice.options.gap = gap;
  if (time_limit_s > 0) choice.options.time_limit_s = time_limit_s;
  choice.external_command = external;
  return choice;
}

std::vector<double> lift_box(const std::vector<std::vector<double>>& lower,
                             const std::vector<std::vector<double>>& upper, int segments,
                             const std::vector<double>& xi) {
  DisturbanceSpace space;
  space.horizon = static_cast<int>(lower.size());
  space.dims_per_stage = lower.empty() ? 0 : static_cast<int>(lower[0].size());
  space.lower = lower;
  space.upper = upper;
  space.validate();
  LiftingSpec spec = LiftingSpec::equal_division(space, segments);
  return lift(space, spec, xi).z;
}

}  // namespace

PYBIND11_MODULE(_drlcp, m) {
  m.doc() = "distributionally robust lifted-policy control toolkit";

  py::register_exception<Error>(m, "DrlcpError");

  py::class_<InventorySpec>(m, "InventorySpec")
      .def(py::init<>())
      .def_readwrite("horizon", &InventorySpec::horizon)
      .def_readwrite("num_lots", &InventorySpec::num_lots)
      .def_readwrite("holding", &InventorySpec::holding)
      .def_readwrite("booking", &InventorySpec::booking)
      .def_readwrite("lot_price", &InventorySpec::lot_price)
      .def_readwrite("lot_size", &InventorySpec::lot_size)
      .def_readwrite("support_lo", &InventorySpec::support_lo)
      .def_readwrite("support_hi", &InventorySpec::support_hi)
      .def_readwrite("x0", &InventorySpec::x0)
      .def_readwrite("segments", &InventorySpec::segments)
      .def_readwrite("num_samples", &InventorySpec::num_samples)
      .def_readwrite("radius", &InventorySpec::radius)
      .def_readwrite("sigma", &InventorySpec::sigma)
      .def_readwrite("mean", &InventorySpec::mean)
      .def_readwrite("sample_seed", &InventorySpec::sample_seed);

  m.def("lift", &lift_box, py::arg("lower"), py::arg("upper"), py::arg("segments"),
        py::arg("xi"),
        "Lifted representation of a disturbance trajectory over an equally divided box.");

  m.def("estimate_radius", &estimate_radius, py::arg("a"), py::arg("b"),
        "Exact 1-Wasserstein distance between two uniform empirical sample sets.");

  m.def(
      "build_inventory_mps",
      [](const InventorySpec& spec) {
        InventoryProblem prob = build_inventory(spec);
        ReformulationOptions opts;
        opts.policy_bounds = inventory_policy_bounds();
        return milp::to_mps(build_wasserstein(prob.compiled, prob.ambiguity, opts).model);
      },
      py::arg("spec"), "Exact MILP reformulation of the inventory benchmark, as MPS text.");

  m.def(
      "open_loop",
      [](const InventorySpec& spec, double gap, double time_limit_s,
         const std::string& external_command) {
        OpenLoopResult r =
            run_open_loop(spec, make_choice(gap, time_limit_s, external_command));
        py::dict out;
        out["horizon"] = r.horizon;
        out["segments"] = r.segments;
        out["objective"] = r.objective;
        out["bound"] = r.bound;
        out["gap"] = r.gap;
        out["time_s"] = r.time_s;
        out["status"] = r.status;
        out["certified"] = r.certified;
        out["policy"] = r.policy;
        return out;
      },
      py::arg("spec"), py::arg("gap") = 0.001, py::arg("time_limit_s") = 0.0,
      py::arg("external_command") = "",
      "Build, solve and oracle-certify one inventory instance.");

  m.def(
      "closed_loop",
      [](const InventorySpec& spec, int sims, std::uint64_t eval_seed, double gap,
         double time_limit_s, const std::string& external_command) {
        ClosedLoopSummary s = run_closed_loop(
            spec, sims, make_choice(gap, time_limit_s, external_command), eval_seed);
        py::dict out;
        out["mean_cost"] = s.mean_cost;
        out["stddev_cost"] = s.stddev_cost;
        out["milp_solves"] = s.milp_solves;
        std::vector<double> costs;
        for (const auto& sim : s.sims) costs.push_back(sim.total_cost);
        out["costs"] = costs;
        return out;
      },
      py::arg("spec"), py::arg("sims"), py::arg("eval_seed"), py::arg("gap") = 0.001,
      py::arg("time_limit_s") = 0.0, py::arg("external_command") = "",
      "Shrinking-horizon closed-loop evaluation of the inventory benchmark.");
}
