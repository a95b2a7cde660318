#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eskit/reports.hpp"

// Thin python facade over the batch commands and the suite runner.  All
// payloads are JSON strings with numbers serialized as decimal strings, the
// same contract as the command-line driver.

namespace py = pybind11;
using esk::json;
using esk::u64;

PYBIND11_MODULE(_eskit, m) {
  m.doc() = "exact Iwasawa-module and Euler-system toolkit";

  py::register_exception<esk::usage_error>(m, "UsageError");
  py::register_exception<esk::math_error>(m, "MathError");

  m.def(
      "ideal",
      [](const std::string& input, bool oracle) {
        return esk::cmd_ideal(json::parse(input), oracle).dump(2);
      },
      py::arg("input"), py::arg("oracle") = false,
      "Fitting/characteristic/annihilator ideals of a presented module");

  m.def(
      "stickelberger",
      [](const std::string& input, u64 p, unsigned n, bool oracle) {
        return esk::cmd_stickelberger(json::parse(input), p, n, oracle).dump(2);
      },
      py::arg("input"), py::arg("p") = 3, py::arg("n") = 1, py::arg("oracle") = false,
      "Stickelberger coefficients, character evaluations, and L-elements");

  m.def(
      "kolyvagin",
      [](const std::string& input, u64 p, unsigned n) {
        return esk::cmd_kolyvagin(json::parse(input), p, n).dump(2);
      },
      py::arg("input"), py::arg("p") = 3, py::arg("n") = 1,
      "admissibility, derived classes, and derived ideals");

  m.def(
      "stark",
      [](const std::string& input) { return esk::cmd_stark(json::parse(input)).dump(2); },
      py::arg("input"), "synthetic Selmer data and formal Stark systems");

  m.def(
      "suite",
      [](const std::string& name, u64 seed, u64 pool_max) {
        return esk::run_suite(name, seed, 3, 1, pool_max).to_json().dump(2);
      },
      py::arg("name"), py::arg("seed") = 1, py::arg("pool_max") = 4,
      "run one property suite and return its report");

  m.def("suite_names", [] { return esk::suite_names(); }, "available property suites");
}
