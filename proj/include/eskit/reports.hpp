#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "eskit/ideals.hpp"
#include "eskit/selmer.hpp"
#include "eskit/stickelberger.hpp"

// JSON reports for the command-line driver and the property-suite runner.
// All numbers are serialized as decimal strings; objects are emitted with
// sorted keys, so equal inputs (and equal seeds) produce byte-identical
// reports.

namespace esk {

using json = nlohmann::json;

std::string dec(u64 v);
std::string rational_string(const mpq_class& r);
// group-ring element as a polynomial in the factor generators t0, t1, ...
std::string elem_string(const GRElem& a);
// canonical generator list of an ideal, e.g. "(0)", "(3)", "(1+t0, 3)"
std::string ideal_string(const IdealHandle& I);
json elem_json(const GRElem& a);  // array of decimal strings per group index

// parsing helpers: accept decimal strings (preferred) or JSON integers
u64 parse_u64(const json& v, const char* what);
GRElem parse_elem(const RingPtr& ring, const json& v, const char* what);
RingPtr parse_ring(const json& input);

// ---- batch commands (see the CLI driver for the exit-code mapping) ---------

// module-presentation input -> Fitting/characteristic/annihilator ideals in
// canonical form with comparison verdicts
json cmd_ideal(const json& input, bool oracle);

// (m, p, n) input -> Stickelberger coefficient table, character evaluations
// cross-checked against the Bernoulli oracle, and the finite-level L-element
json cmd_stickelberger(const json& input, u64 p, unsigned n, bool oracle);

// (chi, pool, conductor) input -> admissibility filter, derived classes,
// leading-coefficient congruence, and derived ideals
json cmd_kolyvagin(const json& input, u64 p, unsigned n);

// synthetic Selmer datum input -> validation, system checks, the four
// divisor/transverse relations, ideal comparisons, and the solver result
json cmd_stark(const json& input);

// ---- property suites ---------------------------------------------------------

struct SuiteCase {
  std::string id;
  bool pass = true;
  std::string witness;  // non-empty on failure
};

struct SuiteResult {
  std::string name;
  std::vector<SuiteCase> cases;  // sorted by case id

  unsigned failed() const;
  json to_json() const;
};

const std::vector<std::string>& suite_names();
// throws usage_error for unknown names
SuiteResult run_suite(const std::string& name, u64 seed, u64 p, unsigned n, u64 pool_max);

}  // namespace esk
