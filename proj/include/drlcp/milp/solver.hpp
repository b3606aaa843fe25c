#pragma once

#include <optional>
#include <vector>

#include "drlcp/milp/model.hpp"

namespace drlcp::milp {

struct LpResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;
  double objective = kInf;
  std::vector<int> basis;  // basic variable indices of the standard form
  long iterations = 0;
};

/// Solves the LP relaxation (integrality dropped) with a two-phase dense
/// tableau primal simplex. Variable bounds may be overridden without
/// mutating the model.
LpResult solve_lp(const MilpModel& model, const SolveOptions& options = {},
                  const std::vector<double>* lower_override = nullptr,
                  const std::vector<double>* upper_override = nullptr);

/// Best-first branch and bound on the most-fractional integer variable,
/// ties broken by lowest variable id. Deterministic for fixed options.
SolveResult solve_milp(const MilpModel& model, const SolveOptions& options = {});

}  // namespace drlcp::milp
