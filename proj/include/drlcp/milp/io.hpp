#pragma once

#include <string>

#include "drlcp/milp/model.hpp"

namespace drlcp::milp {

/// Free-format MPS with NAME, ROWS, COLUMNS (INTORG/INTEND markers), RHS,
/// BOUNDS and ENDATA sections, rows and columns in id order. The output is
/// byte-identical for identical models.
void write_mps(const MilpModel& model, const std::string& path);
std::string to_mps(const MilpModel& model);

/// CPLEX-style LP format with the same ordering.
void write_lp(const MilpModel& model, const std::string& path);
std::string to_lp(const MilpModel& model);

/// Adapter for an external MILP solver: writes the model as MPS, runs
/// `command <model.mps> <solution.out>` and parses the solution file, which
/// holds one `name value` line per variable plus the pseudo-entries
/// `__status__ <optimal|infeasible|unbounded|...>` and optional
/// `__objective__ <value>`. The objective is recomputed from the model.
SolveResult solve_with_external(const MilpModel& model, const std::string& command,
                                const std::string& work_dir = "");

}  // namespace drlcp::milp
