#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "drlcp/affine.hpp"
#include "drlcp/errors.hpp"

namespace drlcp::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Integer };

struct Variable {
  std::string name;
  double lower = -kInf;
  double upper = kInf;
  VarKind kind = VarKind::Continuous;
};

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Row {
  std::string name;
  std::vector<std::pair<int, double>> coeffs;  // sorted by variable id
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

/// Minimization MILP with dense 0..n-1 variable ids and sparse rows.
struct MilpModel {
  std::string name = "model";
  std::vector<Variable> vars;
  std::vector<Row> rows;
  std::vector<std::pair<int, double>> objective;
  double objective_constant = 0.0;

  int num_vars() const { return static_cast<int>(vars.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  int num_integer_vars() const;

  int add_var(std::string name, double lower, double upper,
              VarKind kind = VarKind::Continuous);
  /// Adds the row `expr sense rhs_shift`, moving the expression's constant
  /// to the right-hand side.
  void add_row(std::string name, const AffineExpr& expr, Sense sense, double rhs = 0.0);
  void add_row(std::string name, std::vector<std::pair<int, double>> coeffs, Sense sense,
               double rhs);
  void set_objective(const AffineExpr& expr);
  void add_objective_term(int var, double coeff);

  void fix_var(int var, double value) {
    vars[static_cast<std::size_t>(var)].lower = value;
    vars[static_cast<std::size_t>(var)].upper = value;
  }

  /// Checks name uniqueness, finite coefficients, and bound ordering.
  void validate() const;
};

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  GapLimit,
  NodeLimit,
  TimeLimit,
};

std::string to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;      // incumbent values (empty if none)
  double objective = kInf;    // incumbent objective
  double bound = -kInf;       // global lower bound (minimization)
  double gap = kInf;          // relative gap
  long nodes = 0;
  double wall_time_s = 0.0;
  bool has_solution() const { return !x.empty(); }
};

struct SolveOptions {
  double gap = 0.001;               // relative MILP gap
  long node_limit = 1000000;
  double time_limit_s = kInf;
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-7;
  double reduced_cost_tol = 1e-9;
  long simplex_iteration_limit = 200000;
  /// Observer invoked once per explored node with (node count, global lower
  /// bound, incumbent objective).
  std::function<void(long, double, double)> on_node;
};

}  // namespace drlcp::milp
