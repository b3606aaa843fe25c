#include "drlcp/milp/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace drlcp::milp {

int MilpModel::num_integer_vars() const {
  int n = 0;
  for (const auto& v : vars)
    if (v.kind == VarKind::Integer) ++n;
  return n;
}

int MilpModel::add_var(std::string name, double lower, double upper, VarKind kind) {
  if (lower > upper) throw ShapeMismatch("add_var: lower > upper for " + name);
  vars.push_back(Variable{std::move(name), lower, upper, kind});
  return static_cast<int>(vars.size()) - 1;
}

void MilpModel::add_row(std::string name, const AffineExpr& expr, Sense sense, double rhs) {
  Row row;
  row.name = std::move(name);
  row.coeffs.assign(expr.terms().begin(), expr.terms().end());
  row.sense = sense;
  row.rhs = rhs - expr.constant_term();
  rows.push_back(std::move(row));
}

void MilpModel::add_row(std::string name, std::vector<std::pair<int, double>> coeffs,
                        Sense sense, double rhs) {
  std::sort(coeffs.begin(), coeffs.end());
  rows.push_back(Row{std::move(name), std::move(coeffs), sense, rhs});
}

void MilpModel::set_objective(const AffineExpr& expr) {
  objective.assign(expr.terms().begin(), expr.terms().end());
  objective_constant = expr.constant_term();
}

void MilpModel::add_objective_term(int var, double coeff) {
  for (auto& [id, c] : objective)
    if (id == var) {
      c += coeff;
      return;
    }
  objective.emplace_back(var, coeff);
  std::sort(objective.begin(), objective.end());
}

void MilpModel::validate() const {
  std::unordered_set<std::string> names;
  for (const auto& v : vars) {
    if (!(v.lower <= v.upper)) throw ShapeMismatch("variable bounds reversed: " + v.name);
    if (std::isnan(v.lower) || std::isnan(v.upper))
      throw ShapeMismatch("variable bound is NaN: " + v.name);
    if (!names.insert(v.name).second) throw ShapeMismatch("duplicate variable name: " + v.name);
  }
  names.clear();
  for (const auto& r : rows) {
    if (!names.insert(r.name).second) throw ShapeMismatch("duplicate row name: " + r.name);
    if (!std::isfinite(r.rhs)) throw ShapeMismatch("row rhs not finite: " + r.name);
    for (const auto& [id, c] : r.coeffs) {
      if (id < 0 || id >= num_vars()) throw ShapeMismatch("row references unknown variable");
      if (!std::isfinite(c)) throw ShapeMismatch("row coefficient not finite: " + r.name);
    }
  }
  for (const auto& [id, c] : objective) {
    if (id < 0 || id >= num_vars()) throw ShapeMismatch("objective references unknown variable");
    if (!std::isfinite(c)) throw ShapeMismatch("objective coefficient not finite");
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::GapLimit: return "gap_limit";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

}  // namespace drlcp::milp
