#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "drlcp/milp/solver.hpp"

namespace drlcp::milp {

namespace {

// Standard form min c'y, Ay = b, y >= 0 produced from a MilpModel with
// bound substitutions. colmap records how structural columns map back to
// model variables.
struct StdForm {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double c0 = 0.0;
  struct ColRef {
    int var;
    double scale;
  };
  std::vector<ColRef> colmap;        // one entry per structural column
  std::vector<double> base;          // per model variable
  std::vector<char> slack_basis_ok;  // per row: slack column usable as basis
  std::vector<int> slack_col;        // per row: slack column id or -1
  bool bound_infeasible = false;
};

StdForm build_standard_form(const MilpModel& model, const std::vector<double>& lo,
                            const std::vector<double>& hi) {
  const int n = model.num_vars();
  StdForm sf;
  sf.base.assign(static_cast<std::size_t>(n), 0.0);

  // Column layout per variable; -1 marks "no column" (fixed variable).
  std::vector<int> col_of(static_cast<std::size_t>(n), -1);
  std::vector<int> col2_of(static_cast<std::size_t>(n), -1);  // second column of a split
  std::vector<double> scale_of(static_cast<std::size_t>(n), 1.0);
  int ncols = 0;
  int n_upper_rows = 0;
  for (int j = 0; j < n; ++j) {
    double l = lo[static_cast<std::size_t>(j)], u = hi[static_cast<std::size_t>(j)];
    if (l > u) {
      sf.bound_infeasible = true;
      return sf;
    }
    if (l == u) {
      sf.base[static_cast<std::size_t>(j)] = l;
      continue;
    }
    if (std::isfinite(l)) {
      sf.base[static_cast<std::size_t>(j)] = l;
      col_of[static_cast<std::size_t>(j)] = ncols++;
      scale_of[static_cast<std::size_t>(j)] = 1.0;
      if (std::isfinite(u)) ++n_upper_rows;
    } else if (std::isfinite(u)) {
      sf.base[static_cast<std::size_t>(j)] = u;
      col_of[static_cast<std::size_t>(j)] = ncols++;
      scale_of[static_cast<std::size_t>(j)] = -1.0;
    } else {
      col_of[static_cast<std::size_t>(j)] = ncols++;
      col2_of[static_cast<std::size_t>(j)] = ncols++;
    }
  }

  const int m_rows = model.num_rows();
  const int m = m_rows + n_upper_rows;
  // slack per model row (<= or >=) and per upper-bound row
  int n_slacks = n_upper_rows;
  for (const auto& r : model.rows)
    if (r.sense != Sense::Equal) ++n_slacks;

  sf.A = Eigen::MatrixXd::Zero(m, ncols + n_slacks);
  sf.b = Eigen::VectorXd::Zero(m);
  sf.c = Eigen::VectorXd::Zero(ncols + n_slacks);
  sf.colmap.resize(static_cast<std::size_t>(ncols), StdForm::ColRef{-1, 0.0});
  sf.slack_basis_ok.assign(static_cast<std::size_t>(m), 0);
  sf.slack_col.assign(static_cast<std::size_t>(m), -1);
  for (int j = 0; j < n; ++j) {
    if (col_of[static_cast<std::size_t>(j)] >= 0)
      sf.colmap[static_cast<std::size_t>(col_of[static_cast<std::size_t>(j)])] =
          StdForm::ColRef{j, scale_of[static_cast<std::size_t>(j)]};
    if (col2_of[static_cast<std::size_t>(j)] >= 0)
      sf.colmap[static_cast<std::size_t>(col2_of[static_cast<std::size_t>(j)])] =
          StdForm::ColRef{j, -1.0};
  }

  int slack = ncols;
  int row = 0;
  for (const auto& r : model.rows) {
    double rhs = r.rhs;
    for (const auto& [var, coef] : r.coeffs) {
      rhs -= coef * sf.base[static_cast<std::size_t>(var)];
      int cj = col_of[static_cast<std::size_t>(var)];
      if (cj >= 0) sf.A(row, cj) += coef * scale_of[static_cast<std::size_t>(var)];
      int cj2 = col2_of[static_cast<std::size_t>(var)];
      if (cj2 >= 0) sf.A(row, cj2) -= coef;
    }
    double slack_sign = 0.0;
    if (r.sense == Sense::LessEqual) slack_sign = 1.0;
    if (r.sense == Sense::GreaterEqual) slack_sign = -1.0;
    int this_slack = -1;
    if (slack_sign != 0.0) {
      this_slack = slack++;
      sf.A(row, this_slack) = slack_sign;
    }
    if (rhs < 0) {
      sf.A.row(row) *= -1.0;
      rhs = -rhs;
    }
    sf.b(row) = rhs;
    sf.slack_col[static_cast<std::size_t>(row)] = this_slack;
    sf.slack_basis_ok[static_cast<std::size_t>(row)] =
        this_slack >= 0 && sf.A(row, this_slack) > 0.5;
    ++row;
  }
  // upper-bound rows: y_j + s = u - l
  for (int j = 0; j < n; ++j) {
    double l = lo[static_cast<std::size_t>(j)], u = hi[static_cast<std::size_t>(j)];
    if (l == u || !std::isfinite(l) || !std::isfinite(u)) continue;
    int cj = col_of[static_cast<std::size_t>(j)];
    int this_slack = slack++;
    sf.A(row, cj) = 1.0;
    sf.A(row, this_slack) = 1.0;
    sf.b(row) = u - l;
    sf.slack_col[static_cast<std::size_t>(row)] = this_slack;
    sf.slack_basis_ok[static_cast<std::size_t>(row)] = 1;
    ++row;
  }

  sf.c0 = model.objective_constant;
  for (const auto& [var, coef] : model.objective) {
    sf.c0 += coef * sf.base[static_cast<std::size_t>(var)];
    int cj = col_of[static_cast<std::size_t>(var)];
    if (cj >= 0) sf.c(cj) += coef * scale_of[static_cast<std::size_t>(var)];
    int cj2 = col2_of[static_cast<std::size_t>(var)];
    if (cj2 >= 0) sf.c(cj2) -= coef;
  }
  return sf;
}

enum class PivotOutcome { Optimal, Unbounded, IterationLimit };

// Primal simplex iterations on an explicit tableau. tab is m x (ncols+1)
// with b in the last column; obj is the reduced-cost row with the negated
// objective value in its last entry. n_enter limits the entering columns
// (artificials are excluded in phase 2 by passing a smaller count).
PivotOutcome run_simplex(Eigen::MatrixXd& tab, Eigen::RowVectorXd& obj,
                         std::vector<int>& basis, int n_enter, double rc_tol,
                         long iteration_limit, long& iterations) {
  const int m = static_cast<int>(tab.rows());
  const long bland_after = 2000 + 10L * (m + n_enter);
  // Devex reference weights: entering column maximizes rc^2 / weight.
  Eigen::VectorXd weight = Eigen::VectorXd::Ones(n_enter);
  long iter = 0;
  while (true) {
    if (iter >= iteration_limit) return PivotOutcome::IterationLimit;
    bool bland = iter > bland_after;
    // Long stalls come from degenerate pivoting on noise-level reduced
    // costs; relaxing the entering tolerance bounds the optimality error by
    // the tolerance times the (bounded) step sizes.
    double tol = rc_tol;
    if (iter > 2 * bland_after) tol = std::max(tol, 1e-8);
    if (iter > 4 * bland_after) tol = std::max(tol, 1e-7);
    if (iter > 8 * bland_after) tol = std::max(tol, 1e-6);
    int enter = -1;
    if (bland) {
      for (int j = 0; j < n_enter; ++j)
        if (obj(j) < -tol) {
          enter = j;
          break;
        }
    } else {
      double best = 0.0;
      for (int j = 0; j < n_enter; ++j) {
        double rc = obj(j);
        if (rc >= -tol) continue;
        double score = rc * rc / weight(j);
        if (score > best) {
          enter = j;
          best = score;
        }
      }
    }
    if (enter < 0) {
      iterations += iter;
      return PivotOutcome::Optimal;
    }
    // Two-pass ratio test: find the minimal ratio, then pick the row with
    // the largest pivot element among near-minimal ratios (tiny pivots blow
    // up the tableau). Bland mode tie-breaks by basis index instead.
    const int bcol = static_cast<int>(tab.cols()) - 1;
    double piv_tol = 1e-7;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 2 && !std::isfinite(best_ratio); ++pass) {
      for (int i = 0; i < m; ++i) {
        double a = tab(i, enter);
        if (a > piv_tol) best_ratio = std::min(best_ratio, tab(i, bcol) / a);
      }
      if (!std::isfinite(best_ratio)) piv_tol = 1e-10;
    }
    if (!std::isfinite(best_ratio)) {
      iterations += iter;
      return PivotOutcome::Unbounded;
    }
    const double ratio_cut = best_ratio + 1e-9 + 1e-9 * std::abs(best_ratio);
    int leave = -1;
    double best_piv = 0.0;
    for (int i = 0; i < m; ++i) {
      double a = tab(i, enter);
      if (a <= piv_tol || tab(i, bcol) / a > ratio_cut) continue;
      if (bland) {
        if (leave < 0 || basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])
          leave = i;
      } else if (a > best_piv) {
        best_piv = a;
        leave = i;
      }
    }
    double piv = tab(leave, enter);
    tab.row(leave) /= piv;
    Eigen::VectorXd col = tab.col(enter);
    col(leave) = 0.0;
    tab.noalias() -= col * tab.row(leave);
    double oc = obj(enter);
    if (oc != 0.0) obj.noalias() -= oc * tab.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
    // Reference-framework weight update off the normalized pivot row; the
    // leaving column is covered by the same formula (its entry is 1/piv).
    const double wq = weight(enter);
    double wmax = 1.0;
    for (int j = 0; j < n_enter; ++j) {
      double a = tab(leave, j);
      if (a != 0.0) weight(j) = std::max(weight(j), a * a * wq);
      wmax = std::max(wmax, weight(j));
    }
    if (wmax > 1e10) weight.setOnes();
    ++iter;
  }
}

}  // namespace

LpResult solve_lp(const MilpModel& model, const SolveOptions& options,
                  const std::vector<double>* lower_override,
                  const std::vector<double>* upper_override) {
  const int n = model.num_vars();
  std::vector<double> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    lo[static_cast<std::size_t>(j)] =
        lower_override ? (*lower_override)[static_cast<std::size_t>(j)] : model.vars[static_cast<std::size_t>(j)].lower;
    hi[static_cast<std::size_t>(j)] =
        upper_override ? (*upper_override)[static_cast<std::size_t>(j)] : model.vars[static_cast<std::size_t>(j)].upper;
  }
  StdForm sf = build_standard_form(model, lo, hi);
  LpResult res;
  if (sf.bound_infeasible) {
    res.status = SolveStatus::Infeasible;
    return res;
  }
  const int m = static_cast<int>(sf.A.rows());
  const int ncols = static_cast<int>(sf.A.cols());

  // Phase 1 tableau with one artificial per row lacking a usable slack.
  std::vector<int> art_col(static_cast<std::size_t>(m), -1);
  int n_art = 0;
  for (int i = 0; i < m; ++i)
    if (!sf.slack_basis_ok[static_cast<std::size_t>(i)]) art_col[static_cast<std::size_t>(i)] = ncols + n_art++;

  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m, ncols + n_art + 1);
  tab.block(0, 0, m, ncols) = sf.A;
  tab.col(ncols + n_art) = sf.b;
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    if (art_col[static_cast<std::size_t>(i)] >= 0) {
      tab(i, art_col[static_cast<std::size_t>(i)]) = 1.0;
      basis[static_cast<std::size_t>(i)] = art_col[static_cast<std::size_t>(i)];
    } else {
      basis[static_cast<std::size_t>(i)] = sf.slack_col[static_cast<std::size_t>(i)];
    }
  }

  long iterations = 0;
  if (n_art > 0) {
    // Phase-1 reduced costs: cost 1 on artificials, basis currently holds them.
    Eigen::RowVectorXd obj1 = Eigen::RowVectorXd::Zero(ncols + n_art + 1);
    for (int i = 0; i < m; ++i)
      if (art_col[static_cast<std::size_t>(i)] >= 0) obj1 -= tab.row(i);
    for (int i = 0; i < m; ++i)
      if (art_col[static_cast<std::size_t>(i)] >= 0) obj1(art_col[static_cast<std::size_t>(i)]) = 0.0;
    auto out = run_simplex(tab, obj1, basis, ncols + n_art, options.reduced_cost_tol,
                           options.simplex_iteration_limit, iterations);
    if (out == PivotOutcome::IterationLimit)
      throw NumericalFailure("simplex phase 1 iteration limit reached");
    double infeas = -obj1(ncols + n_art);
    if (infeas > options.feasibility_tol) {
      res.status = SolveStatus::Infeasible;
      res.iterations = iterations;
      return res;
    }
    // Drive remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] < ncols) continue;
      int enter = -1;
      for (int j = 0; j < ncols; ++j)
        if (std::abs(tab(i, j)) > 1e-9) {
          enter = j;
          break;
        }
      if (enter < 0) continue;  // redundant row; artificial stays basic at zero
      double piv = tab(i, enter);
      tab.row(i) /= piv;
      Eigen::VectorXd col = tab.col(enter);
      col(i) = 0.0;
      tab.noalias() -= col * tab.row(i);
      basis[static_cast<std::size_t>(i)] = enter;
    }
  }

  // Phase 2: rebuild reduced costs for the true objective.
  Eigen::RowVectorXd obj = Eigen::RowVectorXd::Zero(ncols + n_art + 1);
  obj.head(ncols) = sf.c.transpose();
  for (int i = 0; i < m; ++i) {
    int bv = basis[static_cast<std::size_t>(i)];
    if (bv < ncols && sf.c(bv) != 0.0) obj.noalias() -= sf.c(bv) * tab.row(i);
  }
  auto out = run_simplex(tab, obj, basis, ncols, options.reduced_cost_tol,
                         options.simplex_iteration_limit, iterations);
  if (out == PivotOutcome::IterationLimit)
    throw NumericalFailure("simplex phase 2 iteration limit reached");
  if (out == PivotOutcome::Unbounded) {
    res.status = SolveStatus::Unbounded;
    res.objective = -kInf;
    res.iterations = iterations;
    return res;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(ncols + n_art);
  for (int i = 0; i < m; ++i) y(basis[static_cast<std::size_t>(i)]) = tab(i, ncols + n_art);
  res.x.assign(sf.base.begin(), sf.base.end());
  for (int j = 0; j < static_cast<int>(sf.colmap.size()); ++j)
    res.x[static_cast<std::size_t>(sf.colmap[static_cast<std::size_t>(j)].var)] +=
        sf.colmap[static_cast<std::size_t>(j)].scale * y(j);
  res.objective = sf.c.dot(y.head(ncols)) + sf.c0;
  res.basis = basis;
  res.status = SolveStatus::Optimal;
  res.iterations = iterations;
  return res;
}

SolveResult solve_milp(const MilpModel& model, const SolveOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };
  const int n = model.num_vars();
  std::vector<int> int_vars;
  for (int j = 0; j < n; ++j)
    if (model.vars[static_cast<std::size_t>(j)].kind == VarKind::Integer) {
      if (!std::isfinite(model.vars[static_cast<std::size_t>(j)].lower) ||
          !std::isfinite(model.vars[static_cast<std::size_t>(j)].upper))
        throw ShapeMismatch("solve_milp: integer variable without finite bounds: " +
                            model.vars[static_cast<std::size_t>(j)].name);
      int_vars.push_back(j);
    }

  struct Node {
    double bound;
    long id;
    std::vector<double> lo, hi;  // overrides for integer variables only
    bool operator>(const Node& other) const {
      if (bound != other.bound) return bound > other.bound;
      return id > other.id;
    }
  };

  SolveResult res;
  res.bound = -kInf;
  std::vector<double> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    lo[static_cast<std::size_t>(j)] = model.vars[static_cast<std::size_t>(j)].lower;
    hi[static_cast<std::size_t>(j)] = model.vars[static_cast<std::size_t>(j)].upper;
  }
  auto int_bounds = [&](const std::vector<double>& full) {
    std::vector<double> v(int_vars.size());
    for (std::size_t k = 0; k < int_vars.size(); ++k)
      v[k] = full[static_cast<std::size_t>(int_vars[k])];
    return v;
  };

  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
  std::vector<Node> dive;  // depth-first path, searched until the first incumbent
  long next_id = 0;
  open.push(Node{-kInf, next_id++, int_bounds(lo), int_bounds(hi)});

  double incumbent = kInf;
  std::vector<double> incumbent_x;
  bool root_unbounded = false;
  long nodes = 0;

  auto rel_gap = [&](double bound) {
    if (!std::isfinite(incumbent)) return kInf;
    return (incumbent - bound) / std::max(1.0, std::abs(incumbent));
  };

  SolveStatus stop_status = SolveStatus::Optimal;
  bool stopped = false;
  while (!open.empty() || !dive.empty()) {
    Node node;
    if (!dive.empty() && !std::isfinite(incumbent)) {
      node = std::move(dive.back());
      dive.pop_back();
    } else {
      for (auto& d : dive) open.push(std::move(d));
      dive.clear();
      node = open.top();
      open.pop();
    }
    // Bounds only grow down a path, so the minimum over everything still
    // open (dive front included) is the global bound and is monotone.
    double global = node.bound;
    if (!open.empty()) global = std::min(global, open.top().bound);
    if (!dive.empty()) global = std::min(global, dive.front().bound);
    if (std::isfinite(global)) res.bound = global;
    if (std::isfinite(incumbent) && rel_gap(std::isfinite(global) ? global : -kInf) <= options.gap) {
      stop_status = SolveStatus::Optimal;
      res.bound = std::isfinite(global) ? global : incumbent;
      break;
    }
    if (nodes >= options.node_limit) {
      stop_status = SolveStatus::NodeLimit;
      stopped = true;
      break;
    }
    if (elapsed() > options.time_limit_s) {
      stop_status = SolveStatus::TimeLimit;
      stopped = true;
      break;
    }

    std::vector<double> nlo = lo, nhi = hi;
    for (std::size_t k = 0; k < int_vars.size(); ++k) {
      nlo[static_cast<std::size_t>(int_vars[k])] = node.lo[k];
      nhi[static_cast<std::size_t>(int_vars[k])] = node.hi[k];
    }
    ++nodes;
    LpResult lp = solve_lp(model, options, &nlo, &nhi);
    if (lp.status == SolveStatus::Infeasible) continue;
    if (lp.status == SolveStatus::Unbounded) {
      if (node.id == 0) root_unbounded = true;
      break;
    }
    if (options.on_node) {
      double global_bound = std::isfinite(res.bound) ? res.bound : lp.objective;
      options.on_node(nodes, std::min(global_bound, incumbent), incumbent);
    }
    if (lp.objective >= incumbent - 1e-12) continue;

    // Most-fractional branching, ties by lowest variable id.
    int branch = -1;
    double worst = options.integrality_tol;
    for (int j : int_vars) {
      double v = lp.x[static_cast<std::size_t>(j)];
      double frac = std::abs(v - std::round(v));
      if (frac > worst + 1e-15) {
        worst = frac;
        branch = j;
      }
    }
    if (branch < 0) {
      // Integral: new incumbent.
      incumbent = lp.objective;
      incumbent_x = lp.x;
      for (int j : int_vars)
        incumbent_x[static_cast<std::size_t>(j)] = std::round(incumbent_x[static_cast<std::size_t>(j)]);
      continue;
    }
    double v = lp.x[static_cast<std::size_t>(branch)];
    std::size_t bk = 0;
    while (int_vars[bk] != branch) ++bk;
    Node down{lp.objective, next_id++, node.lo, node.hi};
    down.hi[bk] = std::floor(v);
    Node up{lp.objective, next_id++, node.lo, node.hi};
    up.lo[bk] = std::floor(v) + 1.0;
    const bool down_ok = down.lo[bk] <= down.hi[bk];
    const bool up_ok = up.lo[bk] <= up.hi[bk];
    if (!std::isfinite(incumbent)) {
      // No incumbent yet: dive toward the nearer integer, park the sibling.
      const bool prefer_down = v - std::floor(v) <= 0.5;
      if (down_ok && !prefer_down) open.push(std::move(down));
      if (up_ok && prefer_down) open.push(std::move(up));
      if (down_ok && prefer_down) dive.push_back(std::move(down));
      if (up_ok && !prefer_down) dive.push_back(std::move(up));
    } else {
      if (down_ok) open.push(std::move(down));
      if (up_ok) open.push(std::move(up));
    }
  }

  res.nodes = nodes;
  res.wall_time_s = elapsed();
  if (root_unbounded) {
    res.status = SolveStatus::Unbounded;
    res.bound = -kInf;
    return res;
  }
  if (!std::isfinite(incumbent)) {
    res.status = stopped ? stop_status : SolveStatus::Infeasible;
    return res;
  }
  res.x = std::move(incumbent_x);
  res.objective = incumbent;
  if (!stopped && open.empty() && dive.empty())
    res.bound = incumbent;  // tree exhausted: proven optimal
  res.status = stopped ? stop_status : SolveStatus::Optimal;
  res.gap = rel_gap(res.bound);
  if (res.status == SolveStatus::Optimal && res.gap < 0) res.gap = 0.0;
  return res;
}

}  // namespace drlcp::milp
