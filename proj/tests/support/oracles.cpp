#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace testsupport {

namespace {

double uni(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uni_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Eigen::MatrixXd rand_mat(std::mt19937_64& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = uni(rng, -1.0, 1.0);
  return m;
}

}  // namespace

PolicyBounds shared_bounds() {
  PolicyBounds b;
  b.y_abs = 3.0;
  b.z_lower = -3.0;
  b.z_upper = 3.0;
  b.z0_lower = -3.0;
  b.z0_upper = 3.0;
  return b;
}

std::vector<double> random_support_point(std::mt19937_64& rng, const DisturbanceSpace& space) {
  std::vector<double> xi;
  for (int t = 0; t < space.horizon; ++t)
    for (int i = 0; i < space.dims_per_stage; ++i)
      xi.push_back(uni(rng, space.lower[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)],
                       space.upper[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]));
  return xi;
}

RandomInstance random_instance(std::mt19937_64& rng, const InstanceOptions& options) {
  RandomInstance inst;
  SystemModel& m = inst.model;
  m.horizon = uni_int(rng, 1, options.max_horizon);
  const int n = uni_int(rng, 1, options.max_dims);
  m.n_x = uni_int(rng, 1, 2);
  m.n_u = uni_int(rng, 1, 2);
  m.n_gamma = uni_int(rng, 1, 2);
  m.space.horizon = m.horizon;
  m.space.dims_per_stage = n;
  for (int t = 0; t < m.horizon; ++t) {
    std::vector<double> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      lo[static_cast<std::size_t>(i)] = uni(rng, -1.0, 0.0);
      hi[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + uni(rng, 0.5, 2.0);
    }
    m.space.lower.push_back(lo);
    m.space.upper.push_back(hi);
  }

  const int nc = options.with_constraints ? m.horizon * m.n_u : 0;
  m.q = Eigen::VectorXd::Zero(nc);
  for (int t = 0; t < m.horizon; ++t) {
    m.A.push_back(rand_mat(rng, m.n_x, m.n_x));
    m.B.push_back(rand_mat(rng, m.n_x, m.n_u));
    m.C.push_back(rand_mat(rng, m.n_x, m.n_gamma));
    m.D.push_back(rand_mat(rng, m.n_x, n));
    Eigen::MatrixXd bc = Eigen::MatrixXd::Zero(nc, m.n_u);
    if (options.with_constraints) {
      // generous per-stage control caps: structurally present, never binding
      // under the shared policy box
      for (int ch = 0; ch < m.n_u; ++ch) {
        bc(t * m.n_u + ch, ch) = 1.0;
        m.q(t * m.n_u + ch) = 50.0;
      }
    }
    m.Ac.push_back(Eigen::MatrixXd::Zero(nc, m.n_x));
    m.Bc.push_back(std::move(bc));
    m.Cc.push_back(Eigen::MatrixXd::Zero(nc, m.n_gamma));
    m.Dc.push_back(Eigen::MatrixXd::Zero(nc, n));
    m.discount.push_back(uni(rng, 0.5, 1.0));
    std::vector<StageCostPiece> pieces;
    const int np = uni_int(rng, 1, options.max_pieces_per_stage);
    for (int p = 0; p < np; ++p) {
      StageCostPiece pc;
      pc.a = rand_mat(rng, m.n_x, 1);
      pc.b = rand_mat(rng, m.n_u, 1);
      pc.c = rand_mat(rng, m.n_gamma, 1);
      pieces.push_back(std::move(pc));
    }
    m.cost_pieces.push_back(std::move(pieces));
  }
  m.x0 = rand_mat(rng, m.n_x, 1);

  // breakpoints: jittered equal division keeps segments well separated
  inst.lifting.grid.resize(static_cast<std::size_t>(m.horizon));
  for (int t = 0; t < m.horizon; ++t) {
    inst.lifting.grid[static_cast<std::size_t>(t)].resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double lo = m.space.lower[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      const double hi = m.space.upper[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      const int p = options.force_single_segment ? 1 : uni_int(rng, 1, options.max_segments);
      std::vector<double> g(static_cast<std::size_t>(p + 1));
      for (int j = 0; j <= p; ++j) g[static_cast<std::size_t>(j)] = lo + (hi - lo) * j / p;
      g.front() = lo;
      g.back() = hi;
      const double seg = (hi - lo) / p;
      for (int j = 1; j < p; ++j) g[static_cast<std::size_t>(j)] += uni(rng, -0.2, 0.2) * seg;
      inst.lifting.grid[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = g;
    }
  }

  inst.mask = InformationMask::full(m);
  inst.compiled = compile(m, inst.lifting, inst.mask);

  inst.set.radius = uni(rng, 0.0, 0.5);
  const int N = uni_int(rng, 1, options.max_samples);
  for (int s = 0; s < N; ++s) inst.set.samples.push_back(random_support_point(rng, m.space));

  for (int v = 0; v < inst.compiled.layout.num_vars; ++v)
    inst.policy.push_back(inst.compiled.layout.is_integer[static_cast<std::size_t>(v)]
                              ? static_cast<double>(uni_int(rng, -2, 2))
                              : uni(rng, -2.0, 2.0));
  return inst;
}

BuiltModel build_affine_rule_reference(const CompiledProblem& cp, const WassersteinSet& set,
                                       const PolicyBounds& bounds) {
  if (!cp.spec.degenerates_to_affine())
    throw ShapeMismatch("affine reference: needs a single segment per dimension");
  const int T = cp.model.horizon;
  const int n = cp.model.space.dims_per_stage;
  const int dim = T * n;

  BuiltModel out;
  out.model.name = "affine_reference";
  out.info.policy_offset = declare_policy_vars(out.model, cp.layout, bounds);
  out.info.num_policy_vars = cp.layout.num_vars;
  out.info.lambda_var = out.model.add_var("lam", 0.0, milp::kInf);

  for (int s = 0; s < set.count(); ++s) {
    const auto& anchor = set.samples[static_cast<std::size_t>(s)];
    const int eta = out.model.add_var("eta_" + std::to_string(s), -milp::kInf, milp::kInf);
    out.info.eta_vars.push_back(eta);
    for (std::size_t k = 0; k < cp.cost.d.size(); ++k) {
      AffineExpr sum = AffineExpr::variable(eta) - cp.cost.r[k];
      for (int c = 0; c < dim; ++c) {
        const int nu = out.model.add_var(
            "nu_" + std::to_string(s) + "_" + std::to_string(k) + "_" + std::to_string(c),
            -milp::kInf, milp::kInf);
        sum -= AffineExpr::variable(nu);
        const int t = c / n, i = c % n;
        const double lo = cp.model.space.lower[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
        const double hi = cp.model.space.upper[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
        const double a = anchor[static_cast<std::size_t>(c)];
        for (double cand : {lo, hi, a}) {
          AffineExpr row = AffineExpr::variable(nu);
          row -= cp.cost.d[k][static_cast<std::size_t>(c)] * cand;
          row += AffineExpr::variable(out.info.lambda_var, std::abs(cand - a));
          out.model.add_row("cand_" + std::to_string(s) + "_" + std::to_string(k) + "_" +
                                std::to_string(c) + "_" + std::to_string(out.model.num_rows()),
                            row, milp::Sense::GreaterEqual);
        }
      }
      out.model.add_row("piece_" + std::to_string(s) + "_" + std::to_string(k), sum,
                        milp::Sense::GreaterEqual);
    }
  }
  AffineExpr obj = AffineExpr::variable(out.info.lambda_var, set.radius);
  for (int eta : out.info.eta_vars) obj += AffineExpr::variable(eta, 1.0 / set.count());
  out.model.set_objective(obj);
  return out;
}

BuiltModel build_sample_average(const CompiledProblem& cp,
                                const std::vector<std::vector<double>>& samples,
                                const PolicyBounds& bounds) {
  BuiltModel out;
  out.model.name = "sample_average";
  out.info.policy_offset = declare_policy_vars(out.model, cp.layout, bounds);
  out.info.num_policy_vars = cp.layout.num_vars;

  AffineExpr obj;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const int tau = out.model.add_var("tau_" + std::to_string(s), -milp::kInf, milp::kInf);
    obj += AffineExpr::variable(tau, 1.0 / static_cast<double>(samples.size()));
    const LiftedPoint z = lift(cp.model.space, cp.spec, samples[s]);
    for (std::size_t k = 0; k < cp.cost.d.size(); ++k) {
      AffineExpr row = AffineExpr::variable(tau) - cp.cost.r[k];
      for (std::size_t c = 0; c < z.z.size(); ++c)
        if (z.z[c] != 0.0) row -= cp.cost.d[k][c] * z.z[c];
      out.model.add_row("saa_" + std::to_string(s) + "_" + std::to_string(k), row,
                        milp::Sense::GreaterEqual);
    }
  }
  out.model.set_objective(obj);
  return out;
}

double sorted_pairing_distance(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size())
    throw ShapeMismatch("sorted pairing: needs equal-size sample sets");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

milp::SolveResult enumerate_milp(const milp::MilpModel& model,
                                 const milp::SolveOptions& options) {
  std::vector<int> int_vars;
  for (int v = 0; v < model.num_vars(); ++v)
    if (model.vars[static_cast<std::size_t>(v)].kind == milp::VarKind::Integer)
      int_vars.push_back(v);
  for (int v : int_vars) {
    const auto& var = model.vars[static_cast<std::size_t>(v)];
    if (!std::isfinite(var.lower) || !std::isfinite(var.upper))
      throw ShapeMismatch("enumerate: integer variables need finite bounds");
  }

  milp::MilpModel relaxed = model;
  for (int v : int_vars) relaxed.vars[static_cast<std::size_t>(v)].kind = milp::VarKind::Continuous;

  milp::SolveResult best;
  best.status = milp::SolveStatus::Infeasible;
  std::vector<long> assign(int_vars.size());
  std::vector<long> lo(int_vars.size()), hi(int_vars.size());
  for (std::size_t i = 0; i < int_vars.size(); ++i) {
    lo[i] = static_cast<long>(std::ceil(model.vars[static_cast<std::size_t>(int_vars[i])].lower - 1e-9));
    hi[i] = static_cast<long>(std::floor(model.vars[static_cast<std::size_t>(int_vars[i])].upper + 1e-9));
    assign[i] = lo[i];
    if (lo[i] > hi[i]) return best;  // empty integer box
  }

  bool done = false;
  while (!done) {
    for (std::size_t i = 0; i < int_vars.size(); ++i)
      relaxed.fix_var(int_vars[i], static_cast<double>(assign[i]));
    auto lp = milp::solve_lp(relaxed, options);
    if (lp.status == milp::SolveStatus::Optimal &&
        (best.status != milp::SolveStatus::Optimal || lp.objective < best.objective)) {
      best.status = milp::SolveStatus::Optimal;
      best.objective = lp.objective;
      best.bound = lp.objective;
      best.gap = 0.0;
      best.x = lp.x;
      for (std::size_t i = 0; i < int_vars.size(); ++i)
        best.x[static_cast<std::size_t>(int_vars[i])] = static_cast<double>(assign[i]);
    }
    done = true;
    for (std::size_t i = 0; i < int_vars.size(); ++i) {
      if (++assign[i] <= hi[i]) {
        done = false;
        break;
      }
      assign[i] = lo[i];
    }
    if (int_vars.empty()) break;
  }
  return best;
}

}  // namespace testsupport
