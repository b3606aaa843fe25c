#include "drlcp/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace drlcp {

namespace {

void check_dims(const std::vector<Eigen::MatrixXd>& mats, int T, int rows, int cols,
                const char* what) {
  if (static_cast<int>(mats.size()) != T)
    throw ShapeMismatch(std::string(what) + ": expected one matrix per stage");
  for (int t = 0; t < T; ++t)
    if (mats[static_cast<std::size_t>(t)].rows() != rows ||
        mats[static_cast<std::size_t>(t)].cols() != cols)
      throw ShapeMismatch(std::string(what) + " has wrong shape at stage " +
                          std::to_string(t + 1));
}

// rows(M) x n destination, dest += M * src, entrywise over AffineExpr.
CompiledAffine apply(const Eigen::MatrixXd& M, const CompiledAffine& src) {
  CompiledAffine out;
  const std::size_t nz = src.coef.empty() ? 0 : src.coef[0].size();
  out.coef.assign(static_cast<std::size_t>(M.rows()), AffineVec(nz));
  out.cons.assign(static_cast<std::size_t>(M.rows()), AffineExpr{});
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c) {
      const double w = M(r, c);
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < nz; ++k)
        out.coef[static_cast<std::size_t>(r)][k] +=
            src.coef[static_cast<std::size_t>(c)][k] * w;
      out.cons[static_cast<std::size_t>(r)] += src.cons[static_cast<std::size_t>(c)] * w;
    }
  return out;
}

void accumulate(CompiledAffine& dst, const CompiledAffine& inc) {
  for (std::size_t r = 0; r < dst.coef.size(); ++r) {
    for (std::size_t k = 0; k < dst.coef[r].size(); ++k) dst.coef[r][k] += inc.coef[r][k];
    dst.cons[r] += inc.cons[r];
  }
}

// Disturbance xi_t expressed over the lifted vector: the V entries of each
// block sum back to the original coordinate.
CompiledAffine lifted_disturbance(const SystemModel& model, const BlockIndex& idx, int t) {
  CompiledAffine out;
  const int n = model.space.dims_per_stage;
  out.coef.assign(static_cast<std::size_t>(n), AffineVec(static_cast<std::size_t>(idx.total_dim)));
  out.cons.assign(static_cast<std::size_t>(n), AffineExpr{});
  for (int i = 0; i < n; ++i) {
    const auto& blk = idx.at(t, i);
    for (int j = 0; j < blk.p; ++j)
      out.coef[static_cast<std::size_t>(i)][static_cast<std::size_t>(blk.v_offset + j)] =
          AffineExpr::constant(1.0);
  }
  return out;
}

}  // namespace

void SystemModel::validate() const {
  if (horizon <= 0) throw ShapeMismatch("system: horizon must be positive");
  if (n_x < 0 || n_u < 0 || n_gamma < 0) throw ShapeMismatch("system: negative dimension");
  space.validate();
  if (space.horizon != horizon) throw ShapeMismatch("system: disturbance horizon differs");
  const int T = horizon;
  check_dims(A, T, n_x, n_x, "A");
  check_dims(B, T, n_x, n_u, "B");
  check_dims(C, T, n_x, n_gamma, "C");
  check_dims(D, T, n_x, space.dims_per_stage, "D");
  const int nc = n_constraints();
  check_dims(Ac, T, nc, n_x, "Ac");
  check_dims(Bc, T, nc, n_u, "Bc");
  check_dims(Cc, T, nc, n_gamma, "Cc");
  check_dims(Dc, T, nc, space.dims_per_stage, "Dc");
  if (static_cast<int>(x0.size()) != n_x) throw ShapeMismatch("system: x0 size");
  if (static_cast<int>(discount.size()) != T) throw ShapeMismatch("system: discount size");
  for (double a : discount)
    if (!(a >= 0.0) || !std::isfinite(a))
      throw ShapeMismatch("system: discount factors must be finite and nonnegative");
  if (static_cast<int>(cost_pieces.size()) != T)
    throw ShapeMismatch("system: cost pieces must cover every stage");
  for (int t = 0; t < T; ++t) {
    if (cost_pieces[static_cast<std::size_t>(t)].empty())
      throw ShapeMismatch("system: stage " + std::to_string(t + 1) + " has no cost piece");
    for (const auto& pc : cost_pieces[static_cast<std::size_t>(t)])
      if (static_cast<int>(pc.a.size()) != n_x || static_cast<int>(pc.b.size()) != n_u ||
          static_cast<int>(pc.c.size()) != n_gamma)
        throw ShapeMismatch("system: cost piece shape at stage " + std::to_string(t + 1));
  }
}

InformationMask InformationMask::full(const SystemModel& model) {
  InformationMask m;
  const int T = model.horizon;
  const int n = model.space.dims_per_stage;
  auto make = [&](int channels) {
    std::vector<std::vector<std::vector<std::vector<char>>>> out(
        static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      out[static_cast<std::size_t>(t)].assign(
          static_cast<std::size_t>(channels),
          std::vector<std::vector<char>>(
              static_cast<std::size_t>(t + 1),
              std::vector<char>(static_cast<std::size_t>(n), 1)));
    }
    return out;
  };
  m.allow_u = make(model.n_u);
  m.allow_gamma = make(model.n_gamma);
  return m;
}

void InformationMask::set_u_lag(int lag) {
  for (std::size_t t = 0; t < allow_u.size(); ++t)
    for (auto& ch : allow_u[t])
      for (std::size_t tp = 0; tp < ch.size(); ++tp)
        if (static_cast<int>(tp) > static_cast<int>(t) - lag)
          std::fill(ch[tp].begin(), ch[tp].end(), char(0));
}

void InformationMask::block_stage_everywhere(int t_prime) {
  auto wipe = [&](auto& mask) {
    for (auto& stage : mask)
      for (auto& ch : stage)
        if (t_prime < static_cast<int>(ch.size()))
          std::fill(ch[static_cast<std::size_t>(t_prime)].begin(),
                    ch[static_cast<std::size_t>(t_prime)].end(), char(0));
  };
  wipe(allow_u);
  wipe(allow_gamma);
}

PolicyLayout build_policy_layout(const SystemModel& model, const LiftingSpec& spec,
                                 const InformationMask& mask) {
  model.validate();
  spec.validate(model.space);
  const int T = model.horizon;
  const int n = model.space.dims_per_stage;
  if (static_cast<int>(mask.allow_u.size()) != T ||
      static_cast<int>(mask.allow_gamma.size()) != T)
    throw ShapeMismatch("mask: horizon differs from system");

  PolicyLayout L;
  L.horizon = T;
  L.n_u = model.n_u;
  L.n_gamma = model.n_gamma;
  L.y.assign(static_cast<std::size_t>(T), {});
  L.y0.assign(static_cast<std::size_t>(T), {});
  L.z.assign(static_cast<std::size_t>(T), {});
  L.z0.assign(static_cast<std::size_t>(T), {});

  auto tag = [](const char* base, std::initializer_list<int> ix) {
    std::string s = base;
    for (int v : ix) s += "_" + std::to_string(v);
    return s;
  };

  for (int t = 0; t < T; ++t) {
    auto& yt = L.y[static_cast<std::size_t>(t)];
    yt.assign(static_cast<std::size_t>(model.n_u), {});
    for (int ch = 0; ch < model.n_u; ++ch) {
      const auto& allowed = mask.allow_u[static_cast<std::size_t>(t)][static_cast<std::size_t>(ch)];
      if (static_cast<int>(allowed.size()) != t + 1)
        throw ShapeMismatch("mask: continuous block stages at stage " + std::to_string(t + 1));
      for (int tp = 0; tp <= t; ++tp)
        for (int i = 0; i < n; ++i) {
          if (!allowed[static_cast<std::size_t>(tp)][static_cast<std::size_t>(i)]) continue;
          const int p = spec.segments(tp, i);
          for (int j = 0; j < p; ++j) {
            L.names.push_back(tag("Y", {t + 1, ch, tp + 1, i, j}));
            L.is_integer.push_back(0);
            yt[static_cast<std::size_t>(ch)].push_back({tp, i, j, L.num_vars++});
          }
        }
    }
    auto& y0t = L.y0[static_cast<std::size_t>(t)];
    for (int ch = 0; ch < model.n_u; ++ch) {
      L.names.push_back(tag("y0", {t + 1, ch}));
      L.is_integer.push_back(0);
      y0t.push_back(L.num_vars++);
    }
    auto& zt = L.z[static_cast<std::size_t>(t)];
    zt.assign(static_cast<std::size_t>(model.n_gamma), {});
    for (int ch = 0; ch < model.n_gamma; ++ch) {
      const auto& allowed =
          mask.allow_gamma[static_cast<std::size_t>(t)][static_cast<std::size_t>(ch)];
      if (static_cast<int>(allowed.size()) != t + 1)
        throw ShapeMismatch("mask: integer block stages at stage " + std::to_string(t + 1));
      for (int tp = 0; tp <= t; ++tp)
        for (int i = 0; i < n; ++i) {
          if (!allowed[static_cast<std::size_t>(tp)][static_cast<std::size_t>(i)]) continue;
          const int nq = spec.segments(tp, i) - 1;
          for (int j = 0; j < nq; ++j) {
            L.names.push_back(tag("Z", {t + 1, ch, tp + 1, i, j}));
            L.is_integer.push_back(1);
            zt[static_cast<std::size_t>(ch)].push_back({tp, i, j, L.num_vars++});
          }
        }
    }
    auto& z0t = L.z0[static_cast<std::size_t>(t)];
    for (int ch = 0; ch < model.n_gamma; ++ch) {
      L.names.push_back(tag("z0", {t + 1, ch}));
      L.is_integer.push_back(1);
      z0t.push_back(L.num_vars++);
    }
  }
  return L;
}

int declare_policy_vars(milp::MilpModel& m, const PolicyLayout& layout,
                        const PolicyBounds& bounds, const std::string& prefix) {
  const int offset = m.num_vars();
  for (int v = 0; v < layout.num_vars; ++v) {
    const bool integer = layout.is_integer[static_cast<std::size_t>(v)] != 0;
    double lo, hi;
    if (!integer) {
      lo = -bounds.y_abs;
      hi = bounds.y_abs;
    } else if (layout.names[static_cast<std::size_t>(v)].rfind("z0", 0) == 0) {
      lo = bounds.z0_lower;
      hi = bounds.z0_upper;
    } else {
      lo = bounds.z_lower;
      hi = bounds.z_upper;
    }
    m.add_var(prefix + layout.names[static_cast<std::size_t>(v)], lo, hi,
              integer ? milp::VarKind::Integer : milp::VarKind::Continuous);
  }
  return offset;
}

CompiledAffine compile_control(const SystemModel& model, const LiftingSpec& spec,
                               const PolicyLayout& layout, int t, bool integer_part) {
  const BlockIndex idx = BlockIndex::build(spec);
  CompiledAffine out;
  const int channels = integer_part ? model.n_gamma : model.n_u;
  out.coef.assign(static_cast<std::size_t>(channels),
                  AffineVec(static_cast<std::size_t>(idx.total_dim)));
  out.cons.assign(static_cast<std::size_t>(channels), AffineExpr{});
  for (int ch = 0; ch < channels; ++ch) {
    const auto& gains = integer_part
                            ? layout.z[static_cast<std::size_t>(t)][static_cast<std::size_t>(ch)]
                            : layout.y[static_cast<std::size_t>(t)][static_cast<std::size_t>(ch)];
    for (const auto& g : gains) {
      const auto& blk = idx.at(g.t_prime, g.i);
      const int pos = integer_part ? blk.q_offset + g.j : blk.v_offset + g.j;
      out.coef[static_cast<std::size_t>(ch)][static_cast<std::size_t>(pos)] +=
          AffineExpr::variable(g.var);
    }
    const int off =
        integer_part ? layout.z0[static_cast<std::size_t>(t)][static_cast<std::size_t>(ch)]
                     : layout.y0[static_cast<std::size_t>(t)][static_cast<std::size_t>(ch)];
    out.cons[static_cast<std::size_t>(ch)] = AffineExpr::variable(off);
  }
  return out;
}

std::vector<CompiledAffine> roll_out_state(const SystemModel& model, const LiftingSpec& spec,
                                           const PolicyLayout& layout) {
  const BlockIndex idx = BlockIndex::build(spec);
  const std::size_t nz = static_cast<std::size_t>(idx.total_dim);

  CompiledAffine x;
  x.coef.assign(static_cast<std::size_t>(model.n_x), AffineVec(nz));
  x.cons.assign(static_cast<std::size_t>(model.n_x), AffineExpr{});
  for (int i = 0; i < model.n_x; ++i)
    x.cons[static_cast<std::size_t>(i)] = AffineExpr::constant(model.x0(i));

  std::vector<CompiledAffine> traj;
  traj.reserve(static_cast<std::size_t>(model.horizon));
  for (int t = 0; t < model.horizon; ++t) {
    CompiledAffine next = apply(model.A[static_cast<std::size_t>(t)], x);
    accumulate(next, apply(model.B[static_cast<std::size_t>(t)],
                           compile_control(model, spec, layout, t, false)));
    accumulate(next, apply(model.C[static_cast<std::size_t>(t)],
                           compile_control(model, spec, layout, t, true)));
    accumulate(next,
               apply(model.D[static_cast<std::size_t>(t)], lifted_disturbance(model, idx, t)));
    traj.push_back(next);
    x = traj.back();
  }
  return traj;
}

CompiledConstraints compile_constraints(const SystemModel& model, const LiftingSpec& spec,
                                        const PolicyLayout& layout) {
  const BlockIndex idx = BlockIndex::build(spec);
  const std::size_t nz = static_cast<std::size_t>(idx.total_dim);
  const int nc = model.n_constraints();

  CompiledAffine acc;
  acc.coef.assign(static_cast<std::size_t>(nc), AffineVec(nz));
  acc.cons.assign(static_cast<std::size_t>(nc), AffineExpr{});

  const auto states = roll_out_state(model, spec, layout);
  for (int t = 0; t < model.horizon; ++t) {
    accumulate(acc, apply(model.Ac[static_cast<std::size_t>(t)],
                          states[static_cast<std::size_t>(t)]));
    accumulate(acc, apply(model.Bc[static_cast<std::size_t>(t)],
                          compile_control(model, spec, layout, t, false)));
    accumulate(acc, apply(model.Cc[static_cast<std::size_t>(t)],
                          compile_control(model, spec, layout, t, true)));
    accumulate(acc,
               apply(model.Dc[static_cast<std::size_t>(t)], lifted_disturbance(model, idx, t)));
  }

  CompiledConstraints out;
  out.e = std::move(acc.coef);
  out.m.reserve(static_cast<std::size_t>(nc));
  for (int r = 0; r < nc; ++r) {
    AffineExpr slack = AffineExpr::constant(model.q(r));
    slack -= acc.cons[static_cast<std::size_t>(r)];
    out.m.push_back(std::move(slack));
  }
  return out;
}

CompiledCost compile_cost(const SystemModel& model, const LiftingSpec& spec,
                          const PolicyLayout& layout, const CompileOptions& options) {
  const BlockIndex idx = BlockIndex::build(spec);
  const std::size_t nz = static_cast<std::size_t>(idx.total_dim);
  const int T = model.horizon;

  long combos = 1;
  for (int t = 0; t < T; ++t) {
    combos *= static_cast<long>(model.cost_pieces[static_cast<std::size_t>(t)].size());
    if (combos > options.max_cost_pieces)
      throw PieceExplosion("cost piece combinations exceed " +
                           std::to_string(options.max_cost_pieces));
  }

  const auto states = roll_out_state(model, spec, layout);

  // Per-stage, per-piece discounted value over (lifted vector, policy vars).
  std::vector<std::vector<CompiledAffine>> stage_piece(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const CompiledAffine uc = compile_control(model, spec, layout, t, false);
    const CompiledAffine gc = compile_control(model, spec, layout, t, true);
    const double alpha = model.discount[static_cast<std::size_t>(t)];
    for (const auto& pc : model.cost_pieces[static_cast<std::size_t>(t)]) {
      CompiledAffine val;
      val.coef.assign(1, AffineVec(nz));
      val.cons.assign(1, AffineExpr{});
      accumulate(val, apply(alpha * pc.a.transpose(), states[static_cast<std::size_t>(t)]));
      accumulate(val, apply(alpha * pc.b.transpose(), uc));
      accumulate(val, apply(alpha * pc.c.transpose(), gc));
      stage_piece[static_cast<std::size_t>(t)].push_back(std::move(val));
    }
  }

  CompiledCost out;
  out.d.reserve(static_cast<std::size_t>(combos));
  out.r.reserve(static_cast<std::size_t>(combos));
  std::vector<std::size_t> pick(static_cast<std::size_t>(T), 0);
  for (long k = 0; k < combos; ++k) {
    AffineVec d(nz);
    AffineExpr r;
    for (int t = 0; t < T; ++t) {
      const auto& piece = stage_piece[static_cast<std::size_t>(t)][pick[static_cast<std::size_t>(t)]];
      for (std::size_t z = 0; z < nz; ++z) d[z] += piece.coef[0][z];
      r += piece.cons[0];
    }
    out.d.push_back(std::move(d));
    out.r.push_back(std::move(r));
    // lexicographic advance, last stage fastest
    for (int t = T - 1; t >= 0; --t) {
      auto& s = pick[static_cast<std::size_t>(t)];
      if (++s < stage_piece[static_cast<std::size_t>(t)].size()) break;
      s = 0;
    }
  }
  return out;
}

CompiledProblem compile(const SystemModel& model, const LiftingSpec& spec,
                        const InformationMask& mask, const CompileOptions& options) {
  CompiledProblem cp;
  cp.model = model;
  cp.spec = spec;
  cp.index = BlockIndex::build(spec);
  cp.layout = build_policy_layout(model, spec, mask);
  cp.constraints = compile_constraints(model, spec, cp.layout);
  cp.cost = compile_cost(model, spec, cp.layout, options);
  return cp;
}

Trajectory evaluate_policy(const SystemModel& model, const LiftingSpec& spec,
                           const PolicyLayout& layout, const std::vector<double>& policy,
                           const std::vector<double>& xi) {
  if (static_cast<int>(policy.size()) != layout.num_vars)
    throw ShapeMismatch("policy value vector size differs from layout");
  const BlockIndex idx = BlockIndex::build(spec);
  const LiftedPoint zstar = lift(model.space, spec, xi);
  const int n = model.space.dims_per_stage;

  Trajectory traj;
  traj.x.push_back(model.x0);
  traj.max_residual = model.n_constraints() > 0
                          ? -std::numeric_limits<double>::infinity()
                          : 0.0;
  Eigen::VectorXd cons_acc = Eigen::VectorXd::Zero(model.n_constraints());

  for (int t = 0; t < model.horizon; ++t) {
    Eigen::VectorXd u(model.n_u);
    for (int ch = 0; ch < model.n_u; ++ch) {
      double val = policy[static_cast<std::size_t>(
          layout.y0[static_cast<std::size_t>(t)][static_cast<std::size_t>(ch)])];
      for (const auto& g :
           layout.y[static_cast<std::size_t>(t)][static_cast<std::size_t>(ch)]) {
        const auto& blk = idx.at(g.t_prime, g.i);
        val += policy[static_cast<std::size_t>(g.var)] *
               zstar.z[static_cast<std::size_t>(blk.v_offset + g.j)];
      }
      u(ch) = val;
    }
    Eigen::VectorXd gm(model.n_gamma);
    for (int ch = 0; ch < model.n_gamma; ++ch) {
      double val = policy[static_cast<std::size_t>(
          layout.z0[static_cast<std::size_t>(t)][static_cast<std::size_t>(ch)])];
      for (const auto& g :
           layout.z[static_cast<std::size_t>(t)][static_cast<std::size_t>(ch)]) {
        const auto& blk = idx.at(g.t_prime, g.i);
        val += policy[static_cast<std::size_t>(g.var)] *
               zstar.z[static_cast<std::size_t>(blk.q_offset + g.j)];
      }
      gm(ch) = val;
    }
    Eigen::VectorXd xit(n);
    for (int i = 0; i < n; ++i) xit(i) = xi[static_cast<std::size_t>(t * n + i)];

    Eigen::VectorXd xt = model.A[static_cast<std::size_t>(t)] * traj.x.back() +
                         model.B[static_cast<std::size_t>(t)] * u +
                         model.C[static_cast<std::size_t>(t)] * gm +
                         model.D[static_cast<std::size_t>(t)] * xit;

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& pc : model.cost_pieces[static_cast<std::size_t>(t)])
      best = std::max(best, pc.a.dot(xt) + pc.b.dot(u) + pc.c.dot(gm));
    traj.stage_cost.push_back(model.discount[static_cast<std::size_t>(t)] * best);
    traj.total_cost += traj.stage_cost.back();

    cons_acc += model.Ac[static_cast<std::size_t>(t)] * xt +
                model.Bc[static_cast<std::size_t>(t)] * u +
                model.Cc[static_cast<std::size_t>(t)] * gm +
                model.Dc[static_cast<std::size_t>(t)] * xit;

    traj.u.push_back(std::move(u));
    traj.gamma.push_back(std::move(gm));
    traj.x.push_back(std::move(xt));
  }
  if (model.n_constraints() > 0)
    traj.max_residual = (cons_acc - model.q).maxCoeff();
  return traj;
}

NumericPieces substitute_cost(const CompiledCost& cost, const std::vector<double>& policy) {
  NumericPieces out;
  out.g.reserve(cost.d.size());
  out.h.reserve(cost.d.size());
  for (std::size_t k = 0; k < cost.d.size(); ++k) {
    Eigen::VectorXd g(cost.d[k].size());
    for (std::size_t z = 0; z < cost.d[k].size(); ++z)
      g(static_cast<Eigen::Index>(z)) = cost.d[k][z].eval(policy);
    out.g.push_back(std::move(g));
    out.h.push_back(cost.r[k].eval(policy));
  }
  return out;
}

NumericConstraints substitute_constraints(const CompiledConstraints& cons, int lifted_dim,
                                          const std::vector<double>& policy) {
  NumericConstraints out;
  const int nr = static_cast<int>(cons.e.size());
  out.e.resize(nr, lifted_dim);
  out.m.resize(nr);
  for (int r = 0; r < nr; ++r) {
    for (int z = 0; z < lifted_dim; ++z)
      out.e(r, z) = cons.e[static_cast<std::size_t>(r)][static_cast<std::size_t>(z)].eval(policy);
    out.m(r) = cons.m[static_cast<std::size_t>(r)].eval(policy);
  }
  return out;
}

}  // namespace drlcp
