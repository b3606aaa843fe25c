#include "drlcp/reformulation.hpp"

#include <cmath>
#include <string>

namespace drlcp {

namespace {

AffineExpr shifted(const AffineExpr& e, int offset) {
  if (offset == 0) return e;
  AffineExpr out = AffineExpr::constant(e.constant_term());
  for (const auto& [id, c] : e.terms()) out += AffineExpr::variable(id + offset, c);
  return out;
}

std::string ids(std::initializer_list<int> ix) {
  std::string s;
  for (int v : ix) s += "_" + std::to_string(v);
  return s;
}

// d restricted to block (t, i), evaluated at the block-local endpoint slice.
AffineExpr block_dot(const AffineVec& d, const BlockIndex::Block& blk,
                     const std::vector<double>& phi, int offset) {
  AffineExpr acc;
  const int len = 2 * blk.p - 1;
  for (int z = 0; z < len; ++z) {
    const double w = phi[static_cast<std::size_t>(z)];
    if (w == 0.0) continue;
    acc += shifted(d[static_cast<std::size_t>(blk.v_offset + z)], offset) * w;
  }
  return acc;
}

// A lifted block whose coefficient slice is structurally zero contributes
// exactly zero to the block sum (the majorizer's minimum is attained at
// zero), so its auxiliary variable and endpoint rows can be dropped.
bool block_is_zero(const AffineVec& d, const BlockIndex::Block& blk) {
  const int len = 2 * blk.p - 1;
  for (int z = 0; z < len; ++z) {
    const auto& e = d[static_cast<std::size_t>(blk.v_offset + z)];
    if (!e.terms().empty() || e.constant_term() != 0.0) return false;
  }
  return true;
}

void check_size(const milp::MilpModel& m, const ReformulationOptions& options) {
  if (m.num_vars() > options.max_model_vars)
    throw ModelTooLarge("reformulation: " + std::to_string(m.num_vars()) +
                        " variables exceed the cap of " +
                        std::to_string(options.max_model_vars));
  if (m.num_rows() > options.max_model_rows)
    throw ModelTooLarge("reformulation: " + std::to_string(m.num_rows()) +
                        " rows exceed the cap of " + std::to_string(options.max_model_rows));
}

}  // namespace

long add_epigraph_rows(milp::MilpModel& m, const std::vector<AffineVec>& d,
                       const AffineVec& r, const BlockIndex& index,
                       const SegmentGeometry& geo, const std::vector<double>& sample,
                       const AffineExpr& lambda, int eta_var, int policy_offset,
                       const std::vector<int>& tilt_lower, const std::vector<int>& tilt_upper,
                       const std::string& prefix) {
  const int T = static_cast<int>(geo.segments.size());
  const int n = T > 0 ? static_cast<int>(geo.segments[0].size()) : 0;
  const int K = static_cast<int>(d.size());
  const bool lambda_fixed = lambda.is_constant();
  const bool tilted = !tilt_lower.empty();
  long rows = 0;

  for (int k = 0; k < K; ++k) {
    // per-block majorization variables and the coupling row; blocks the
    // piece does not touch are dropped (zero contribution, tilts excepted)
    std::vector<int> eta_block;
    eta_block.reserve(static_cast<std::size_t>(T * n));
    AffineExpr sum_row = AffineExpr::variable(eta_var);
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < n; ++i) {
        if (!tilted && block_is_zero(d[static_cast<std::size_t>(k)], index.at(t, i))) {
          eta_block.push_back(-1);
          continue;
        }
        const int v = m.add_var(prefix + "etak" + ids({k, t, i}), -milp::kInf, milp::kInf);
        eta_block.push_back(v);
        sum_row -= AffineExpr::variable(v);
      }
    sum_row -= shifted(r[static_cast<std::size_t>(k)], policy_offset);
    m.add_row(prefix + "sum" + ids({k}), sum_row, milp::Sense::GreaterEqual);
    ++rows;

    for (int t = 0; t < T; ++t)
      for (int i = 0; i < n; ++i) {
        const auto& blk = index.at(t, i);
        const int eta_ti = eta_block[static_cast<std::size_t>(t * n + i)];
        if (eta_ti < 0) continue;
        const double xi_hat = sample[static_cast<std::size_t>(t * n + i)];
        for (int j = 0; j < blk.p; ++j) {
          const auto& seg = geo.segments[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]
                                        [static_cast<std::size_t>(j)];
          int zeta;
          if (lambda_fixed) {
            const double cap = lambda.constant_term();
            zeta = m.add_var(prefix + "zeta" + ids({k, t, i, j}), -cap, cap);
          } else {
            zeta = m.add_var(prefix + "zeta" + ids({k, t, i, j}), -milp::kInf, milp::kInf);
            m.add_row(prefix + "zb_p" + ids({k, t, i, j}),
                      lambda - AffineExpr::variable(zeta), milp::Sense::GreaterEqual);
            m.add_row(prefix + "zb_m" + ids({k, t, i, j}),
                      lambda + AffineExpr::variable(zeta), milp::Sense::GreaterEqual);
            rows += 2;
          }
          auto endpoint_row = [&](const std::vector<double>& phi, double w, const char* tag) {
            AffineExpr row = AffineExpr::variable(eta_ti);
            row -= block_dot(d[static_cast<std::size_t>(k)], blk, phi, policy_offset);
            row += AffineExpr::variable(zeta, w - xi_hat);
            if (tilted) {
              const std::size_t comp = static_cast<std::size_t>(t * n + i);
              row -= AffineExpr::variable(tilt_lower[comp], w);
              row += AffineExpr::variable(tilt_upper[comp], w);
            }
            m.add_row(prefix + tag + ids({k, t, i, j}), row, milp::Sense::GreaterEqual);
            ++rows;
          };
          endpoint_row(seg.phi_hi, seg.w_hi, "ep_hi");
          endpoint_row(seg.phi_lo, seg.w_lo, "ep_lo");
        }
      }
  }
  return rows;
}

long add_robust_rows(milp::MilpModel& m, const std::vector<AffineVec>& e,
                     const AffineVec& bound, const BlockIndex& index,
                     const SegmentGeometry& geo, int policy_offset,
                     const std::string& prefix) {
  const int T = static_cast<int>(geo.segments.size());
  const int n = T > 0 ? static_cast<int>(geo.segments[0].size()) : 0;
  long rows = 0;
  for (std::size_t r = 0; r < e.size(); ++r) {
    AffineExpr coupling = shifted(bound[r], policy_offset);
    std::vector<int> aux;
    aux.reserve(static_cast<std::size_t>(T * n));
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < n; ++i) {
        if (block_is_zero(e[r], index.at(t, i))) {
          aux.push_back(-1);
          continue;
        }
        const int v = m.add_var(prefix + "mr" + ids({static_cast<int>(r), t, i}),
                                -milp::kInf, milp::kInf);
        aux.push_back(v);
        coupling -= AffineExpr::variable(v);
      }
    m.add_row(prefix + "rc" + ids({static_cast<int>(r)}), coupling,
              milp::Sense::GreaterEqual);
    ++rows;
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < n; ++i) {
        const auto& blk = index.at(t, i);
        const int aux_ti = aux[static_cast<std::size_t>(t * n + i)];
        if (aux_ti < 0) continue;
        for (int j = 0; j < blk.p; ++j) {
          const auto& seg = geo.segments[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]
                                        [static_cast<std::size_t>(j)];
          auto endpoint_row = [&](const std::vector<double>& phi, const char* tag) {
            AffineExpr row = AffineExpr::variable(aux_ti);
            row -= block_dot(e[r], blk, phi, policy_offset);
            m.add_row(prefix + tag + ids({static_cast<int>(r), t, i, j}), row,
                      milp::Sense::GreaterEqual);
            ++rows;
          };
          endpoint_row(seg.phi_hi, "rcep_hi");
          endpoint_row(seg.phi_lo, "rcep_lo");
        }
      }
  }
  return rows;
}

namespace {

// Shared scenario assembly: policy variables, multiplier, per-sample
// epigraph blocks, robust rows. The caller owns the objective.
BuildInfo add_scenario(milp::MilpModel& m, const CompiledProblem& cp,
                       const WassersteinSet& set, const ReformulationOptions& options,
                       const std::vector<int>& tilt_lower, const std::vector<int>& tilt_upper,
                       const std::string& prefix) {
  BuildInfo info;
  info.policy_offset = declare_policy_vars(m, cp.layout, options.policy_bounds, prefix);
  info.num_policy_vars = cp.layout.num_vars;
  info.lambda_var = m.add_var(prefix + "lam", 0.0, milp::kInf);
  const AffineExpr lambda = AffineExpr::variable(info.lambda_var);
  const SegmentGeometry geo = segment_endpoints(cp.model.space, cp.spec);
  for (int s = 0; s < set.count(); ++s) {
    const int eta = m.add_var(prefix + "eta" + ids({s}), -milp::kInf, milp::kInf);
    info.eta_vars.push_back(eta);
    info.epigraph_rows += add_epigraph_rows(
        m, cp.cost.d, cp.cost.r, cp.index, geo, set.samples[static_cast<std::size_t>(s)],
        lambda, eta, info.policy_offset, tilt_lower, tilt_upper,
        prefix + "s" + std::to_string(s) + "_");
    check_size(m, options);
  }
  info.robust_rows = add_robust_rows(m, cp.constraints.e, cp.constraints.m, cp.index, geo,
                                     info.policy_offset, prefix);
  check_size(m, options);
  return info;
}

}  // namespace

BuiltModel build_wasserstein(const CompiledProblem& cp, const WassersteinSet& set,
                             const ReformulationOptions& options) {
  set.validate(cp.model.space);
  BuiltModel out;
  out.model.name = "wasserstein";
  out.info = add_scenario(out.model, cp, set, options, {}, {}, "");
  AffineExpr obj = AffineExpr::variable(out.info.lambda_var, set.radius);
  for (int eta : out.info.eta_vars) obj += AffineExpr::variable(eta, 1.0 / set.count());
  out.model.set_objective(obj);
  return out;
}

BuiltModel build_mixed_moment(const CompiledProblem& cp, const MixedMomentSet& set,
                              const ReformulationOptions& options) {
  set.validate(cp.model.space);
  BuiltModel out;
  out.model.name = "mixed_moment";
  const int dim = cp.model.space.total_dim();
  // Mean-bound multipliers are declared first so the epigraph rows can
  // reference them while they tilt the piece slopes.
  std::vector<int> bl, bu;
  for (int c = 0; c < dim; ++c)
    bl.push_back(out.model.add_var("beta_lo" + ids({c}), 0.0, milp::kInf));
  for (int c = 0; c < dim; ++c)
    bu.push_back(out.model.add_var("beta_up" + ids({c}), 0.0, milp::kInf));
  out.info = add_scenario(out.model, cp, set.base, options, bl, bu, "");
  out.info.beta_lower_vars = bl;
  out.info.beta_upper_vars = bu;

  AffineExpr obj = AffineExpr::variable(out.info.lambda_var, set.base.radius);
  for (int eta : out.info.eta_vars)
    obj += AffineExpr::variable(eta, 1.0 / set.base.count());
  for (int c = 0; c < dim; ++c) {
    obj += AffineExpr::variable(bl[static_cast<std::size_t>(c)],
                                -set.mean_lower[static_cast<std::size_t>(c)]);
    obj += AffineExpr::variable(bu[static_cast<std::size_t>(c)],
                                set.mean_upper[static_cast<std::size_t>(c)]);
  }
  out.model.set_objective(obj);
  return out;
}

EventWiseBuilt build_event_wise(const std::vector<CompiledProblem>& problems,
                                const EventWiseSet& set,
                                const ReformulationOptions& options) {
  if (problems.size() != set.events.size())
    throw ShapeMismatch("event-wise: one compiled problem per event required");
  std::vector<DisturbanceSpace> supports;
  supports.reserve(problems.size());
  for (const auto& cp : problems) supports.push_back(cp.model.space);
  set.validate(supports);

  EventWiseBuilt out;
  out.model.name = "event_wise";
  AffineExpr obj;
  for (std::size_t l = 0; l < problems.size(); ++l) {
    const double prob = set.probabilities[l];
    const auto& ev = set.events[l];
    BuildInfo info = add_scenario(out.model, problems[l], ev, options, {}, {},
                                  "e" + std::to_string(l) + "_");
    obj += AffineExpr::variable(info.lambda_var, prob * ev.radius);
    for (int eta : info.eta_vars)
      obj += AffineExpr::variable(eta, prob / ev.count());
    out.events.push_back(std::move(info));
  }
  out.model.set_objective(obj);
  return out;
}

std::vector<double> extract_policy(const std::vector<double>& x, const BuildInfo& info) {
  if (x.size() < static_cast<std::size_t>(info.policy_offset + info.num_policy_vars))
    throw ShapeMismatch("extract_policy: solution vector too short");
  return {x.begin() + info.policy_offset,
          x.begin() + info.policy_offset + info.num_policy_vars};
}

}  // namespace drlcp
