#include "drlcp/inventory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "drlcp/milp/io.hpp"
#include "drlcp/milp/solver.hpp"
#include "drlcp/oracle.hpp"

namespace drlcp {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

Eigen::MatrixXd scalar_mat(double v) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace

void InventorySpec::finalize() {
  if (horizon <= 0) throw ConfigError("inventory: horizon must be positive");
  if (num_lots <= 0) throw ConfigError("inventory: need at least one lot type");
  if (lot_price.empty()) lot_price.assign(static_cast<std::size_t>(num_lots), 5.0);
  if (lot_size.empty()) lot_size.assign(static_cast<std::size_t>(num_lots), 30.0);
  if (static_cast<int>(lot_price.size()) != num_lots ||
      static_cast<int>(lot_size.size()) != num_lots)
    throw ConfigError("inventory: lot vectors must have num_lots entries");
  for (double c : lot_price)
    if (!(c > booking))
      throw ConfigError("inventory: every lot price must exceed the booking price");
  for (double q : lot_size)
    if (!(q > 0.0)) throw ConfigError("inventory: lot sizes must be positive");
  if (!(support_lo < support_hi)) throw ConfigError("inventory: empty demand support");
  if (segments < 1) throw ConfigError("inventory: segment count must be at least 1");
  if (num_samples < 1) throw ConfigError("inventory: need at least one sample");
  if (!(radius >= 0.0)) throw ConfigError("inventory: radius must be nonnegative");
  if (!(sigma > 0.0)) throw ConfigError("inventory: sigma must be positive");
  if (mean.empty()) {
    static const double base[4] = {50.0, 30.0, 70.0, 30.0};
    for (int t = 0; t < horizon; ++t) mean.push_back(base[t % 4]);
  }
  if (static_cast<int>(mean.size()) != horizon)
    throw ConfigError("inventory: mean vector must have one entry per stage");
  for (double m : mean)
    if (m < support_lo || m > support_hi)
      throw ConfigError("inventory: demand mean outside the support");
}

std::vector<std::vector<double>> sample_demands(const InventorySpec& spec, int count,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    std::vector<double> traj(static_cast<std::size_t>(spec.horizon));
    for (int t = 0; t < spec.horizon; ++t) {
      std::normal_distribution<double> dist(spec.mean[static_cast<std::size_t>(t)], spec.sigma);
      double v = dist(rng);
      while (v < spec.support_lo || v > spec.support_hi) v = dist(rng);
      traj[static_cast<std::size_t>(t)] = v;
    }
    out.push_back(std::move(traj));
  }
  return out;
}

namespace {

// Core assembly shared by the full problem and the shrinking-horizon
// remainders. Stage flags: stage 0 may be a padding stage whose order input
// and disturbance are inert.
SystemModel inventory_system(const InventorySpec& spec, int stages, double x_init,
                             bool padded_first_stage,
                             const std::vector<double>& stage_lo,
                             const std::vector<double>& stage_hi) {
  const int K = spec.num_lots;
  SystemModel m;
  m.horizon = stages;
  m.n_x = 1;
  m.n_u = 1;
  m.n_gamma = K;
  m.space.horizon = stages;
  m.space.dims_per_stage = 1;
  m.space.lower.assign(static_cast<std::size_t>(stages), {0.0});
  m.space.upper.assign(static_cast<std::size_t>(stages), {0.0});
  for (int t = 0; t < stages; ++t) {
    m.space.lower[static_cast<std::size_t>(t)][0] = stage_lo[static_cast<std::size_t>(t)];
    m.space.upper[static_cast<std::size_t>(t)][0] = stage_hi[static_cast<std::size_t>(t)];
  }
  Eigen::MatrixXd lots(1, K);
  for (int k = 0; k < K; ++k) lots(0, k) = spec.lot_size[static_cast<std::size_t>(k)];

  const int nc = stages * (2 + 2 * K);
  m.q = Eigen::VectorXd::Zero(nc);
  for (int t = 0; t < stages; ++t) {
    const bool pad = padded_first_stage && t == 0;
    m.A.push_back(scalar_mat(1.0));
    m.B.push_back(scalar_mat(pad ? 0.0 : 1.0));
    m.C.push_back(lots);
    m.D.push_back(scalar_mat(pad ? 0.0 : -1.0));

    Eigen::MatrixXd ac = Eigen::MatrixXd::Zero(nc, 1);
    Eigen::MatrixXd bc = Eigen::MatrixXd::Zero(nc, 1);
    Eigen::MatrixXd cc = Eigen::MatrixXd::Zero(nc, K);
    const int base = t * (2 + 2 * K);
    ac(base, 0) = -1.0;  // inventory never negative
    m.q(base) = 0.0;
    bc(base + 1, 0) = -1.0;  // orders never negative
    m.q(base + 1) = 0.0;
    for (int k = 0; k < K; ++k) {
      cc(base + 2 + k, k) = 1.0;  // lot indicator at most one
      m.q(base + 2 + k) = 1.0;
      cc(base + 2 + K + k, k) = -1.0;  // lot indicator at least zero
      m.q(base + 2 + K + k) = 0.0;
    }
    m.Ac.push_back(std::move(ac));
    m.Bc.push_back(std::move(bc));
    m.Cc.push_back(std::move(cc));
    m.Dc.push_back(Eigen::MatrixXd::Zero(nc, 1));

    StageCostPiece piece;
    piece.a = Eigen::VectorXd::Constant(1, spec.holding);
    piece.b = Eigen::VectorXd::Constant(1, pad ? 0.0 : spec.booking);
    piece.c = Eigen::VectorXd(K);
    for (int k = 0; k < K; ++k)
      piece.c(k) = spec.lot_price[static_cast<std::size_t>(k)] *
                   spec.lot_size[static_cast<std::size_t>(k)];
    m.cost_pieces.push_back({piece});
    m.discount.push_back(1.0);
  }
  m.x0 = Eigen::VectorXd::Constant(1, x_init);
  return m;
}

LiftingSpec inventory_lifting(const DisturbanceSpace& space, int segments,
                              bool padded_first_stage) {
  LiftingSpec spec = LiftingSpec::equal_division(space, segments);
  if (padded_first_stage) {
    spec.grid[0][0] = {space.lower[0][0], space.upper[0][0]};
  }
  return spec;
}

InformationMask inventory_mask(const SystemModel& model, bool padded_first_stage) {
  InformationMask mask = InformationMask::full(model);
  mask.set_u_lag(1);
  if (padded_first_stage) mask.block_stage_everywhere(0);
  return mask;
}

}  // namespace

InventoryProblem build_inventory(const InventorySpec& spec_in) {
  InventoryProblem out;
  out.spec = spec_in;
  out.spec.finalize();
  const auto& spec = out.spec;
  std::vector<double> lo(static_cast<std::size_t>(spec.horizon), spec.support_lo);
  std::vector<double> hi(static_cast<std::size_t>(spec.horizon), spec.support_hi);
  out.model = inventory_system(spec, spec.horizon, spec.x0, false, lo, hi);
  out.lifting = inventory_lifting(out.model.space, spec.segments, false);
  out.mask = inventory_mask(out.model, false);
  out.compiled = compile(out.model, out.lifting, out.mask);
  out.ambiguity.radius = spec.radius;
  out.ambiguity.samples = sample_demands(spec, spec.num_samples, spec.sample_seed);
  return out;
}

PolicyBounds inventory_policy_bounds(double y_abs) {
  PolicyBounds b;
  b.y_abs = y_abs;
  // a 0/1 output flips by at most one per indicator, and equals the offset
  // at the lowest demand
  b.z_lower = -1.0;
  b.z_upper = 1.0;
  b.z0_lower = 0.0;
  b.z0_upper = 1.0;
  return b;
}

milp::SolveResult solve_built(const milp::MilpModel& model, const SolverChoice& choice) {
  if (choice.external_command.empty()) return milp::solve_milp(model, choice.options);
  return milp::solve_with_external(model, choice.external_command, choice.work_dir);
}

OpenLoopResult run_open_loop(const InventorySpec& spec, const SolverChoice& choice) {
  InventoryProblem prob = build_inventory(spec);
  ReformulationOptions ropts;
  ropts.policy_bounds = inventory_policy_bounds();
  BuiltModel built = build_wasserstein(prob.compiled, prob.ambiguity, ropts);
  milp::SolveResult res = solve_built(built.model, choice);

  OpenLoopResult out;
  out.horizon = prob.spec.horizon;
  out.segments = prob.spec.segments;
  out.status = milp::to_string(res.status);
  out.time_s = res.wall_time_s;
  out.info = built.info;
  if (res.has_solution()) {
    out.objective = res.objective;
    out.bound = res.bound;
    out.gap = res.gap;
    out.policy = extract_policy(res.x, built.info);

    oracle::ScenarioData data;
    data.pieces = substitute_cost(prob.compiled.cost, out.policy);
    data.geo = segment_endpoints(prob.model.space, prob.lifting);
    data.index = prob.compiled.index;
    data.samples = prob.ambiguity.samples;
    data.radius = prob.ambiguity.radius;
    out.certified = oracle::worst_case_expectation(data).value;
  }
  return out;
}

void write_open_loop_csv(const std::string& path, const std::vector<OpenLoopResult>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "T,p,objective,bound,gap,time_s,status,certified\n";
  for (const auto& r : rows)
    out << r.horizon << "," << r.segments << "," << fmt(r.objective) << "," << fmt(r.bound)
        << "," << fmt(r.gap) << "," << fmt(r.time_s) << "," << r.status << ","
        << fmt(r.certified) << "\n";
}

namespace {

struct RemainderProblem {
  CompiledProblem compiled;
  WassersteinSet ambiguity;
};

// Remaining horizon after `realized` stages, with the known prefix folded
// into x_init. Stage 1 of the remainder is the padding stage carrying the
// already-realized demand slot: its disturbance is inert (zero input matrix,
// sample anchors at the support floor, single segment, masked from every
// policy), so the Wasserstein transport cost through it is exactly zero.
RemainderProblem build_remainder(const InventorySpec& spec,
                                 const std::vector<std::vector<double>>& train, int realized,
                                 double x_init) {
  const int H = spec.horizon - realized + 1;
  std::vector<double> lo(static_cast<std::size_t>(H), spec.support_lo);
  std::vector<double> hi(static_cast<std::size_t>(H), spec.support_hi);
  SystemModel model = inventory_system(spec, H, x_init, true, lo, hi);
  LiftingSpec lifting = inventory_lifting(model.space, spec.segments, true);
  InformationMask mask = inventory_mask(model, true);

  RemainderProblem out;
  out.compiled = compile(model, lifting, mask);
  out.ambiguity.radius = spec.radius;
  for (const auto& s : train) {
    std::vector<double> tail;
    tail.push_back(spec.support_lo);  // padding anchor at the floor
    for (int t = realized; t < spec.horizon; ++t)
      tail.push_back(s[static_cast<std::size_t>(t)]);
    out.ambiguity.samples.push_back(std::move(tail));
  }
  return out;
}

// Minimal-cost lot cover used only if a step's MILP cannot be solved.
Eigen::VectorXd fallback_lots(const InventorySpec& spec, double x_init) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(spec.num_lots);
  double level = x_init;
  for (int k = 0; k < spec.num_lots && level < 0.0; ++k) {
    g(k) = 1.0;
    level += spec.lot_size[static_cast<std::size_t>(k)];
  }
  return g;
}

}  // namespace

ClosedLoopSummary run_closed_loop(const InventorySpec& spec_in, int num_sims,
                                  const SolverChoice& choice, std::uint64_t eval_seed) {
  InventorySpec spec = spec_in;
  spec.finalize();
  const int T = spec.horizon;
  const int K = spec.num_lots;

  OpenLoopResult open = run_open_loop(spec, choice);
  if (open.policy.empty())
    throw NumericalFailure("closed loop: open-loop problem not solved (" + open.status + ")");
  InventoryProblem prob = build_inventory(spec);
  const double u_first =
      open.policy[static_cast<std::size_t>(prob.compiled.layout.y0[0][0])];

  const auto truths = sample_demands(spec, num_sims, eval_seed);

  ClosedLoopSummary summary;
  // one remainder policy per step, reused across simulations via caching of
  // x_init would not apply (x_init varies); solve per (sim, step)
  for (int sim = 0; sim < num_sims; ++sim) {
    ClosedLoopSim rec;
    rec.sim_id = sim;
    double x = spec.x0;
    double u_imp = u_first;
    for (int t = 1; t <= T; ++t) {
      const double xi_t = truths[static_cast<std::size_t>(sim)][static_cast<std::size_t>(t - 1)];
      const double x_init = x + u_imp - xi_t;

      RemainderProblem rem =
          build_remainder(spec, prob.ambiguity.samples, t, x_init);
      ReformulationOptions ropts;
      ropts.policy_bounds = inventory_policy_bounds();
      BuiltModel built = build_wasserstein(rem.compiled, rem.ambiguity, ropts);
      milp::SolveResult res = solve_built(built.model, choice);
      ++rec.steps_solved;
      ++summary.milp_solves;

      Eigen::VectorXd gamma(K);
      double u_next = 0.0;
      if (res.has_solution()) {
        const auto policy = extract_policy(res.x, built.info);
        for (int k = 0; k < K; ++k)
          gamma(k) = std::round(policy[static_cast<std::size_t>(
              rem.compiled.layout.z0[0][static_cast<std::size_t>(k)])]);
        if (t < T)
          u_next = policy[static_cast<std::size_t>(rem.compiled.layout.y0[1][0])];
      } else {
        gamma = fallback_lots(spec, x_init);
        u_next = spec.support_hi;
      }

      double delivered = 0.0, lot_cost = 0.0;
      for (int k = 0; k < K; ++k) {
        delivered += spec.lot_size[static_cast<std::size_t>(k)] * gamma(k);
        lot_cost += spec.lot_price[static_cast<std::size_t>(k)] *
                    spec.lot_size[static_cast<std::size_t>(k)] * gamma(k);
      }
      const double x_next = x_init + delivered;
      rec.total_cost += spec.holding * x_next + spec.booking * u_imp + lot_cost;
      x = x_next;
      u_imp = t < T ? u_next : 0.0;
    }
    summary.sims.push_back(rec);
  }

  double acc = 0.0;
  for (const auto& s : summary.sims) acc += s.total_cost;
  summary.mean_cost = acc / num_sims;
  double var = 0.0;
  for (const auto& s : summary.sims) {
    const double d = s.total_cost - summary.mean_cost;
    var += d * d;
  }
  summary.stddev_cost = num_sims > 1 ? std::sqrt(var / (num_sims - 1)) : 0.0;
  return summary;
}

void write_closed_loop_csv(const std::string& path, const ClosedLoopSummary& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "sim_id,total_cost,steps_solved\n";
  for (const auto& s : summary.sims)
    out << s.sim_id << "," << fmt(s.total_cost) << "," << s.steps_solved << "\n";
  out << "# mean_cost=" << fmt(summary.mean_cost) << " stddev_cost="
      << fmt(summary.stddev_cost) << " milp_solves=" << summary.milp_solves << "\n";
}

}  // namespace drlcp
