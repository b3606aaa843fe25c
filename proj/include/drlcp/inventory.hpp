#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drlcp/milp/model.hpp"
#include "drlcp/reformulation.hpp"
#include "drlcp/system_model.hpp"

namespace drlcp {

/// Single-item inventory control: order quantity u_t is booked before the
/// demand of stage t realizes, integer lot orders gamma_{t,k} (size
/// lot_size[k], unit price lot_price[k]) are placed after, leftover stock is
/// held at unit price `holding`. Demands live in [support_lo, support_hi].
struct InventorySpec {
  int horizon = 4;
  int num_lots = 3;
  double holding = 5.0;       // a
  double booking = 2.0;       // b
  std::vector<double> lot_price;  // c_k, defaults to 5 each; must exceed booking
  std::vector<double> lot_size;   // q_k, defaults to 30 each
  double support_lo = 20.0;
  double support_hi = 100.0;
  double x0 = 0.0;
  int segments = 2;  // p, equal-division breakpoints
  int num_samples = 20;
  double radius = 1.0;  // Wasserstein radius
  double sigma = 1.0;   // demand standard deviation
  std::vector<double> mean;  // per-stage demand mean; defaults to 50,30,70,30,...
  std::uint64_t sample_seed = 20240901;

  /// Fills defaulted vectors and validates ranges.
  void finalize();
};

struct InventoryProblem {
  InventorySpec spec;
  SystemModel model;
  LiftingSpec lifting;
  InformationMask mask;
  CompiledProblem compiled;
  WassersteinSet ambiguity;  // radius + generated samples
};

/// Demand trajectories from independent per-stage Gaussians truncated to the
/// support by rejection.
std::vector<std::vector<double>> sample_demands(const InventorySpec& spec, int count,
                                                std::uint64_t seed);

InventoryProblem build_inventory(const InventorySpec& spec);

/// Tightest integer boxes that lose no feasible ordering policy: each
/// indicator gain changes a 0/1 output by at most one, the offset is the
/// output at the lowest demand.
PolicyBounds inventory_policy_bounds(double y_abs = 1000.0);

struct SolverChoice {
  std::string external_command;  // empty: built-in branch and bound
  milp::SolveOptions options;
  std::string work_dir;  // scratch space for the external adapter
};

milp::SolveResult solve_built(const milp::MilpModel& model, const SolverChoice& choice);

struct OpenLoopResult {
  int horizon = 0;
  int segments = 0;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  double time_s = 0.0;
  std::string status;
  double certified = 0.0;  // oracle value of the worst-case expectation at the solution
  std::vector<double> policy;
  BuildInfo info;
};

OpenLoopResult run_open_loop(const InventorySpec& spec, const SolverChoice& choice);
void write_open_loop_csv(const std::string& path, const std::vector<OpenLoopResult>& rows);

struct ClosedLoopSim {
  int sim_id = 0;
  double total_cost = 0.0;
  int steps_solved = 0;
};

struct ClosedLoopSummary {
  std::vector<ClosedLoopSim> sims;
  double mean_cost = 0.0;
  double stddev_cost = 0.0;
  long milp_solves = 0;
};

/// Shrinking-horizon evaluation: the stage-1 order comes from the open-loop
/// solution; after each realized demand the remaining horizon is re-solved
/// with the realized prefix folded into the initial state and a masked
/// zero-impact padding stage standing in for the realized disturbance slot.
ClosedLoopSummary run_closed_loop(const InventorySpec& spec, int num_sims,
                                  const SolverChoice& choice, std::uint64_t eval_seed);
void write_closed_loop_csv(const std::string& path, const ClosedLoopSummary& summary);

}  // namespace drlcp
