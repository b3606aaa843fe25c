#pragma once

#include <vector>

#include "drlcp/ambiguity.hpp"
#include "drlcp/milp/model.hpp"
#include "drlcp/system_model.hpp"

namespace drlcp {

struct ReformulationOptions {
  PolicyBounds policy_bounds;
  long max_model_vars = 500000;
  long max_model_rows = 2000000;
};

/// Where the pieces of one scenario live inside the assembled MILP.
struct BuildInfo {
  int policy_offset = 0;
  int num_policy_vars = 0;
  int lambda_var = -1;            // -1 when the multiplier was fixed numerically
  std::vector<int> eta_vars;      // one epigraph variable per sample
  std::vector<int> beta_lower_vars;  // mean-bound multipliers (mixed set only)
  std::vector<int> beta_upper_vars;
  long epigraph_rows = 0;
  long robust_rows = 0;
};

struct BuiltModel {
  milp::MilpModel model;
  BuildInfo info;
};

/// Epigraph rows of the worst-case expectation for one sample: couples the
/// per-sample variable eta to the cost pieces max_k d[k] . z + r[k] through
/// per-block majorization variables and segment-endpoint cuts. `lambda` may
/// reference a model variable or be a fixed constant. `tilt_lower` and
/// `tilt_upper`, when non-empty, hold one multiplier variable id per
/// disturbance component and shift the piece slopes for the mean-bound
/// variant. Piece coefficients referencing decision variables are shifted by
/// `policy_offset`.
long add_epigraph_rows(milp::MilpModel& m, const std::vector<AffineVec>& d,
                       const AffineVec& r, const BlockIndex& index,
                       const SegmentGeometry& geo, const std::vector<double>& sample,
                       const AffineExpr& lambda, int eta_var, int policy_offset,
                       const std::vector<int>& tilt_lower, const std::vector<int>& tilt_upper,
                       const std::string& prefix);

/// Rows forcing rows m[r] >= e[r] . z to hold over the whole lifted support,
/// one majorization variable per (row, block).
long add_robust_rows(milp::MilpModel& m, const std::vector<AffineVec>& e,
                     const AffineVec& bound, const BlockIndex& index,
                     const SegmentGeometry& geo, int policy_offset,
                     const std::string& prefix);

BuiltModel build_wasserstein(const CompiledProblem& cp, const WassersteinSet& set,
                             const ReformulationOptions& options = {});

BuiltModel build_mixed_moment(const CompiledProblem& cp, const MixedMomentSet& set,
                              const ReformulationOptions& options = {});

struct EventWiseBuilt {
  milp::MilpModel model;
  std::vector<BuildInfo> events;
};

/// One policy, multiplier and epigraph block per event, coupled only through
/// the probability-weighted objective.
EventWiseBuilt build_event_wise(const std::vector<CompiledProblem>& problems,
                                const EventWiseSet& set,
                                const ReformulationOptions& options = {});

/// Slice of the solution vector holding the policy values, in layout order.
std::vector<double> extract_policy(const std::vector<double>& x, const BuildInfo& info);

}  // namespace drlcp
