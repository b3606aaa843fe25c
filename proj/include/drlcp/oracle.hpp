#pragma once

#include <cstdint>
#include <vector>

#include "drlcp/lifting.hpp"
#include "drlcp/system_model.hpp"

namespace drlcp::oracle {

/// Everything the numeric worst-case routines need about one scenario:
/// the piecewise max-affine objective over the lifted vector, the support
/// geometry and the empirical samples.
struct ScenarioData {
  NumericPieces pieces;
  SegmentGeometry geo;
  BlockIndex index;
  std::vector<std::vector<double>> samples;  // anchor trajectories, stage-major
  double radius = 0.0;
};

/// max over the lifted support of  max_k g_k . z + h_k - lambda * |R z - sample|_1,
/// computed blockwise; candidate points per block are the segment endpoints
/// plus the penalty kink at the anchor value.
double inner_max(const ScenarioData& data, const std::vector<double>& sample, double lambda);

struct WorstCaseResult {
  double value = 0.0;
  double lambda = 0.0;
};

/// Worst-case expectation over the Wasserstein ball: minimizes the convex
/// dual function lambda * radius + mean of inner maxima by golden-section
/// search over [0, Lambda_max], Lambda_max being the largest slope of any
/// piece along any segment.
WorstCaseResult worst_case_expectation(const ScenarioData& data);

/// Probability-weighted sum of per-event worst-case expectations.
double event_wise_worst_case(const std::vector<ScenarioData>& events,
                             const std::vector<double>& probabilities);

/// Pieces tilted by mean-bound multipliers: every continuous entry of block c
/// gains (beta_lower[c] - beta_upper[c]).
NumericPieces tilt_pieces(const NumericPieces& pieces, const BlockIndex& index,
                          const std::vector<double>& beta_lower,
                          const std::vector<double>& beta_upper);

struct MomentCheckResult {
  double value = 0.0;  // certified upper bound on the worst-case expectation
  std::vector<double> beta_lower;
  std::vector<double> beta_upper;
};

/// Upper-bound certificate for the mean-constrained worst case: coordinate
/// descent over the nonnegative multipliers, each line search by golden
/// section. Any multiplier choice gives a valid upper bound; this routine
/// does not certify tightness.
MomentCheckResult check_mixed_moment(const ScenarioData& data,
                                     const std::vector<double>& mean_lower,
                                     const std::vector<double>& mean_upper,
                                     int sweeps = 8);

struct RobustCheckResult {
  double max_violation = 0.0;  // over the exact blockwise decomposition
  double max_sampled_violation = 0.0;
  int worst_row = -1;
};

/// Exact feasibility margin of numeric robust rows e z <= m over the lifted
/// support (blockwise endpoint maxima), cross-checked on uniform random
/// support points.
RobustCheckResult check_robust_feasibility(const NumericConstraints& rows,
                                           const SegmentGeometry& geo, const BlockIndex& index,
                                           const DisturbanceSpace& space,
                                           const LiftingSpec& spec, std::uint64_t seed,
                                           int num_samples = 100000);

}  // namespace drlcp::oracle
