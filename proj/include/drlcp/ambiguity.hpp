#pragma once

#include <string>
#include <vector>

#include "drlcp/lifting.hpp"
#include "drlcp/milp/model.hpp"

namespace drlcp {

/// Ball of radius `radius` (1-Wasserstein, 1-norm ground metric) around the
/// empirical distribution of `samples`. Each sample is a full disturbance
/// trajectory, stage-major, of length space.total_dim().
struct WassersteinSet {
  double radius = 0.0;
  std::vector<std::vector<double>> samples;

  int count() const { return static_cast<int>(samples.size()); }
  void validate(const DisturbanceSpace& space) const;
};

/// Wasserstein ball intersected with componentwise mean bounds
/// mean_lower <= E[xi] <= mean_upper.
struct MixedMomentSet {
  WassersteinSet base;
  std::vector<double> mean_lower;  // length total_dim
  std::vector<double> mean_upper;

  void validate(const DisturbanceSpace& space) const;
};

/// Mixture of conditional Wasserstein balls: with probability prob[l] the
/// disturbance follows a distribution from set l, whose support may differ
/// per event. Probabilities must sum to one.
struct EventWiseSet {
  std::vector<double> probabilities;
  std::vector<WassersteinSet> events;

  int count() const { return static_cast<int>(events.size()); }
  void validate(const std::vector<DisturbanceSpace>& supports) const;
};

/// Reads samples from CSV text: one row per sample, comma-separated values,
/// blank lines and lines starting with '#' skipped. Every row must have
/// space.total_dim() columns and lie inside the support.
std::vector<std::vector<double>> load_samples(const std::string& path,
                                              const DisturbanceSpace& space);
std::vector<std::vector<double>> parse_samples(const std::string& text,
                                               const DisturbanceSpace& space);

/// Exact 1-Wasserstein distance (1-norm ground metric) between the uniform
/// empirical distributions of two sample sets, via the transportation linear
/// program. Intended for radius calibration from a held-out split.
double estimate_radius(const std::vector<std::vector<double>>& a,
                       const std::vector<std::vector<double>>& b);

}  // namespace drlcp
