#pragma once

#include <vector>

#include "drlcp/errors.hpp"

namespace drlcp {

/// Hyperrectangular disturbance support over a finite horizon: one interval
/// [lower[t][i], upper[t][i]] per stage t and per-stage dimension i.
struct DisturbanceSpace {
  int horizon = 0;         // T
  int dims_per_stage = 0;  // n_xi
  std::vector<std::vector<double>> lower;  // [t][i]
  std::vector<std::vector<double>> upper;  // [t][i]

  static DisturbanceSpace box(int horizon, int dims_per_stage, double lo, double hi);

  int total_dim() const { return horizon * dims_per_stage; }
  void validate() const;
  /// Componentwise membership with absolute tolerance.
  bool contains(const std::vector<double>& xi, double tol = 1e-12) const;
};

/// Per-dimension breakpoint grids. grid[t][i] holds the sorted list
/// w_0 <= ... <= w_p including both support endpoints; the number of
/// segments for (t, i) is grid[t][i].size() - 1.
struct LiftingSpec {
  std::vector<std::vector<std::vector<double>>> grid;

  /// p segments per dimension, breakpoints at equal division points.
  static LiftingSpec equal_division(const DisturbanceSpace& space, int segments);
  /// Same grid structure with caller-supplied interior breakpoints shared by
  /// every dimension is built by the caller directly.

  int segments(int t, int i) const {
    return static_cast<int>(grid[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)].size()) - 1;
  }
  /// Rejects grids whose endpoints disagree with the support, out-of-order
  /// breakpoints, and zero-length segments.
  void validate(const DisturbanceSpace& space) const;
  /// True iff every dimension has a single segment, i.e. the policy class
  /// reduces to plain affine feedback.
  bool degenerates_to_affine() const;
};

bool policy_degenerates_to_affine(const LiftingSpec& spec);

/// Locates each (t, i) block inside the stacked lifted vector. Within a
/// block the layout is the p continuous entries followed by the p-1
/// indicator entries, blocks ordered stage-major then dimension.
struct BlockIndex {
  struct Block {
    int v_offset = 0;  // first continuous entry
    int q_offset = 0;  // first indicator entry (v_offset + p)
    int p = 0;         // segment count
  };
  std::vector<std::vector<Block>> blocks;  // [t][i]
  int total_dim = 0;

  static BlockIndex build(const LiftingSpec& spec);

  const Block& at(int t, int i) const {
    return blocks[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
  }
  /// Dimension of the continuous part of the lifted disturbance up to and
  /// including stage t (0-based stage index).
  int n_v_prefix(int t) const;
  /// Same for the indicator part.
  int n_q_prefix(int t) const;
};

/// A point of the lifted support, stored flat in the canonical block order.
struct LiftedPoint {
  std::vector<double> z;
};

/// Endpoint data of the line segments making up the lifted support of one
/// scalar dimension: the lift of the left breakpoint and the left limit of
/// the lift at the right breakpoint. Both are slices of length 2p-1 in the
/// block-local layout (V entries then Q entries).
struct SegmentEndpoints {
  double w_lo = 0.0;  // recovered value of phi_lo
  double w_hi = 0.0;  // recovered value of phi_hi
  std::vector<double> phi_lo;
  std::vector<double> phi_hi;
};

struct SegmentGeometry {
  std::vector<std::vector<std::vector<SegmentEndpoints>>> segments;  // [t][i][j]
};

/// Lift one scalar against a single grid; returns the 2p-1 block entries.
std::vector<double> lift_scalar(const std::vector<double>& grid, double xi);

/// Map a disturbance trajectory (stage-major, length T*n_xi) into the lifted
/// vector. Throws OutOfSupport when a component is outside the box beyond
/// the tolerance; components within tolerance are clamped first.
LiftedPoint lift(const DisturbanceSpace& space, const LiftingSpec& spec,
                 const std::vector<double>& xi, double tol = 1e-12);

/// Inverse of lift: per-dimension sum of the continuous entries.
std::vector<double> recover(const LiftingSpec& spec, const LiftedPoint& zstar);

SegmentGeometry segment_endpoints(const DisturbanceSpace& space, const LiftingSpec& spec);

}  // namespace drlcp
