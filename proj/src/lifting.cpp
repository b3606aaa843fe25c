#include "drlcp/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace drlcp {

DisturbanceSpace DisturbanceSpace::box(int horizon, int dims_per_stage, double lo, double hi) {
  DisturbanceSpace s;
  s.horizon = horizon;
  s.dims_per_stage = dims_per_stage;
  s.lower.assign(static_cast<std::size_t>(horizon),
                 std::vector<double>(static_cast<std::size_t>(dims_per_stage), lo));
  s.upper.assign(static_cast<std::size_t>(horizon),
                 std::vector<double>(static_cast<std::size_t>(dims_per_stage), hi));
  s.validate();
  return s;
}

void DisturbanceSpace::validate() const {
  if (horizon <= 0 || dims_per_stage <= 0)
    throw ShapeMismatch("DisturbanceSpace: horizon and dims_per_stage must be positive");
  if (lower.size() != static_cast<std::size_t>(horizon) ||
      upper.size() != static_cast<std::size_t>(horizon))
    throw ShapeMismatch("DisturbanceSpace: bound lists must have one entry per stage");
  for (int t = 0; t < horizon; ++t) {
    const auto& lo = lower[static_cast<std::size_t>(t)];
    const auto& hi = upper[static_cast<std::size_t>(t)];
    if (lo.size() != static_cast<std::size_t>(dims_per_stage) ||
        hi.size() != static_cast<std::size_t>(dims_per_stage))
      throw ShapeMismatch("DisturbanceSpace: per-stage bound size mismatch");
    for (int i = 0; i < dims_per_stage; ++i) {
      if (!(lo[static_cast<std::size_t>(i)] <= hi[static_cast<std::size_t>(i)]))
        throw ShapeMismatch("DisturbanceSpace: lower > upper at stage " + std::to_string(t));
    }
  }
}

bool DisturbanceSpace::contains(const std::vector<double>& xi, double tol) const {
  if (xi.size() != static_cast<std::size_t>(total_dim())) return false;
  std::size_t k = 0;
  for (int t = 0; t < horizon; ++t)
    for (int i = 0; i < dims_per_stage; ++i, ++k) {
      double lo = lower[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      double hi = upper[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      if (xi[k] < lo - tol || xi[k] > hi + tol) return false;
    }
  return true;
}

LiftingSpec LiftingSpec::equal_division(const DisturbanceSpace& space, int segments) {
  if (segments < 1) throw ShapeMismatch("LiftingSpec: segment count must be >= 1");
  LiftingSpec spec;
  spec.grid.resize(static_cast<std::size_t>(space.horizon));
  for (int t = 0; t < space.horizon; ++t) {
    auto& stage = spec.grid[static_cast<std::size_t>(t)];
    stage.resize(static_cast<std::size_t>(space.dims_per_stage));
    for (int i = 0; i < space.dims_per_stage; ++i) {
      double lo = space.lower[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      double hi = space.upper[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      auto& g = stage[static_cast<std::size_t>(i)];
      g.resize(static_cast<std::size_t>(segments) + 1);
      for (int j = 0; j <= segments; ++j)
        g[static_cast<std::size_t>(j)] = lo + (hi - lo) * j / segments;
      g.front() = lo;
      g.back() = hi;
    }
  }
  spec.validate(space);
  return spec;
}

void LiftingSpec::validate(const DisturbanceSpace& space) const {
  space.validate();
  if (grid.size() != static_cast<std::size_t>(space.horizon))
    throw ShapeMismatch("LiftingSpec: grid must have one entry per stage");
  for (int t = 0; t < space.horizon; ++t) {
    const auto& stage = grid[static_cast<std::size_t>(t)];
    if (stage.size() != static_cast<std::size_t>(space.dims_per_stage))
      throw ShapeMismatch("LiftingSpec: grid stage size mismatch");
    for (int i = 0; i < space.dims_per_stage; ++i) {
      const auto& g = stage[static_cast<std::size_t>(i)];
      if (g.size() < 2)
        throw ShapeMismatch("LiftingSpec: a grid needs both support endpoints");
      double lo = space.lower[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      double hi = space.upper[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      if (g.front() != lo || g.back() != hi)
        throw ShapeMismatch("LiftingSpec: grid endpoints must equal the support bounds");
      for (std::size_t j = 1; j < g.size(); ++j) {
        if (g[j] < g[j - 1])
          throw ShapeMismatch("LiftingSpec: breakpoints must be nondecreasing");
        if (g[j] == g[j - 1])
          throw ShapeMismatch(
              "LiftingSpec: zero-length segment at stage " + std::to_string(t) +
              ", dim " + std::to_string(i) + " (duplicate breakpoint " +
              std::to_string(g[j]) + ")");
      }
    }
  }
}

bool LiftingSpec::degenerates_to_affine() const {
  for (const auto& stage : grid)
    for (const auto& g : stage)
      if (g.size() != 2) return false;
  return true;
}

bool policy_degenerates_to_affine(const LiftingSpec& spec) {
  return spec.degenerates_to_affine();
}

BlockIndex BlockIndex::build(const LiftingSpec& spec) {
  BlockIndex idx;
  idx.blocks.resize(spec.grid.size());
  int offset = 0;
  for (std::size_t t = 0; t < spec.grid.size(); ++t) {
    idx.blocks[t].resize(spec.grid[t].size());
    for (std::size_t i = 0; i < spec.grid[t].size(); ++i) {
      int p = static_cast<int>(spec.grid[t][i].size()) - 1;
      idx.blocks[t][i] = Block{offset, offset + p, p};
      offset += 2 * p - 1;
    }
  }
  idx.total_dim = offset;
  return idx;
}

int BlockIndex::n_v_prefix(int t) const {
  int n = 0;
  for (int tt = 0; tt <= t; ++tt)
    for (const auto& b : blocks[static_cast<std::size_t>(tt)]) n += b.p;
  return n;
}

int BlockIndex::n_q_prefix(int t) const {
  int n = 0;
  for (int tt = 0; tt <= t; ++tt)
    for (const auto& b : blocks[static_cast<std::size_t>(tt)]) n += b.p - 1;
  return n;
}

std::vector<double> lift_scalar(const std::vector<double>& grid, double xi) {
  int p = static_cast<int>(grid.size()) - 1;
  std::vector<double> out(static_cast<std::size_t>(2 * p - 1), 0.0);
  out[0] = std::min(xi, grid[1]);
  for (int j = 2; j <= p; ++j)
    out[static_cast<std::size_t>(j - 1)] =
        std::max(std::min(xi, grid[static_cast<std::size_t>(j)]) -
                     grid[static_cast<std::size_t>(j - 1)],
                 0.0);
  for (int j = 1; j <= p - 1; ++j)
    out[static_cast<std::size_t>(p + j - 1)] = xi >= grid[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
  return out;
}

namespace {

// Left limit of the scalar lift as xi approaches grid[j] from below,
// j in [1, p]. The continuous part matches the lift at grid[j]; the
// indicator at position j (when j <= p-1) stays 0.
std::vector<double> lift_scalar_left_limit(const std::vector<double>& grid, int j) {
  int p = static_cast<int>(grid.size()) - 1;
  double w = grid[static_cast<std::size_t>(j)];
  std::vector<double> out = lift_scalar(grid, w);
  for (int k = 1; k <= p - 1; ++k)
    out[static_cast<std::size_t>(p + k - 1)] = w > grid[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
  return out;
}

}  // namespace

LiftedPoint lift(const DisturbanceSpace& space, const LiftingSpec& spec,
                 const std::vector<double>& xi, double tol) {
  if (xi.size() != static_cast<std::size_t>(space.total_dim()))
    throw ShapeMismatch("lift: disturbance vector has wrong dimension");
  LiftedPoint z;
  std::size_t k = 0;
  for (int t = 0; t < space.horizon; ++t)
    for (int i = 0; i < space.dims_per_stage; ++i, ++k) {
      double lo = space.lower[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      double hi = space.upper[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      double x = xi[k];
      if (x < lo - tol || x > hi + tol)
        throw OutOfSupport("lift: component (" + std::to_string(t) + ", " +
                           std::to_string(i) + ") = " + std::to_string(x) +
                           " outside [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
      x = std::clamp(x, lo, hi);
      auto block = lift_scalar(spec.grid[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)], x);
      z.z.insert(z.z.end(), block.begin(), block.end());
    }
  return z;
}

std::vector<double> recover(const LiftingSpec& spec, const LiftedPoint& zstar) {
  std::vector<double> xi;
  std::size_t pos = 0;
  for (const auto& stage : spec.grid)
    for (const auto& g : stage) {
      std::size_t p = g.size() - 1;
      if (pos + 2 * p - 1 > zstar.z.size())
        throw ShapeMismatch("recover: lifted vector shorter than the block layout");
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) s += zstar.z[pos + j];
      xi.push_back(s);
      pos += 2 * p - 1;
    }
  if (pos != zstar.z.size())
    throw ShapeMismatch("recover: lifted vector longer than the block layout");
  return xi;
}

SegmentGeometry segment_endpoints(const DisturbanceSpace& space, const LiftingSpec& spec) {
  spec.validate(space);
  SegmentGeometry geom;
  geom.segments.resize(spec.grid.size());
  for (std::size_t t = 0; t < spec.grid.size(); ++t) {
    geom.segments[t].resize(spec.grid[t].size());
    for (std::size_t i = 0; i < spec.grid[t].size(); ++i) {
      const auto& g = spec.grid[t][i];
      int p = static_cast<int>(g.size()) - 1;
      auto& segs = geom.segments[t][i];
      segs.resize(static_cast<std::size_t>(p));
      for (int j = 1; j <= p; ++j) {
        SegmentEndpoints& s = segs[static_cast<std::size_t>(j - 1)];
        s.w_lo = g[static_cast<std::size_t>(j - 1)];
        s.w_hi = g[static_cast<std::size_t>(j)];
        s.phi_lo = lift_scalar(g, s.w_lo);
        s.phi_hi = lift_scalar_left_limit(g, j);
      }
    }
  }
  return geom;
}

}  // namespace drlcp
