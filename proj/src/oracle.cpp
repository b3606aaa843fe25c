#include "drlcp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace drlcp::oracle {

namespace {

double slice_dot(const Eigen::VectorXd& g, int offset, const std::vector<double>& phi) {
  double acc = 0.0;
  for (std::size_t z = 0; z < phi.size(); ++z)
    acc += g(offset + static_cast<int>(z)) * phi[z];
  return acc;
}

// max over one block's lifted support of g . phi - lambda * |w - anchor|
double block_max(const Eigen::VectorXd& g, const BlockIndex::Block& blk,
                 const std::vector<SegmentEndpoints>& segs, double anchor, double lambda) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& seg : segs) {
    const double v_lo = slice_dot(g, blk.v_offset, seg.phi_lo) -
                        lambda * std::abs(seg.w_lo - anchor);
    const double v_hi = slice_dot(g, blk.v_offset, seg.phi_hi) -
                        lambda * std::abs(seg.w_hi - anchor);
    best = std::max({best, v_lo, v_hi});
    if (seg.w_lo < anchor && anchor < seg.w_hi) {
      const double frac = (anchor - seg.w_lo) / (seg.w_hi - seg.w_lo);
      double v_mid = 0.0;
      for (std::size_t z = 0; z < seg.phi_lo.size(); ++z)
        v_mid += g(blk.v_offset + static_cast<int>(z)) *
                 (seg.phi_lo[z] + frac * (seg.phi_hi[z] - seg.phi_lo[z]));
      best = std::max(best, v_mid);
    }
  }
  return best;
}

// g . phi at the exact lift of the anchor, interpolated inside its segment.
double block_value_at(const Eigen::VectorXd& g, const BlockIndex::Block& blk,
                      const std::vector<SegmentEndpoints>& segs, double w) {
  const SegmentEndpoints* seg = &segs.back();
  for (const auto& s : segs)
    if (w >= s.w_lo && w < s.w_hi) {
      seg = &s;
      break;
    }
  const double frac = (w - seg->w_lo) / (seg->w_hi - seg->w_lo);
  double acc = 0.0;
  for (std::size_t z = 0; z < seg->phi_lo.size(); ++z)
    acc += g(blk.v_offset + static_cast<int>(z)) *
           (seg->phi_lo[z] + frac * (seg->phi_hi[z] - seg->phi_lo[z]));
  return acc;
}

// Smallest multiplier beyond which every per-block inner maximum is pinned
// at its anchor, so the dual function is nondecreasing from there on. The
// piecewise objective jumps at breakpoints, so a segment-slope bound is not
// enough; the bound has to compare every candidate point against the anchor
// value directly.
double lambda_upper_bound(const ScenarioData& data) {
  double cap = 0.0;
  for (const auto& sample : data.samples)
    for (const auto& g : data.pieces.g)
      for (std::size_t t = 0; t < data.geo.segments.size(); ++t)
        for (std::size_t i = 0; i < data.geo.segments[t].size(); ++i) {
          const auto& blk = data.index.at(static_cast<int>(t), static_cast<int>(i));
          const auto& segs = data.geo.segments[t][i];
          const double anchor =
              sample[t * data.geo.segments[t].size() + i];
          const double v_anchor = block_value_at(g, blk, segs, anchor);
          for (const auto& seg : segs) {
            const double d_lo = std::abs(seg.w_lo - anchor);
            if (d_lo > 0.0)
              cap = std::max(cap,
                             (slice_dot(g, blk.v_offset, seg.phi_lo) - v_anchor) / d_lo);
            const double d_hi = std::abs(seg.w_hi - anchor);
            if (d_hi > 0.0)
              cap = std::max(cap,
                             (slice_dot(g, blk.v_offset, seg.phi_hi) - v_anchor) / d_hi);
          }
        }
  return cap;
}

template <typename F>
double golden_minimize(F f, double lo, double hi, double tol, double* arg = nullptr) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  // convex objective: also probe the original endpoints
  const double mid = 0.5 * (a + b);
  double best_x = mid, best = f(mid);
  for (double x : {lo, hi, c, d}) {
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  if (arg) *arg = best_x;
  return best;
}

}  // namespace

double inner_max(const ScenarioData& data, const std::vector<double>& sample, double lambda) {
  const auto& segs = data.geo.segments;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < data.pieces.g.size(); ++k) {
    double acc = data.pieces.h[k];
    for (std::size_t t = 0; t < segs.size(); ++t)
      for (std::size_t i = 0; i < segs[t].size(); ++i) {
        const int n = static_cast<int>(segs[t].size());
        const double anchor = sample[t * static_cast<std::size_t>(n) + i];
        acc += block_max(data.pieces.g[k],
                         data.index.at(static_cast<int>(t), static_cast<int>(i)), segs[t][i],
                         anchor, lambda);
      }
    best = std::max(best, acc);
  }
  return best;
}

WorstCaseResult worst_case_expectation(const ScenarioData& data) {
  if (data.samples.empty()) throw ShapeMismatch("oracle: no samples");
  const double lam_max = lambda_upper_bound(data) + 1.0;
  auto dual = [&](double lam) {
    double acc = lam * data.radius;
    for (const auto& s : data.samples) acc += inner_max(data, s, lam) / data.samples.size();
    return acc;
  };
  WorstCaseResult res;
  res.value = golden_minimize(dual, 0.0, lam_max,
                              1e-10 * std::max(1.0, lam_max), &res.lambda);
  return res;
}

double event_wise_worst_case(const std::vector<ScenarioData>& events,
                             const std::vector<double>& probabilities) {
  if (events.size() != probabilities.size())
    throw ShapeMismatch("oracle: event count mismatch");
  double acc = 0.0;
  for (std::size_t l = 0; l < events.size(); ++l)
    if (probabilities[l] > 0.0) acc += probabilities[l] * worst_case_expectation(events[l]).value;
  return acc;
}

NumericPieces tilt_pieces(const NumericPieces& pieces, const BlockIndex& index,
                          const std::vector<double>& beta_lower,
                          const std::vector<double>& beta_upper) {
  NumericPieces out = pieces;
  for (auto& g : out.g) {
    std::size_t comp = 0;
    for (const auto& stage : index.blocks)
      for (const auto& blk : stage) {
        const double shift = beta_lower[comp] - beta_upper[comp];
        for (int j = 0; j < blk.p; ++j) g(blk.v_offset + j) += shift;
        ++comp;
      }
  }
  return out;
}

MomentCheckResult check_mixed_moment(const ScenarioData& data,
                                     const std::vector<double>& mean_lower,
                                     const std::vector<double>& mean_upper, int sweeps) {
  const std::size_t dim = mean_lower.size();
  if (mean_upper.size() != dim) throw ShapeMismatch("oracle: mean bound length mismatch");

  MomentCheckResult res;
  res.beta_lower.assign(dim, 0.0);
  res.beta_upper.assign(dim, 0.0);

  auto objective = [&](const std::vector<double>& bl, const std::vector<double>& bu) {
    ScenarioData tilted = data;
    tilted.pieces = tilt_pieces(data.pieces, data.index, bl, bu);
    double acc = worst_case_expectation(tilted).value;
    for (std::size_t c = 0; c < dim; ++c)
      acc += -bl[c] * mean_lower[c] + bu[c] * mean_upper[c];
    return acc;
  };

  res.value = objective(res.beta_lower, res.beta_upper);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double improved = 0.0;
    for (int side = 0; side < 2; ++side)
      for (std::size_t c = 0; c < dim; ++c) {
        auto& beta = side == 0 ? res.beta_lower : res.beta_upper;
        auto line = [&](double v) {
          const double keep = beta[c];
          beta[c] = v;
          const double val = objective(res.beta_lower, res.beta_upper);
          beta[c] = keep;
          return val;
        };
        // expand the bracket until the line objective stops improving
        double hi = std::max(1.0, 2.0 * beta[c]);
        while (line(hi) < line(0.5 * hi) && hi < 1e6) hi *= 2.0;
        double arg = beta[c];
        const double val = golden_minimize(line, 0.0, hi, 1e-7 * hi, &arg);
        if (val < res.value - 1e-12) {
          improved += res.value - val;
          res.value = val;
          beta[c] = arg;
        }
      }
    if (improved < 1e-9) break;
  }
  return res;
}

RobustCheckResult check_robust_feasibility(const NumericConstraints& rows,
                                           const SegmentGeometry& geo, const BlockIndex& index,
                                           const DisturbanceSpace& space,
                                           const LiftingSpec& spec, std::uint64_t seed,
                                           int num_samples) {
  RobustCheckResult res;
  res.max_violation = -std::numeric_limits<double>::infinity();
  const int nr = static_cast<int>(rows.e.rows());
  if (nr == 0) {
    res.max_violation = 0.0;
    return res;
  }
  for (int r = 0; r < nr; ++r) {
    double acc = -rows.m(r);
    for (std::size_t t = 0; t < geo.segments.size(); ++t)
      for (std::size_t i = 0; i < geo.segments[t].size(); ++i) {
        const auto& blk = index.at(static_cast<int>(t), static_cast<int>(i));
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& seg : geo.segments[t][i]) {
          double v_lo = 0.0, v_hi = 0.0;
          for (std::size_t z = 0; z < seg.phi_lo.size(); ++z) {
            v_lo += rows.e(r, blk.v_offset + static_cast<int>(z)) * seg.phi_lo[z];
            v_hi += rows.e(r, blk.v_offset + static_cast<int>(z)) * seg.phi_hi[z];
          }
          best = std::max({best, v_lo, v_hi});
        }
        acc += best;
      }
    if (acc > res.max_violation) {
      res.max_violation = acc;
      res.worst_row = r;
    }
  }

  res.max_sampled_violation = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::vector<double> xi(static_cast<std::size_t>(space.total_dim()));
  for (int s = 0; s < num_samples; ++s) {
    for (int t = 0; t < space.horizon; ++t)
      for (int i = 0; i < space.dims_per_stage; ++i) {
        std::uniform_real_distribution<double> dist(
            space.lower[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)],
            space.upper[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]);
        xi[static_cast<std::size_t>(t * space.dims_per_stage + i)] = dist(rng);
      }
    const LiftedPoint z = lift(space, spec, xi);
    for (int r = 0; r < nr; ++r) {
      double acc = -rows.m(r);
      for (std::size_t k = 0; k < z.z.size(); ++k)
        acc += rows.e(r, static_cast<int>(k)) * z.z[k];
      res.max_sampled_violation = std::max(res.max_sampled_violation, acc);
    }
  }
  return res;
}

}  // namespace drlcp::oracle
