#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drlcp/milp/solver.hpp"
#include "drlcp/reformulation.hpp"
#include "support/oracles.hpp"

using namespace drlcp;

TEST_CASE("auxiliary variable count for a small hand-sized build") {
  // T = 1, one disturbance dimension, p = 2, two samples, two cost pieces:
  // 1 multiplier + per sample (1 epigraph + 2 piece-block majorizers +
  // 4 segment duals) = 15 auxiliaries
  std::mt19937_64 rng(404);
  testsupport::InstanceOptions opts;
  opts.max_horizon = 1;
  opts.max_dims = 1;
  testsupport::RandomInstance inst;
  do {
    inst = testsupport::random_instance(rng, opts);
  } while (inst.lifting.segments(0, 0) != 2 || inst.set.count() != 2 ||
           inst.compiled.cost.d.size() != 2);

  ReformulationOptions ropts;
  ropts.policy_bounds = testsupport::shared_bounds();
  BuiltModel built = build_wasserstein(inst.compiled, inst.set, ropts);
  CHECK(built.model.num_vars() - built.info.num_policy_vars == 15);
  CHECK(built.info.lambda_var >= 0);
  CHECK(built.info.eta_vars.size() == 2);
}

TEST_CASE("model size caps throw instead of assembling huge models") {
  std::mt19937_64 rng(7);
  testsupport::InstanceOptions opts;
  auto inst = testsupport::random_instance(rng, opts);
  ReformulationOptions ropts;
  ropts.max_model_vars = 3;
  CHECK_THROWS_AS(build_wasserstein(inst.compiled, inst.set, ropts), ModelTooLarge);
}

TEST_CASE("zero radius solves match the sample average on a fixed policy") {
  std::mt19937_64 rng(99);
  testsupport::InstanceOptions opts;
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = testsupport::random_instance(rng, opts);
    inst.set.radius = 0.0;

    ReformulationOptions ropts;
    ropts.policy_bounds = testsupport::shared_bounds();
    BuiltModel built = build_wasserstein(inst.compiled, inst.set, ropts);
    for (int v = 0; v < built.info.num_policy_vars; ++v)
      built.model.fix_var(built.info.policy_offset + v,
                          inst.policy[static_cast<std::size_t>(v)]);

    BuiltModel avg = testsupport::build_sample_average(inst.compiled, inst.set.samples,
                                                       ropts.policy_bounds);
    for (int v = 0; v < avg.info.num_policy_vars; ++v)
      avg.model.fix_var(avg.info.policy_offset + v, inst.policy[static_cast<std::size_t>(v)]);

    milp::SolveOptions sopts;
    sopts.gap = 0.0;
    auto a = milp::solve_milp(built.model, sopts);
    auto b = milp::solve_milp(avg.model, sopts);
    REQUIRE(a.status == milp::SolveStatus::Optimal);
    REQUIRE(b.status == milp::SolveStatus::Optimal);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
  }
}

TEST_CASE("mixed moment build declares one multiplier pair per component") {
  std::mt19937_64 rng(31);
  testsupport::InstanceOptions opts;
  auto inst = testsupport::random_instance(rng, opts);
  MixedMomentSet set;
  set.base = inst.set;
  const int dim = inst.model.space.total_dim();
  // box corners as mean bounds: vacuous but well-formed
  std::vector<double> lower, upper;
  for (int t = 0; t < inst.model.space.horizon; ++t)
    for (int i = 0; i < inst.model.space.dims_per_stage; ++i) {
      lower.push_back(inst.model.space.lower[static_cast<std::size_t>(t)]
                                            [static_cast<std::size_t>(i)]);
      upper.push_back(inst.model.space.upper[static_cast<std::size_t>(t)]
                                            [static_cast<std::size_t>(i)]);
    }
  set.mean_lower = lower;
  set.mean_upper = upper;

  ReformulationOptions ropts;
  ropts.policy_bounds = testsupport::shared_bounds();
  BuiltModel built = build_mixed_moment(inst.compiled, set, ropts);
  CHECK(static_cast<int>(built.info.beta_lower_vars.size()) == dim);
  CHECK(static_cast<int>(built.info.beta_upper_vars.size()) == dim);
  for (int v : built.info.beta_lower_vars)
    CHECK(built.model.vars[static_cast<std::size_t>(v)].lower == 0.0);
}

TEST_CASE("event wise build keeps per-event blocks separate") {
  std::mt19937_64 rng(47);
  testsupport::InstanceOptions opts;
  auto inst = testsupport::random_instance(rng, opts);
  EventWiseSet set;
  set.probabilities = {0.25, 0.75};
  set.events = {inst.set, inst.set};

  ReformulationOptions ropts;
  ropts.policy_bounds = testsupport::shared_bounds();
  EventWiseBuilt built = build_event_wise({inst.compiled, inst.compiled}, set, ropts);
  REQUIRE(built.events.size() == 2);
  CHECK(built.events[0].policy_offset != built.events[1].policy_offset);
  CHECK(built.events[0].lambda_var != built.events[1].lambda_var);

  milp::SolveOptions sopts;
  sopts.gap = 0.0;
  auto both = milp::solve_milp(built.model, sopts);
  BuiltModel single = build_wasserstein(inst.compiled, inst.set, ropts);
  auto one = milp::solve_milp(single.model, sopts);
  REQUIRE(both.status == milp::SolveStatus::Optimal);
  REQUIRE(one.status == milp::SolveStatus::Optimal);
  // identical events with probabilities summing to one reproduce the plain build
  CHECK(both.objective == doctest::Approx(one.objective).epsilon(1e-8));
}

TEST_CASE("policy extraction returns the layout slice") {
  std::mt19937_64 rng(3);
  testsupport::InstanceOptions opts;
  auto inst = testsupport::random_instance(rng, opts);
  ReformulationOptions ropts;
  ropts.policy_bounds = testsupport::shared_bounds();
  BuiltModel built = build_wasserstein(inst.compiled, inst.set, ropts);
  milp::SolveOptions sopts;
  sopts.gap = 0.0;
  auto res = milp::solve_milp(built.model, sopts);
  REQUIRE(res.has_solution());
  auto policy = extract_policy(res.x, built.info);
  REQUIRE(static_cast<int>(policy.size()) == built.info.num_policy_vars);
  for (std::size_t v = 0; v < policy.size(); ++v)
    CHECK(policy[v] ==
          res.x[static_cast<std::size_t>(built.info.policy_offset) + v]);
}
