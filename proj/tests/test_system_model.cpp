#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drlcp/system_model.hpp"
#include "support/oracles.hpp"

using namespace drlcp;

namespace {

double eval_row(const CompiledAffine& ca, int row, const std::vector<double>& policy,
                const std::vector<double>& z) {
  const auto r = static_cast<std::size_t>(row);
  double val = ca.cons[r].eval(policy);
  for (std::size_t k = 0; k < z.size(); ++k) val += ca.coef[r][k].eval(policy) * z[k];
  return val;
}

SystemModel scalar_model() {
  SystemModel m;
  m.horizon = 1;
  m.n_x = 1;
  m.n_u = 1;
  m.n_gamma = 1;
  m.space = DisturbanceSpace::box(1, 1, 0.0, 3.0);
  auto one = Eigen::MatrixXd::Constant(1, 1, 1.0);
  m.A = {one};
  m.B = {one};
  m.C = {one};
  m.D = {-one};
  m.Ac = {Eigen::MatrixXd::Zero(0, 1)};
  m.Bc = {Eigen::MatrixXd::Zero(0, 1)};
  m.Cc = {Eigen::MatrixXd::Zero(0, 1)};
  m.Dc = {Eigen::MatrixXd::Zero(0, 1)};
  m.q = Eigen::VectorXd(0);
  m.x0 = Eigen::VectorXd::Zero(1);
  m.discount = {1.0};
  StageCostPiece piece;
  piece.a = Eigen::VectorXd::Ones(1);
  piece.b = Eigen::VectorXd::Zero(1);
  piece.c = Eigen::VectorXd::Zero(1);
  m.cost_pieces = {{piece}};
  return m;
}

}  // namespace

TEST_CASE("piecewise affine control from continuous gains") {
  SystemModel model = scalar_model();
  LiftingSpec spec = LiftingSpec::equal_division(model.space, 3);
  InformationMask mask = InformationMask::full(model);
  PolicyLayout layout = build_policy_layout(model, spec, mask);
  REQUIRE(layout.num_vars == 3 + 1 + 2 + 1);  // V gains, offset, Q gains, offset

  // slopes 2.5, -0.5, -2.5 on the three segments, offset 1
  std::vector<double> policy(static_cast<std::size_t>(layout.num_vars), 0.0);
  policy[static_cast<std::size_t>(layout.y[0][0][0].var)] = 2.5;
  policy[static_cast<std::size_t>(layout.y[0][0][1].var)] = -0.5;
  policy[static_cast<std::size_t>(layout.y[0][0][2].var)] = -2.5;
  policy[static_cast<std::size_t>(layout.y0[0][0])] = 1.0;

  CompiledAffine u = compile_control(model, spec, layout, 0, false);
  auto at = [&](double xi) {
    return eval_row(u, 0, policy, lift(model.space, spec, {xi}).z);
  };
  CHECK(at(0.0) == doctest::Approx(1.0));
  CHECK(at(1.0) == doctest::Approx(3.5));
  CHECK(at(1.5) == doctest::Approx(3.25));
  CHECK(at(2.0) == doctest::Approx(3.0));
  CHECK(at(3.0) == doctest::Approx(0.5));
}

TEST_CASE("piecewise constant integer control from indicator gains") {
  SystemModel model = scalar_model();
  LiftingSpec spec = LiftingSpec::equal_division(model.space, 3);
  InformationMask mask = InformationMask::full(model);
  PolicyLayout layout = build_policy_layout(model, spec, mask);

  std::vector<double> policy(static_cast<std::size_t>(layout.num_vars), 0.0);
  policy[static_cast<std::size_t>(layout.z[0][0][0].var)] = -2.0;
  policy[static_cast<std::size_t>(layout.z[0][0][1].var)] = 1.0;
  policy[static_cast<std::size_t>(layout.z0[0][0])] = 3.0;

  CompiledAffine g = compile_control(model, spec, layout, 0, true);
  auto at = [&](double xi) {
    return eval_row(g, 0, policy, lift(model.space, spec, {xi}).z);
  };
  CHECK(at(0.5) == doctest::Approx(3.0));
  CHECK(at(1.5) == doctest::Approx(1.0));
  CHECK(at(2.5) == doctest::Approx(2.0));
}

TEST_CASE("information mask removes gain columns") {
  SystemModel model = scalar_model();
  LiftingSpec spec = LiftingSpec::equal_division(model.space, 2);
  InformationMask lagged = InformationMask::full(model);
  lagged.set_u_lag(1);
  PolicyLayout layout = build_policy_layout(model, spec, lagged);
  // single stage: the lagged continuous channel sees nothing, keeps only the
  // offset; the integer channel keeps its indicator gain and offset
  CHECK(layout.y[0][0].empty());
  CHECK(layout.z[0][0].size() == 1);
  CHECK(layout.num_vars == 3);
}

TEST_CASE("compiled cost and constraints match direct simulation") {
  std::mt19937_64 rng(2026);
  testsupport::InstanceOptions opts;
  opts.with_constraints = true;
  for (int trial = 0; trial < 25; ++trial) {
    auto inst = testsupport::random_instance(rng, opts);
    NumericPieces pieces = substitute_cost(inst.compiled.cost, inst.policy);
    NumericConstraints rows = substitute_constraints(
        inst.compiled.constraints, inst.compiled.index.total_dim, inst.policy);
    for (int rep = 0; rep < 8; ++rep) {
      auto xi = testsupport::random_support_point(rng, inst.model.space);
      Trajectory traj =
          evaluate_policy(inst.model, inst.lifting, inst.compiled.layout, inst.policy, xi);
      const auto z = lift(inst.model.space, inst.lifting, xi).z;
      Eigen::VectorXd zv(z.size());
      for (std::size_t k = 0; k < z.size(); ++k)
        zv(static_cast<Eigen::Index>(k)) = z[k];

      double best = -1e300;
      for (std::size_t k = 0; k < pieces.g.size(); ++k)
        best = std::max(best, pieces.g[k].dot(zv) + pieces.h[k]);
      CHECK(best == doctest::Approx(traj.total_cost).epsilon(1e-9));

      if (rows.e.rows() > 0) {
        double residual = -1e300;
        for (Eigen::Index r = 0; r < rows.e.rows(); ++r)
          residual = std::max(residual, rows.e.row(r).dot(zv) - rows.m(r));
        CHECK(residual == doctest::Approx(traj.max_residual).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("piece combination cap throws instead of exploding") {
  SystemModel model = scalar_model();
  StageCostPiece piece = model.cost_pieces[0][0];
  model.cost_pieces[0] = {piece, piece, piece, piece};
  LiftingSpec spec = LiftingSpec::equal_division(model.space, 1);
  InformationMask mask = InformationMask::full(model);
  CompileOptions opts;
  opts.max_cost_pieces = 3;
  CHECK_THROWS_AS(compile(model, spec, mask, opts), PieceExplosion);
}
