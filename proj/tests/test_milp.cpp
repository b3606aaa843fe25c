#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <random>

#include "drlcp/milp/io.hpp"
#include "drlcp/milp/solver.hpp"
#include "support/oracles.hpp"

using namespace drlcp;
using namespace drlcp::milp;

namespace {

MilpModel knapsack() {
  MilpModel m;
  const int x = m.add_var("x", 0.0, 3.0, VarKind::Integer);
  const int y = m.add_var("y", 0.0, 3.0, VarKind::Integer);
  m.add_row("cap", {{x, 2.0}, {y, 1.0}}, Sense::LessEqual, 4.0);
  m.set_objective(AffineExpr::variable(x, -3.0) + AffineExpr::variable(y, -2.0));
  return m;
}

MilpModel random_model(std::mt19937_64& rng, int n_int, int n_cont, int n_rows) {
  std::uniform_real_distribution<double> coeff(-3.0, 3.0);
  std::uniform_real_distribution<double> rhs(0.5, 6.0);
  MilpModel m;
  for (int i = 0; i < n_int; ++i)
    m.add_var("g" + std::to_string(i), 0.0, 2.0, VarKind::Integer);
  for (int i = 0; i < n_cont; ++i)
    m.add_var("x" + std::to_string(i), -4.0, 4.0);
  AffineExpr obj;
  for (int v = 0; v < m.num_vars(); ++v) obj += AffineExpr::variable(v, coeff(rng));
  m.set_objective(obj);
  for (int r = 0; r < n_rows; ++r) {
    AffineExpr row;
    for (int v = 0; v < m.num_vars(); ++v) row += AffineExpr::variable(v, coeff(rng));
    m.add_row("r" + std::to_string(r), row, Sense::LessEqual, rhs(rng));
  }
  return m;
}

}  // namespace

TEST_CASE("pure LP solves a bounded box problem") {
  MilpModel m;
  const int x = m.add_var("x", 0.0, kInf);
  const int y = m.add_var("y", 0.0, kInf);
  m.add_row("r1", {{x, 1.0}, {y, 2.0}}, Sense::LessEqual, 4.0);
  m.add_row("r2", {{x, 1.0}, {y, -1.0}}, Sense::LessEqual, 1.0);
  m.set_objective(AffineExpr::variable(x, -1.0) + AffineExpr::variable(y, -1.0));
  auto res = solve_lp(m);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.objective == doctest::Approx(-3.0));
}

TEST_CASE("branch and bound solves the knapsack exactly") {
  SolveOptions opts;
  opts.gap = 0.0;
  auto res = solve_milp(knapsack(), opts);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.objective == doctest::Approx(-7.0));
  CHECK(res.x[0] == doctest::Approx(1.0));
  CHECK(res.x[1] == doctest::Approx(2.0));
}

TEST_CASE("infeasible and unbounded statuses") {
  MilpModel inf;
  const int x = inf.add_var("x", 0.0, 1.0);
  inf.add_row("r", {{x, 1.0}}, Sense::GreaterEqual, 2.0);
  CHECK(solve_milp(inf).status == SolveStatus::Infeasible);

  MilpModel unb;
  unb.add_var("x", 0.0, kInf);
  unb.set_objective(AffineExpr::variable(0, -1.0));
  CHECK(solve_milp(unb).status == SolveStatus::Unbounded);
}

TEST_CASE("branch and bound matches exhaustive enumeration") {
  std::mt19937_64 rng(11);
  SolveOptions opts;
  opts.gap = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    MilpModel m = random_model(rng, 3, 2, 4);
    auto fast = solve_milp(m, opts);
    auto slow = testsupport::enumerate_milp(m, opts);
    REQUIRE(fast.status == slow.status);
    if (fast.has_solution())
      CHECK(fast.objective == doctest::Approx(slow.objective).epsilon(1e-9));
  }
}

TEST_CASE("node observer sees monotone lower bounds") {
  std::mt19937_64 rng(5);
  MilpModel m = random_model(rng, 4, 2, 5);
  SolveOptions opts;
  opts.gap = 0.0;
  double last_bound = -kInf;
  bool monotone = true;
  opts.on_node = [&](long, double bound, double) {
    if (bound < last_bound - 1e-9) monotone = false;
    last_bound = bound;
  };
  auto res = solve_milp(m, opts);
  CHECK(monotone);
  if (res.has_solution()) CHECK(last_bound <= res.objective + 1e-9);
}

TEST_CASE("MPS export is deterministic and carries integer markers") {
  MilpModel m = knapsack();
  m.objective_constant = 1.5;
  const std::string a = to_mps(m);
  const std::string b = to_mps(m);
  CHECK(a == b);
  CHECK(a.find("INTORG") != std::string::npos);
  CHECK(a.find("INTEND") != std::string::npos);
  CHECK(a.find("ENDATA") != std::string::npos);
}

TEST_CASE("external adapter round trip" *
          doctest::skip(std::getenv("DRLCP_SKIP_EXTERNAL") != nullptr)) {
  const std::string cmd = std::string("python3 ") + DRLCP_SOURCE_DIR "/tools/mps_solve.py";
  MilpModel m = knapsack();
  m.objective_constant = 1.5;
  auto res = solve_with_external(m, cmd);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.objective == doctest::Approx(-5.5));
  CHECK(res.x[0] == doctest::Approx(1.0));
  CHECK(res.x[1] == doctest::Approx(2.0));
}

TEST_CASE("LP export names every section") {
  const std::string lp = to_lp(knapsack());
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("Subject To") != std::string::npos);
  CHECK(lp.find("Bounds") != std::string::npos);
  CHECK(lp.find("End") != std::string::npos);
}
