#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "bsmg/lp.hpp"
#include "oracles.hpp"

using namespace bsmg;

namespace {

constexpr double kFree = -std::numeric_limits<double>::infinity();

double feasibility_gap(const LinearProgram& lp,
                       const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& row : lp.rows) {
    double lhs = 0.0, scale = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      lhs += row.coeffs[j] * x[j];
      scale = std::max(scale, std::fabs(row.coeffs[j]));
    }
    scale = std::max(scale, std::fabs(row.rhs));
    double gap = 0.0;
    if (row.dir == '<') gap = lhs - row.rhs;
    if (row.dir == '>') gap = row.rhs - lhs;
    if (row.dir == '=') gap = std::fabs(lhs - row.rhs);
    worst = std::max(worst, gap / scale);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double lb = lp.lower_bounds.empty() ? 0.0 : lp.lower_bounds[j];
    if (lb != kFree) worst = std::max(worst, lb - x[j]);
  }
  return worst;
}

}  // namespace

TEST_CASE("one-variable cap") {
  LinearProgram lp;
  lp.objective = {1.0};
  lp.add_row({1.0}, '<', 3.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(sol.point[0] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("missing cap means unbounded") {
  LinearProgram lp;
  lp.objective = {1.0};
  lp.add_row({-1.0}, '<', 0.5);  // x >= -0.5, no upper bound
  CHECK(solve_lp(lp).status == LpStatus::unbounded);
}

TEST_CASE("contradictory bounds are infeasible") {
  LinearProgram lp;
  lp.objective = {1.0};
  lp.add_row({1.0}, '>', 2.0);
  lp.add_row({1.0}, '<', 1.0);
  CHECK(solve_lp(lp).status == LpStatus::infeasible);
}

TEST_CASE("free variable reaches a negative optimum") {
  // maximize v subject to v <= -2, v free; impossible with default bounds
  LinearProgram lp;
  lp.objective = {1.0};
  lp.lower_bounds = {kFree};
  lp.add_row({1.0}, '<', -2.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("equalities and mixed directions") {
  // maximize x0 + 2 x1 s.t. x0 + x1 = 1, x1 <= 0.6, x0 >= 0.1
  LinearProgram lp;
  lp.objective = {1.0, 2.0};
  lp.add_row({1.0, 1.0}, '=', 1.0);
  lp.add_row({0.0, 1.0}, '<', 0.6);
  lp.add_row({1.0, 0.0}, '>', 0.1);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(1.6).epsilon(1e-9));
  CHECK(sol.point[0] == doctest::Approx(0.4).epsilon(1e-7));
  CHECK(sol.point[1] == doctest::Approx(0.6).epsilon(1e-7));
}

TEST_CASE("duplicated equality rows do not break the solve") {
  LinearProgram lp;
  lp.objective = {3.0, 1.0};
  lp.add_row({1.0, 1.0}, '=', 1.0);
  lp.add_row({1.0, 1.0}, '=', 1.0);
  lp.add_row({2.0, 2.0}, '=', 2.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("simplex-constrained objective picks the best coordinate") {
  LinearProgram lp;
  lp.objective = {0.3, 0.9, 0.1, 0.4};
  lp.add_row({1.0, 1.0, 1.0, 1.0}, '=', 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(sol.point[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate vertex with redundant rows still terminates") {
  // Classic degeneracy: multiple constraints active at the optimum.
  LinearProgram lp;
  lp.objective = {1.0, 1.0};
  lp.add_row({1.0, 0.0}, '<', 1.0);
  lp.add_row({0.0, 1.0}, '<', 1.0);
  lp.add_row({1.0, 1.0}, '<', 2.0);
  lp.add_row({1.0, -1.0}, '<', 0.0);
  lp.add_row({-1.0, 1.0}, '<', 0.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("random bounded programs match the vertex-enumeration oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nd(2, 6), md(1, 6);
  std::uniform_real_distribution<double> coef(-3.0, 3.0), cap(0.5, 4.0);
  int solved = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = nd(rng), m = md(rng);
    LinearProgram lp;
    for (int j = 0; j < n; ++j) lp.objective.push_back(coef(rng));
    // box keeps every instance bounded and 0 keeps it feasible
    for (int j = 0; j < n; ++j) {
      std::vector<double> row(n, 0.0);
      row[j] = 1.0;
      lp.add_row(std::move(row), '<', cap(rng));
    }
    for (int k = 0; k < m; ++k) {
      std::vector<double> row;
      for (int j = 0; j < n; ++j) row.push_back(coef(rng));
      lp.add_row(std::move(row), '<', cap(rng));
    }
    testo::VertexScan oracle = testo::lp_vertex_scan(lp);
    REQUIRE(oracle.feasible);
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(std::fabs(sol.value - oracle.value) <= 1e-7);
    CHECK(feasibility_gap(lp, sol.point) <= 1e-9);
    ++solved;
  }
  CHECK(solved == 120);
}

TEST_CASE("random programs with equalities and free variables vs oracle") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    // x in simplex(3), v free with v <= c . x per three random c rows;
    // maximize v: classic maximin shape with a known vertex optimum.
    LinearProgram lp;
    lp.objective = {0.0, 0.0, 0.0, 1.0};
    lp.lower_bounds = {0.0, 0.0, 0.0, kFree};
    lp.add_row({1.0, 1.0, 1.0, 0.0}, '=', 1.0);
    for (int k = 0; k < 3; ++k) {
      std::vector<double> row = {coef(rng), coef(rng), coef(rng), -1.0};
      lp.add_row(std::move(row), '>', 0.0);  // c . x - v >= 0
    }
    testo::VertexScan oracle = testo::lp_vertex_scan(lp);
    REQUIRE(oracle.feasible);
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(std::fabs(sol.value - oracle.value) <= 1e-7);
    CHECK(feasibility_gap(lp, sol.point) <= 1e-9);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  LinearProgram lp;
  lp.objective = {1.0, 1.0};
  lp.add_row({1.0}, '<', 1.0);
  CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);

  LinearProgram bad_dir;
  bad_dir.objective = {1.0};
  bad_dir.add_row({1.0}, 'x', 1.0);
  CHECK_THROWS_AS(solve_lp(bad_dir), std::invalid_argument);
}
