#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "sslp/errors.hpp"
#include "sslp/first_stage.hpp"
#include "sslp/recourse.hpp"

using namespace sslp;

namespace {

Rational R(const char* s) { return parse_rational(s); }
RationalVector X(const char* s) { return {R(s)}; }

Rational closed_form(const Rational& x) { return (1 - x) * (1 - x) / 2; }

}  // namespace

TEST(Bases, KnownValues) {
  auto b1 = enumerate_bases({{R("1"), R("-1")}});
  ASSERT_EQ(b1.size(), 2u);
  EXPECT_EQ(b1[0].columns, std::vector<std::size_t>{0});
  EXPECT_EQ(b1[1].columns, std::vector<std::size_t>{1});
  auto b2 = enumerate_bases({{R("1"), R("0")}, {R("0"), R("1")}});
  ASSERT_EQ(b2.size(), 1u);
  auto b3 = enumerate_bases({{R("1"), R("0"), R("1")}, {R("0"), R("1"), R("1")}});
  ASSERT_EQ(b3.size(), 3u);
  EXPECT_EQ(b3[1].columns, (std::vector<std::size_t>{0, 2}));
  auto singular = enumerate_bases({{R("1"), R("2"), R("0")}, {R("2"), R("4"), R("1")}});
  EXPECT_EQ(singular.size(), 2u);  // {1,2} is singular
  EXPECT_THROW(enumerate_bases({{R("1")}, {R("2")}}), InvalidArgumentError);
}

TEST(BasisCell, Newsvendor) {
  StochasticProgram sp = newsvendor(R("0"));
  BasisCell c1 = basis_cell(sp, X("1/2"), {{0}});
  ASSERT_EQ(c1.cell.rows.size(), 1u);  // the dual-feasibility row is constant and dropped
  EXPECT_TRUE(c1.cell.contains(X("3/4")));
  EXPECT_FALSE(c1.cell.contains(X("1/4")));
  EXPECT_EQ(c1.objective, Polynomial::affine(R("-1/2"), X("1")));
  BasisCell c2 = basis_cell(sp, X("1/2"), {{1}});
  EXPECT_TRUE(c2.cell.contains(X("1/4")));
  EXPECT_FALSE(c2.cell.contains(X("3/4")));
  EXPECT_TRUE(c2.objective.is_zero());
}

TEST(BasisCell, NoRandomnessGivesFullOrEmptyCells) {
  StochasticProgram sp = fixtures::random_complete_sslp(3, 2, 2);
  for (auto& row : sp.Qmat) std::fill(row.begin(), row.end(), Rational(0));
  for (auto& row : sp.Hmat) std::fill(row.begin(), row.end(), Rational(0));
  for (auto& t : sp.Tk)
    for (auto& row : t) std::fill(row.begin(), row.end(), Rational(0));
  for (const auto& b : enumerate_bases(sp.W)) {
    BasisCell c = basis_cell(sp, X("1/2"), b);
    EXPECT_TRUE(c.cell.rows.empty());
    EXPECT_LE(c.objective.total_degree(), 0);
  }
}

TEST(ExpectedRecourse, Newsvendor) {
  StochasticProgram sp = newsvendor(R("0"));
  for (const char* x : {"0", "1/4", "1/2", "3/4", "1"}) {
    EXPECT_EQ(expected_recourse(sp, X(x)), closed_form(R(x))) << x;
    EXPECT_EQ(expected_recourse_1d(sp, X(x)), closed_form(R(x))) << x;
    EXPECT_EQ(evaluate_recourse_parametric(sp, X(x)).value, closed_form(R(x))) << x;
    RecourseOptions dp;
    dp.backend = IntegrationBackend::volume_dp;
    EXPECT_EQ(expected_recourse(sp, X(x), dp), closed_form(R(x))) << x;
  }
  EXPECT_THROW(expected_recourse(sp, X("2")), InvalidArgumentError);
}

TEST(ExpectedRecourse, ConstantSecondStage) {
  StochasticProgram sp = fixtures::random_complete_sslp(5, 1, 1);
  sp.Qmat[0][0] = sp.Qmat[1][0] = 0;
  for (auto& row : sp.Qmat) row[0] = 0;
  sp.Hmat[0][0] = 0;
  sp.Tk[0][0][0] = 0;
  Rational direct = solve_second_stage(sp, X("1/3"), X("0")).value;
  EXPECT_EQ(expected_recourse_1d(sp, X("1/3")), direct);
  EXPECT_EQ(expected_recourse(sp, X("1/3")), direct);
}

TEST(ExpectedSubgradient, Newsvendor) {
  StochasticProgram sp = newsvendor(R("0"));
  EXPECT_EQ(expected_subgradient(sp, X("1/2")), X("-1/2"));
  EXPECT_EQ(expected_subgradient(sp, X("1")), X("0"));
  EXPECT_EQ(evaluate_recourse_1d(sp, X("1/4")).subgradient, X("-3/4"));
  EXPECT_EQ(evaluate_recourse_parametric(sp, X("1/4")).subgradient, X("-3/4"));
  // Convexity: the subgradient lies between one-sided difference quotients.
  const Rational h = R("1/64"), x = R("1/2");
  Rational fwd = (expected_recourse(sp, RationalVector{x + h}) - expected_recourse(sp, X("1/2"))) / h;
  Rational bwd = (expected_recourse(sp, X("1/2")) - expected_recourse(sp, RationalVector{x - h})) / h;
  Rational g = expected_subgradient(sp, X("1/2"))[0];
  EXPECT_LE(bwd, g);
  EXPECT_LE(g, fwd);
}

TEST(ExpectedSubgradient, FiniteDifferenceBracketsRandomPrograms) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    StochasticProgram sp = fixtures::random_complete_sslp(seed, 1 + seed % 2, 1 + seed % 2);
    const Rational x = R("1/2"), h = R("1/64");
    Rational f0 = expected_recourse(sp, RationalVector{x});
    Rational fwd = (expected_recourse(sp, RationalVector{x + h}) - f0) / h;
    Rational bwd = (f0 - expected_recourse(sp, RationalVector{x - h})) / h;
    Rational g = expected_subgradient(sp, RationalVector{x})[0];
    EXPECT_LE(bwd, g) << seed;
    EXPECT_LE(g, fwd) << seed;
  }
}

TEST(MonteCarlo, NewsvendorAgrees) {
  StochasticProgram sp = newsvendor(R("0"));
  McRecourse mc = mc_expected_recourse(sp, X("1/2"), 200000, 17);
  EXPECT_LE(abs(mc.estimate - R("1/8")), 4 * mc.stderr_bound);
  McRecourse again = mc_expected_recourse(sp, X("1/2"), 1000, 17);
  EXPECT_EQ(again.estimate, mc_expected_recourse(sp, X("1/2"), 1000, 17).estimate);
  EXPECT_THROW(mc_expected_recourse(sp, X("1/2"), 0, 1), InvalidArgumentError);
}

TEST(MonteCarlo, DeterministicProgramIsExact) {
  StochasticProgram sp = newsvendor(R("0"));
  sp.Hmat[0][0] = 0;
  sp.h0[0] = R("3/4");
  McRecourse mc = mc_expected_recourse(sp, X("1/2"), 500, 2);
  EXPECT_EQ(mc.estimate, R("1/4"));
  EXPECT_EQ(mc.stderr_bound, R("0"));
}

TEST(Decomposition, CellValuesMatchLp) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    StochasticProgram sp = fixtures::random_complete_sslp(seed, 1 + seed % 2, 1 + (seed / 2) % 2);
    RationalVector x{R("2/5")};
    auto cells = build_cells(sp, x, enumerate_bases(sp.W));
    SplitMix64 rng(seed);
    for (int s = 0; s < 300; ++s) {
      RationalVector xi(sp.d);
      for (std::size_t k = 0; k < sp.d; ++k) xi[k] = sp.l[k] + (sp.u[k] - sp.l[k]) * rng.unit_dyadic();
      Rational best;
      bool any = false;
      for (const auto& c : cells) {
        if (!c.cell.contains(xi)) continue;
        Rational v = c.objective.evaluate(xi);
        if (!any || v > best) best = v;
        any = true;
      }
      ASSERT_TRUE(any);
      EXPECT_EQ(best, solve_second_stage(sp, x, xi).value);
    }
  }
}

TEST(Decomposition, OrderInvarianceAndDisjointClasses) {
  for (std::uint64_t seed = 10; seed <= 13; ++seed) {
    StochasticProgram sp = fixtures::random_complete_sslp(seed, 2, 2);
    RationalVector x{R("1/3")};
    auto bases = enumerate_bases(sp.W);
    RecourseEvaluation fwd = evaluate_recourse(sp, x, bases, {});
    std::reverse(bases.begin(), bases.end());
    RecourseEvaluation rev = evaluate_recourse(sp, x, bases, {});
    EXPECT_EQ(fwd.value, rev.value);
    EXPECT_EQ(fwd.subgradient, rev.subgradient);
    EXPECT_EQ(fwd.coverage_deficit, 0);

    auto cells = build_cells(sp, x, bases);
    auto classes = group_objective_classes(cells);
    for (std::size_t r = 0; r < classes.size(); ++r)
      for (std::size_t s = r + 1; s < classes.size(); ++s)
        for (std::size_t i : classes[r].cells)
          for (std::size_t j : classes[s].cells) {
            HPolytope both = cells[i].cell;
            both.rows.insert(both.rows.end(), cells[j].cell.rows.begin(), cells[j].cell.rows.end());
            EXPECT_FALSE(has_interior(both));
          }
  }
}

TEST(Decomposition, BackendsAgree) {
  for (std::uint64_t seed = 20; seed <= 22; ++seed) {
    StochasticProgram sp = fixtures::random_complete_sslp(seed, 1, 2);
    RationalVector x{R("1/2")};
    RecourseOptions tri, dp;
    tri.backend = IntegrationBackend::triangulation;
    dp.backend = IntegrationBackend::volume_dp;
    RecourseEvaluation a = evaluate_recourse(sp, x, tri), b = evaluate_recourse(sp, x, dp);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.subgradient, b.subgradient);
  }
}

TEST(Decomposition, Convexity) {
  for (std::uint64_t seed = 30; seed <= 33; ++seed) {
    StochasticProgram sp = fixtures::random_complete_sslp(seed, 2, 1);
    RationalVector x1{R("1/5")}, x2{R("9/10")}, mid{R("11/20")};
    EXPECT_LE(2 * expected_recourse(sp, mid), expected_recourse(sp, x1) + expected_recourse(sp, x2));
  }
}

TEST(Decomposition, OneDimensionalPathsAgree) {
  for (std::uint64_t seed = 40; seed <= 45; ++seed) {
    StochasticProgram sp = fixtures::random_complete_sslp(seed, 1 + seed % 2, 1);
    RationalVector x{R("3/7")};
    RecourseEvaluation full = evaluate_recourse(sp, x);
    RecourseEvaluation line = evaluate_recourse_1d(sp, x);
    EXPECT_EQ(full.value, line.value);
    EXPECT_EQ(full.subgradient, line.subgradient);
    for (auto& row : sp.Qmat) row[0] = 0;
    EXPECT_EQ(evaluate_recourse_parametric(sp, x).value, expected_recourse_1d(sp, x));
  }
}

TEST(Coverage, IncompleteRecourseDetected) {
  // y = xi - x, y >= 0: infeasible for xi < x.
  StochasticProgram sp = StochasticProgram::zeros(1, 2, 1, 1, 1);
  sp.A = {{R("1")}, {R("-1")}};
  sp.b = {R("1"), R("0")};
  sp.W = {{R("1")}};
  sp.q0 = {R("1")};
  sp.T0 = {{R("1")}};
  sp.Hmat = {{R("1")}};
  try {
    evaluate_recourse(sp, X("1/4"));
    FAIL() << "expected RecourseIncompleteError";
  } catch (const RecourseIncompleteError& e) {
    EXPECT_EQ(e.deficit(), "1/4");
    ASSERT_EQ(e.witness().size(), 1u);
    EXPECT_LT(parse_rational(e.witness()[0]), R("1/4"));
  }
  EXPECT_THROW(evaluate_recourse_1d(sp, X("1/4")), RecourseIncompleteError);
  EXPECT_THROW(evaluate_recourse_parametric(sp, X("1/4")), RecourseIncompleteError);
  EXPECT_THROW(mc_expected_recourse(sp, X("1/4"), 1000, 1), RecourseIncompleteError);
  EXPECT_EQ(evaluate_recourse(sp, X("0")).coverage_deficit, 0);
}

TEST(Coverage, UnboundedRecourseDetected) {
  StochasticProgram sp = newsvendor(R("0"));
  sp.q0 = {R("-1"), R("0")};
  EXPECT_THROW(evaluate_recourse(sp, X("1/2")), UnboundedRecourseError);
  EXPECT_THROW(evaluate_recourse_parametric(sp, X("1/2")), UnboundedRecourseError);
}

TEST(Coverage, ClassCapEnforced) {
  StochasticProgram sp = newsvendor(R("0"));
  RecourseOptions tiny;
  tiny.max_class_size = 0;
  EXPECT_THROW(evaluate_recourse(sp, X("1/2"), tiny), UnsupportedError);
}

TEST(FirstStage, NewsvendorExamples) {
  FirstStageSolution a = solve_first_stage(newsvendor(R("1/4")), R("1/1000000"));
  EXPECT_EQ(a.x, X("3/4"));
  EXPECT_EQ(a.value, R("7/32"));
  FirstStageSolution b = solve_first_stage(newsvendor(R("0")), R("1/1000000"));
  EXPECT_EQ(b.x, X("1"));
  EXPECT_EQ(b.value, R("0"));
  FirstStageSolution c = solve_first_stage(newsvendor(R("2")), R("1/1000000"));
  EXPECT_EQ(c.x, X("0"));
  EXPECT_EQ(c.value, R("1/2"));
  StochasticProgram sp = newsvendor(R("1/4"));
  FirstStageSolution p = solve_first_stage(sp, R("1/1000000"), parametric_evaluator(sp));
  EXPECT_EQ(p.x, X("3/4"));
  EXPECT_THROW(solve_first_stage(sp, R("0")), InvalidArgumentError);
}

TEST(FirstStage, IterationCap) {
  StochasticProgram sp = newsvendor(R("1/3"));
  FirstStageOptions opts;
  opts.max_iterations = 3;
  EXPECT_THROW(solve_first_stage(sp, R("1/1000000000"), opts), NonConvergenceError);
}

TEST(FirstStage, KelleyTwoDimensional) {
  StochasticProgram sp = fixtures::random_complete_sslp(77, 2, 1, 2);
  const Rational eps = R("1/1000");
  FirstStageSolution sol = solve_first_stage(sp, eps);
  EXPECT_TRUE(sp.first_stage_feasible(sol.x));
  EXPECT_LE(sol.gap, eps);
  EXPECT_EQ(sol.value, dot(sp.c, sol.x) + expected_recourse(sp, sol.x));
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j) {
      RationalVector x{make_rational(i, 4), make_rational(j, 4)};
      EXPECT_LE(sol.value, dot(sp.c, x) + expected_recourse(sp, x) + eps);
    }
}
