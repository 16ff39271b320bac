#include "sslp/first_stage.hpp"

#include <memory>

#include "sslp/errors.hpp"

namespace sslp {

RecourseEvaluator cell_evaluator(const StochasticProgram& sp, RecourseOptions options) {
  auto bases = std::make_shared<std::vector<Basis>>(enumerate_bases(sp.W));
  return [&sp, options, bases](const RationalVector& x) {
    RecourseEvaluation e = evaluate_recourse(sp, x, *bases, options);
    return RecourseValue{e.value, e.subgradient};
  };
}

RecourseEvaluator parametric_evaluator(const StochasticProgram& sp) {
  return [&sp](const RationalVector& x) {
    RecourseEvaluation e = evaluate_recourse_parametric(sp, x);
    return RecourseValue{e.value, e.subgradient};
  };
}

RecourseEvaluator default_evaluator(const StochasticProgram& sp, RecourseOptions options) {
  if (sp.d == 1 && !sp.objective_random()) {
    // C(n2, m2) grows quickly; past a few hundred bases the tangent method wins.
    double count = 1;
    for (std::size_t i = 0; i < sp.m2; ++i) count = count * double(sp.n2 - i) / double(i + 1);
    if (count > 256) return parametric_evaluator(sp);
  }
  return cell_evaluator(sp, options);
}

namespace {

struct Point {
  Rational x, f, g;
};

FirstStageSolution bisect(const StochasticProgram& sp, const Rational& epsilon, const RecourseEvaluator& eval,
                          const FirstStageOptions& options) {
  HPolytope p = sp.first_stage_polytope();
  RationalVector one{Rational(1)};
  LPResult lo_r = solve_lp(p, one, Sense::minimize);
  LPResult hi_r = solve_lp(p, one, Sense::maximize);
  if (lo_r.status != LpStatus::optimal || hi_r.status != LpStatus::optimal) {
    throw InvalidArgumentError("solve_first_stage: first stage is empty or unbounded");
  }
  FirstStageSolution sol;
  auto at = [&](const Rational& x) {
    ++sol.iterations;
    RecourseValue v = eval(RationalVector{x});
    return Point{x, sp.c[0] * x + v.value, sp.c[0] + v.subgradient[0]};
  };
  auto finish = [&](const Point& best, const Rational& gap) {
    sol.x = {best.x};
    sol.value = best.f;
    sol.gap = gap;
    return sol;
  };
  Point a = at(lo_r.point[0]);
  if (sgn(a.g) >= 0 || lo_r.point[0] == hi_r.point[0]) return finish(a, 0);
  Point b = at(hi_r.point[0]);
  if (sgn(b.g) <= 0) return finish(b, 0);
  while (true) {
    // The tangents at a and b bound the convex objective from below.
    const Rational cross = (b.f - a.f + a.g * a.x - b.g * b.x) / (a.g - b.g);
    const Rational lower = a.f + a.g * (cross - a.x);
    const Point& best = a.f <= b.f ? a : b;
    const Rational gap = best.f - lower;
    if (gap <= epsilon && (sgn(options.x_tolerance) == 0 || b.x - a.x <= options.x_tolerance)) {
      return finish(best, gap);
    }
    if (sol.iterations >= options.max_iterations) {
      throw NonConvergenceError("solve_first_stage: iteration cap reached", to_string(gap));
    }
    Point m = at((a.x + b.x) / 2);
    if (sgn(m.g) == 0) return finish(m, 0);
    if (sgn(m.g) < 0) a = m;
    else b = m;
  }
}

FirstStageSolution kelley(const StochasticProgram& sp, const Rational& epsilon, const RecourseEvaluator& eval,
                          const FirstStageOptions& options) {
  const std::size_t n1 = sp.n1;
  LPResult start = solve_lp(sp.first_stage_polytope(), sp.c, Sense::minimize);
  if (start.status != LpStatus::optimal) throw InvalidArgumentError("solve_first_stage: first stage is empty or unbounded");
  HPolytope master;
  master.dim = n1 + 1;
  for (std::size_t i = 0; i < sp.m1; ++i) {
    RationalVector a = sp.A[i];
    a.push_back(Rational(0));
    master.rows.push_back({std::move(a), sp.b[i]});
  }
  RationalVector objective = sp.c;
  objective.push_back(Rational(1));

  FirstStageSolution sol;
  RationalVector x = start.point;
  bool have_best = false;
  while (true) {
    ++sol.iterations;
    RecourseValue v = eval(x);
    const Rational f = dot(sp.c, x) + v.value;
    if (!have_best || f < sol.value) {
      sol.x = x;
      sol.value = f;
      have_best = true;
    }
    // theta >= E(x_k) + g.(x - x_k)
    RationalVector a = v.subgradient;
    a.push_back(Rational(-1));
    master.rows.push_back({std::move(a), dot(v.subgradient, x) - v.value});
    LPResult m = solve_lp(master, objective, Sense::minimize);
    if (m.status != LpStatus::optimal) throw InternalConsistencyError("solve_first_stage: master problem not solvable");
    sol.gap = sol.value - m.value;
    if (sol.gap <= epsilon) return sol;
    if (sol.iterations >= options.max_iterations) {
      throw NonConvergenceError("solve_first_stage: iteration cap reached", to_string(sol.gap));
    }
    x.assign(m.point.begin(), m.point.begin() + n1);
  }
}

}  // namespace

FirstStageSolution solve_first_stage(const StochasticProgram& sp, const Rational& epsilon,
                                     const RecourseEvaluator& evaluator, const FirstStageOptions& options) {
  sp.validate();
  if (sgn(epsilon) <= 0) throw InvalidArgumentError("solve_first_stage: epsilon must be positive");
  if (sp.n1 == 1) return bisect(sp, epsilon, evaluator, options);
  return kelley(sp, epsilon, evaluator, options);
}

FirstStageSolution solve_first_stage(const StochasticProgram& sp, const Rational& epsilon,
                                     const FirstStageOptions& options) {
  return solve_first_stage(sp, epsilon, default_evaluator(sp), options);
}

}  // namespace sslp
