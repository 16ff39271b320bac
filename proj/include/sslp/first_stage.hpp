#pragma once

#include <functional>

#include "sslp/recourse.hpp"
#include "sslp/stochastic_program.hpp"

namespace sslp {

struct RecourseValue {
  Rational value;
  RationalVector subgradient;
};

/// x -> (E[Q(x, xi)], expected subgradient). Must be exact for the
/// optimality certificates of solve_first_stage to hold. The factories
/// below keep a reference to `sp`, which must outlive the evaluator.
using RecourseEvaluator = std::function<RecourseValue(const RationalVector& x)>;

RecourseEvaluator cell_evaluator(const StochasticProgram& sp, RecourseOptions options = {});
/// Requires d = 1 and a deterministic objective.
RecourseEvaluator parametric_evaluator(const StochasticProgram& sp);
/// Basis cells unless d = 1 with a deterministic objective and many bases.
RecourseEvaluator default_evaluator(const StochasticProgram& sp, RecourseOptions options = {});

struct FirstStageOptions {
  std::size_t max_iterations = 10000;
  /// For n1 = 1, also shrink the bracket below this width (0: off).
  Rational x_tolerance = 0;
};

struct FirstStageSolution {
  RationalVector x;
  /// c.x + E[Q(x, xi)]
  Rational value;
  /// Certified upper bound on value - optimum.
  Rational gap;
  std::size_t iterations = 0;
};

/// Minimizes c.x + E[Q(x, xi)] over Ax <= b to within epsilon. Bisection on
/// the subgradient sign with a tangent lower bound when n1 = 1, Kelley
/// cutting planes otherwise. Throws NonConvergenceError at the iteration cap.
FirstStageSolution solve_first_stage(const StochasticProgram& sp, const Rational& epsilon,
                                     const RecourseEvaluator& evaluator, const FirstStageOptions& options = {});
FirstStageSolution solve_first_stage(const StochasticProgram& sp, const Rational& epsilon,
                                     const FirstStageOptions& options = {});

}  // namespace sslp
