#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sslp/polynomial.hpp"
#include "sslp/polytope.hpp"
#include "sslp/stochastic_program.hpp"

namespace sslp {

/// Sorted 0-based column indices of W forming an invertible submatrix.
struct Basis {
  std::vector<std::size_t> columns;

  friend bool operator==(const Basis&, const Basis&) = default;
};

/// Every invertible m2-column subset of W in lexicographic order.
/// Throws InvalidArgumentError when W has more rows than columns.
std::vector<Basis> enumerate_bases(const RationalMatrix& W);

/// The set of xi in [l,u] where `basis` is primal and dual feasible for the
/// second stage at x, with the basic objective value and the matching
/// subgradient -T_xi^T lambda(xi) as polynomials in xi.
struct BasisCell {
  Basis basis;
  HPolytope cell;
  Polynomial objective;
  std::vector<Polynomial> subgradient;
  /// Some constant row is violated; the cell is empty.
  bool empty = false;
};

BasisCell basis_cell(const StochasticProgram& sp, std::span<const Rational> x, const Basis& basis);

struct ObjectiveClass {
  Polynomial objective;
  std::vector<Basis> members;
  /// Positions of the members in the cell list the class was built from.
  std::vector<std::size_t> cells;
};

/// Groups cells by identical objective polynomial; classes follow the
/// order of their first member.
std::vector<ObjectiveClass> group_objective_classes(std::span<const BasisCell> cells);

enum class IntegrationBackend { automatic, volume_dp, triangulation };

struct RecourseOptions {
  /// automatic: triangulation for d <= 3, volume_dp otherwise.
  IntegrationBackend backend = IntegrationBackend::automatic;
  std::size_t max_class_size = 20;
  /// Random points tried when looking for a coverage witness.
  std::uint64_t witness_samples = 4096;
  std::uint64_t seed = 0;
};

struct RecourseEvaluation {
  Rational value;
  RationalVector subgradient;
  /// 1 - (covered fraction of the box); 0 when certified complete.
  Rational coverage_deficit;
  std::size_t bases = 0;
  std::size_t cells = 0;
  std::size_t classes = 0;
  std::size_t regions = 0;
  /// Largest |entry| of the integer systems handed to volume_dp.
  Integer scaled_norm = 0;
};

/// Exact E[Q(x, xi)] and an exact expected subgradient.
/// Throws RecourseIncompleteError / UnboundedRecourseError when the cells
/// leave part of the box uncovered.
RecourseEvaluation evaluate_recourse(const StochasticProgram& sp, std::span<const Rational> x,
                                     const RecourseOptions& options = {});
/// Same, over a caller-supplied basis order.
RecourseEvaluation evaluate_recourse(const StochasticProgram& sp, std::span<const Rational> x,
                                     std::span<const Basis> bases, const RecourseOptions& options);

Rational expected_recourse(const StochasticProgram& sp, std::span<const Rational> x,
                           const RecourseOptions& options = {});
RationalVector expected_subgradient(const StochasticProgram& sp, std::span<const Rational> x,
                                    const RecourseOptions& options = {});

/// d = 1: cells are intervals, integrated segment by segment.
RecourseEvaluation evaluate_recourse_1d(const StochasticProgram& sp, std::span<const Rational> x);
Rational expected_recourse_1d(const StochasticProgram& sp, std::span<const Rational> x);

/// d = 1 with a deterministic objective. xi -> Q(x, xi) is then convex and
/// piecewise linear; its pieces are found by intersecting tangent lines
/// from exact LP solves, without enumerating bases.
RecourseEvaluation evaluate_recourse_parametric(const StochasticProgram& sp, std::span<const Rational> x);

struct McRecourse {
  Rational estimate;
  Rational stderr_bound;
};

/// Sample mean of exact second-stage values at seeded uniform draws.
McRecourse mc_expected_recourse(const StochasticProgram& sp, std::span<const Rational> x, std::uint64_t samples,
                                std::uint64_t seed);

/// Value of the first cell containing xi, or nullopt when none does.
std::optional<Rational> cell_value_at(std::span<const BasisCell> cells, std::span<const Rational> xi);

/// All cells with non-empty interior, in basis order.
std::vector<BasisCell> build_cells(const StochasticProgram& sp, std::span<const Rational> x,
                                   std::span<const Basis> bases);

}  // namespace sslp
