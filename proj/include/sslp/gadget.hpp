#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sslp/first_stage.hpp"
#include "sslp/interval.hpp"
#include "sslp/stochastic_program.hpp"

namespace sslp {

/// Unordered pair over {1..n}, stored with i < j.
struct Edge {
  int i = 0;
  int j = 0;
  auto operator<=>(const Edge&) const = default;
};

struct Graph {
  int n = 0;
  std::vector<Edge> edges;

  /// Normalizes every edge to i < j and rejects loops, duplicates,
  /// out-of-range endpoints and n < 2.
  void validate();
  bool has_edge(int a, int b) const;
};

Graph make_graph(int n, std::vector<std::pair<int, int>> edges);

enum class Relation { eq, le };

struct FormulationRow {
  std::vector<IntervalScalar> coefficients;
  Relation relation = Relation::le;
  IntervalScalar rhs;
};

/// Variables are ordered y_1..y_{n+1}, z_1..z_{n+1}.
struct ExtendedFormulation {
  std::size_t num_vars = 0;
  std::vector<FormulationRow> rows;
};

using FormulationKey = std::optional<Edge>;

struct Gadget {
  Graph graph;
  int n = 0;
  mpfr_prec_t precision_bits = 0;
  /// (cos, sin)(pi/2^k) for k = 0..n: R_{k+1} rotates clockwise by pi/2^k.
  std::vector<IntervalPair> rotations;
  std::vector<IntervalPair> vertices;
  std::vector<IntervalPair> midpoints;
  std::map<FormulationKey, ExtendedFormulation> formulations;
  IntervalScalar delta;
  IntervalScalar polygon_area;
  /// bits[l] = b^l and subsets[l] = S_l as a bitmask (bit i-1 for vertex i).
  std::vector<std::vector<int>> bits;
  std::vector<std::uint32_t> subsets;
};

inline mpfr_prec_t default_precision(int n) { return static_cast<mpfr_prec_t>(10 * n + 64); }

/// b^l, with the interval trajectory checked against exact angle tracking.
std::vector<int> bit_vector(long ell, int n);
std::string bit_string(const std::vector<int>& bits);

Gadget build_gadget(const Graph& g, mpfr_prec_t precision_bits);

/// Lifts a boundary point of Q_{2^n} into the formulation for `key` along
/// the constructive trajectory: rotate by R_i, reflect when the second
/// entry is negative and i is not in the edge. The point has angle
/// index*pi/2^n; odd indices are vertices, even ones facet midpoints.
std::vector<IntervalScalar> lift_point(const Gadget& gadget, const FormulationKey& key, long index);

/// False only when some row is certainly violated by the enclosed point.
bool formulation_admits(const ExtendedFormulation& f, std::span<const IntervalScalar> point);

/// True iff the triangle at v_ell is cut off by the formulation of e.
bool cut_indicator(const Gadget& gadget, const Edge& e, long ell);

/// Angle indices of the cut vertices of P_G, in increasing order.
std::vector<long> cut_vertices(const Graph& g, mpfr_prec_t precision_bits);

IntervalScalar area_via_gadget(const Graph& g, mpfr_prec_t precision_bits);

enum class CountMode { area, brute };

std::uint64_t count_is(const Graph& g, CountMode mode, int max_n = 10);

struct EnvelopeExpectations {
  IntervalScalar emax;
  IntervalScalar emin;
};

/// E[max z_1] and E[min z_1] over (xi, z_1) in P_G with xi ~ U[-1,1].
EnvelopeExpectations envelope_expectations(const Graph& g, mpfr_prec_t precision_bits);
IntervalScalar envelope_expectation(const Graph& g, mpfr_prec_t precision_bits);

/// The d = 1 program min c x + E[Q(x, xi)], Q = min -z_1 over x P_G with
/// y_1 = x xi. Gadget coefficients are rounded to multiples of 2^-bits and
/// the terminal rows are relaxed by `terminal_margin`, which absorbs the
/// rounding error along the lifts of (+-1, 0) and keeps the recourse
/// complete on [-1, 1].
struct GraphProgram {
  StochasticProgram program;
  Rational rounding_radius;
  Rational terminal_margin;
  std::size_t formulation_rows = 0;
  int rational_bits = 0;
  int n = 0;
};

GraphProgram sslp_from_graph(const Graph& g, int rational_bits);

/// Solves the first-stage problem of the graph program for cost c.
using ExpectationOracle = std::function<FirstStageSolution(const Rational& c)>;

/// Decides each query from certified enclosures of E[max z_1].
ExpectationOracle envelope_oracle(const Graph& g);
/// Runs solve_first_stage on the rationalized program (small n only).
ExpectationOracle program_oracle(const GraphProgram& gp);

struct BisectionResult {
  IntervalScalar interval;
  int calls = 0;
  /// False when the check at c = 1/2 failed and the bracket was widened.
  bool bracket_held = true;
};

/// `perturbation` bounds |E_oracle - E| for oracles that answer for a
/// perturbed polygon (the rationalized program); it loosens the protocol
/// checks and widens the returned enclosure by the same amount.
BisectionResult bisection_expectation(const Graph& g, const ExpectationOracle& oracle,
                                      const Rational& perturbation = 0);

/// Perturbation bound used with program_oracle: 2^{n+2} times the margin.
Rational program_perturbation(const GraphProgram& gp);

}  // namespace sslp
