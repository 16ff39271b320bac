#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sslp/lp.hpp"
#include "sslp/polynomial.hpp"
#include "sslp/rational.hpp"

namespace sslp {

/// a . xi <= rhs
struct HalfSpace {
  RationalVector a;
  Rational rhs;
};

struct Box {
  RationalVector lower;
  RationalVector upper;
};

/// {xi in R^dim | rows} intersected with the optional box.
struct HPolytope {
  std::size_t dim = 0;
  std::vector<HalfSpace> rows;
  std::optional<Box> box;

  /// Throws InvalidArgumentError when row lengths or box bounds are off.
  void validate() const;
  /// Rows plus the box written as 2*dim extra rows.
  std::vector<HalfSpace> all_rows() const;
  bool contains(std::span<const Rational> point) const;

  static HPolytope unit_cube(std::size_t dim);
};

enum class Sense { maximize, minimize };

struct LPResult {
  LpStatus status = LpStatus::infeasible;
  Rational value;
  RationalVector point;
};

LPResult solve_lp(const HPolytope& p, std::span<const Rational> objective, Sense sense);

/// True when some point satisfies every row strictly.
bool has_interior(const HPolytope& p);

/// True when the polytope is bounded (box present, or every coordinate is
/// bounded in both directions).
bool is_bounded(const HPolytope& p);

/// Drops rows implied by the remaining rows and the box.
HPolytope remove_redundant_rows(const HPolytope& p);

/// Exact volume by recursive facet decomposition. Zero for empty or flat
/// bodies; throws InvalidArgumentError when unbounded.
Rational lasserre_volume(const HPolytope& p);

/// All vertices, lexicographically sorted. dim <= 3 only.
std::vector<RationalVector> enumerate_vertices(const HPolytope& p);

using Simplex = std::vector<RationalVector>;
/// Triangulation by fans from the first vertex; empty for flat bodies.
std::vector<Simplex> triangulate(const HPolytope& p);

/// Exact integrals of several polynomials of total degree <= 2 over p.
std::vector<Rational> integrate_triangulated(const HPolytope& p, std::span<const Polynomial> integrands);
Rational integrate_quadratic_triangulated(const HPolytope& p, const Polynomial& q);

struct McEstimate {
  Rational estimate;
  /// Upper bound on the standard error.
  Rational stderr_bound;
};

/// Hit-ratio estimate of vol(p) / vol(box) scaled by vol(box).
McEstimate mc_volume(const HPolytope& p, std::uint64_t samples, std::uint64_t seed);

/// Dyadic upper bound on sqrt(value) (128-bit upward rounding).
Rational sqrt_upper(const Rational& value);

}  // namespace sslp
