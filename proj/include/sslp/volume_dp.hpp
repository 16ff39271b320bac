#pragma once

#include <map>
#include <span>
#include <vector>

#include "sslp/polynomial.hpp"
#include "sslp/rational.hpp"

namespace sslp {

using IntegerVector = std::vector<long>;
using IntegerMatrix = std::vector<IntegerVector>;

/// Integer constraint matrix A (m x d) describing the parametric family
/// P(b) = {xi in [0,1]^d | A xi <= b}.
struct IntegerSystem {
  IntegerMatrix A;

  std::size_t rows() const { return A.size(); }
  std::size_t cols() const { return A.empty() ? 0 : A[0].size(); }
  long norm_inf() const;
  /// Throws InvalidArgumentError for an empty or ragged matrix.
  void validate() const;
};

using ChamberKey = std::vector<long>;

/// Primitive integer normals (first nonzero entry positive) of every wall
/// of s -> vol(P_k(s)), P_k(s) = {xi in [0,1]^k | A_k xi <= s} with A_k the
/// first k columns. A wall is where k+1 facets of P_k(s) become
/// concurrent; its normal is the unique left dependency of some row block
/// A[I, F]. Unit vectors come first. All walls lie on {lambda . s in Z}.
std::vector<IntegerVector> wall_directions(const IntegerSystem& sys, std::size_t k);

/// Piecewise-polynomial volume of P_k(s) for one level k. The volume is a
/// polynomial of total degree <= k on each chamber of the arrangement
/// {lambda . s in Z : lambda in directions}; a chamber is keyed by
/// (floor(lambda . s))_lambda and stores its polynomial in s.
struct ChamberTable {
  std::size_t level = 0;
  std::vector<IntegerVector> directions;
  std::map<ChamberKey, Polynomial> entries;
};

/// Lazily filled level tables for one integer system. Chambers are only
/// materialized when some evaluation reaches them.
class VolumeTables {
 public:
  explicit VolumeTables(IntegerSystem sys);

  const IntegerSystem& system() const { return sys_; }

  /// vol(P_level(s)).
  Rational volume(std::size_t level, std::span<const Rational> s);
  /// vol(P(b)) = vol(P_d(b)).
  Rational volume(std::span<const Rational> b) { return volume(sys_.cols(), b); }

  /// Polynomial of the chamber containing s (chambers are closed towards
  /// smaller lambda . s, open towards larger).
  const Polynomial& chamber_polynomial(std::size_t level, std::span<const Rational> s);
  const ChamberTable& table(std::size_t level) const { return tables_[level]; }

  /// vol(P_k(s)) = int_0^1 vol(P_{k-1}(s - a_k t)) dt for concrete s.
  Rational integrate_previous_level(std::size_t level, std::span<const Rational> s);

  std::size_t fitted_chambers() const { return fitted_; }
  std::size_t shortcut_chambers() const { return shortcuts_; }

 private:
  ChamberKey key_of(std::size_t level, std::span<const Rational> s) const;
  Polynomial fit_chamber(std::size_t level, const ChamberKey& key);

  /// Antiderivative in t of P(s - a_level t), in variables (s, t).
  const Polynomial& line_antiderivative(std::size_t level, const Polynomial& prev);

  IntegerSystem sys_;
  std::vector<ChamberTable> tables_;
  std::vector<std::map<const Polynomial*, Polynomial>> antiderivatives_;
  std::size_t fitted_ = 0;
  std::size_t shortcuts_ = 0;
};

Rational volume_dp(const IntegerSystem& sys, std::span<const Rational> b);

struct LineRestriction {
  IntegerVector direction;
  Rational t_max;
  /// Univariate in t, valid on (0, t_max].
  Polynomial poly;
};

/// vol(P(b + t b_dir)) as a polynomial in t on [0, t_max], where
/// t_max = 1/max|lambda . b_dir| over the wall directions (including the
/// unit vectors, so t_max <= 1/||b_dir||_inf). No wall is crossed inside.
/// The polynomial is fitted on (0, t_max]; it also holds at t = 0 unless a
/// zero row of A switches from feasible to infeasible there.
/// Throws InternalConsistencyError if a held-out evaluation disagrees.
LineRestriction line_restriction(const IntegerSystem& sys, std::span<const long> b, std::span<const long> b_dir);

/// Exact integral over P(b) of q (total degree <= 2 in d variables),
/// assembled from moments computed as volumes of lifted bodies.
Rational quad_moment(const IntegerSystem& sys, std::span<const Rational> b, const Polynomial& q);
std::vector<Rational> quad_moments(const IntegerSystem& sys, std::span<const Rational> b,
                                   std::span<const Polynomial> integrands);

}  // namespace sslp
