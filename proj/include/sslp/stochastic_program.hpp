#pragma once

#include <span>
#include <vector>

#include "sslp/lp.hpp"
#include "sslp/polytope.hpp"
#include "sslp/rational.hpp"

namespace sslp {

/// min c.x + E_xi[Q(x, xi)] s.t. A x <= b, where
/// Q(x, xi) = min q_xi.y s.t. W y = h_xi - T_xi x, y >= 0 and xi ~ U[l, u].
/// The random data is affine in xi:
///   q_xi = q0 + Qmat xi, T_xi = T0 + sum_k xi_k Tk[k], h_xi = h0 + Hmat xi.
struct StochasticProgram {
  std::size_t n1 = 0, m1 = 0, n2 = 0, m2 = 0, d = 0;
  RationalVector c;
  RationalMatrix A;
  RationalVector b;
  RationalMatrix W;
  RationalVector q0;
  RationalMatrix Qmat;  // n2 x d
  RationalMatrix T0;    // m2 x n1
  std::vector<RationalMatrix> Tk;
  RationalVector h0;
  RationalMatrix Hmat;  // m2 x d
  RationalVector l, u;

  /// Checks every dimension and l < u. Throws InvalidArgumentError.
  void validate() const;
  /// Certifies that {x | Ax <= b} is non-empty and bounded (2 n1 LPs).
  void certify_first_stage() const;

  HPolytope first_stage_polytope() const;
  bool first_stage_feasible(std::span<const Rational> x) const;

  bool objective_random() const;
  RationalVector q_at(std::span<const Rational> xi) const;
  RationalMatrix T_at(std::span<const Rational> xi) const;
  /// h_xi - T_xi x.
  RationalVector rhs_at(std::span<const Rational> x, std::span<const Rational> xi) const;
  /// Affine pieces of the right-hand side: r(xi) = r0 + sum_k xi_k r_k.
  RationalVector rhs_constant(std::span<const Rational> x) const;
  RationalVector rhs_slope(std::span<const Rational> x, std::size_t k) const;

  /// Zero-filled program of the given sizes with box [0,1]^d.
  static StochasticProgram zeros(std::size_t n1, std::size_t m1, std::size_t n2, std::size_t m2, std::size_t d);
};

/// Newsvendor: x in [0,1], Q(x, xi) = min y1 s.t. y1 - y2 = xi - x, y >= 0,
/// xi ~ U[0,1], so E[Q] = (1-x)^2/2.
StochasticProgram newsvendor(const Rational& c);

struct SecondStageResult {
  LpStatus status = LpStatus::infeasible;
  Rational value;
  RationalVector y;
  /// Optimal multipliers of W y = r.
  RationalVector dual;
};

SecondStageResult solve_second_stage(const StochasticProgram& sp, std::span<const Rational> x,
                                     std::span<const Rational> xi);

/// Subgradient of x -> Q(x, xi) from the optimal dual: -T_xi^T lambda.
RationalVector second_stage_subgradient(const StochasticProgram& sp, std::span<const Rational> xi,
                                        std::span<const Rational> dual);

}  // namespace sslp
