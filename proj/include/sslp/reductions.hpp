#pragma once

#include <vector>

#include "sslp/polynomial.hpp"
#include "sslp/stochastic_program.hpp"
#include "sslp/volume_dp.hpp"

namespace sslp {

/// Q_t(x, xi) = max (A xi - b - t e).y s.t. y >= 0, e.y <= x, written as the
/// minimization of the negated objective with one slack column (m2 = 1).
/// The first stage pins x; xi ~ U[0,1]^d.
StochasticProgram shifted_recourse_program(const IntegerSystem& sys, std::span<const long> b, const Rational& t,
                                           const Rational& x);

/// 1 / ((d+1) H) with H the largest |d x d minor| of [A; I]. Every
/// breakpoint of t -> vol(P(b + t e)) is 0 or lies beyond this value.
Rational polynomial_range(const IntegerSystem& sys);

struct RecourseVolume {
  Rational volume;
  /// p(t) = E[Q_t(x, xi)] on [0, range], fitted from d + 2 samples.
  Polynomial p;
  Rational range;
  std::vector<Rational> samples;
};

/// vol(P) = p'(0) / x + 1. Throws InternalConsistencyError when a held-out
/// sample contradicts the fitted p.
RecourseVolume volume_via_recourse_detailed(const IntegerSystem& sys, std::span<const long> b, const Rational& x);
Rational volume_via_recourse(const IntegerSystem& sys, std::span<const long> b, const Rational& x);

}  // namespace sslp
