#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sslp {

/// Exact rational number; always kept canonical (lowest terms, positive
/// denominator) by the helpers in this header.
using Rational = mpq_class;
using Integer = mpz_class;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

/// Parses "p", "p/q" or "-p/q". Throws InvalidArgumentError on malformed
/// text or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers are written as "p/1".
std::string to_string(const Rational& value);

Rational make_rational(long numerator, long denominator = 1);

Integer floor(const Rational& value);
Integer ceil(const Rational& value);

Rational dot(std::span<const Rational> a, std::span<const Rational> b);

/// Least common multiple of the denominators.
Integer common_denominator(std::span<const Rational> values);

RationalMatrix identity_matrix(std::size_t n);
RationalMatrix transpose(const RationalMatrix& m);

/// Exact inverse via Gauss-Jordan; returns false when singular.
bool invert(const RationalMatrix& m, RationalMatrix& inverse);
Rational determinant(RationalMatrix m);

/// Solves the square system m x = rhs; returns false when singular.
bool solve_linear(RationalMatrix m, RationalVector rhs, RationalVector& x);

RationalVector multiply(const RationalMatrix& m, std::span<const Rational> v);

}  // namespace sslp
