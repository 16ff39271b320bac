#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

#include "sslp/rational.hpp"

namespace sslp {

/// Closed interval [lo, hi] with MPFR endpoints. Every operation rounds
/// outward, so the exact real result of an operation chain on enclosed
/// inputs stays enclosed.
class IntervalScalar {
 public:
  explicit IntervalScalar(mpfr_prec_t precision_bits = 128);
  IntervalScalar(const Rational& value, mpfr_prec_t precision_bits);
  IntervalScalar(const Rational& lo, const Rational& hi, mpfr_prec_t precision_bits);
  IntervalScalar(const IntervalScalar& other);
  IntervalScalar(IntervalScalar&& other) noexcept;
  IntervalScalar& operator=(IntervalScalar other) noexcept;
  ~IntervalScalar();

  friend void swap(IntervalScalar& a, IntervalScalar& b) noexcept {
    mpfr_swap(a.lo_, b.lo_);
    mpfr_swap(a.hi_, b.hi_);
    std::swap(a.precision_, b.precision_);
  }

  mpfr_prec_t precision() const { return precision_; }

  Rational lower() const;
  Rational upper() const;
  Rational midpoint() const;
  /// hi - lo, rounded up.
  Rational width() const;

  bool contains(const Rational& value) const;
  bool contains(const IntervalScalar& other) const;
  bool overlaps(const IntervalScalar& other) const;

  bool certainly_positive() const { return mpfr_sgn(lo_) > 0; }
  bool certainly_negative() const { return mpfr_sgn(hi_) < 0; }
  bool certainly_nonnegative() const { return mpfr_sgn(lo_) >= 0; }
  bool certainly_nonpositive() const { return mpfr_sgn(hi_) <= 0; }
  /// +1 / -1 when the sign is certified, 0 when the interval meets zero.
  int certified_sign() const;

  IntervalScalar operator-() const;
  friend IntervalScalar operator+(const IntervalScalar& a, const IntervalScalar& b);
  friend IntervalScalar operator-(const IntervalScalar& a, const IntervalScalar& b);
  friend IntervalScalar operator*(const IntervalScalar& a, const IntervalScalar& b);
  /// Throws InvalidArgumentError when the divisor interval contains zero.
  friend IntervalScalar operator/(const IntervalScalar& a, const IntervalScalar& b);
  IntervalScalar& operator+=(const IntervalScalar& b) { return *this = *this + b; }
  IntervalScalar& operator-=(const IntervalScalar& b) { return *this = *this - b; }
  IntervalScalar& operator*=(const IntervalScalar& b) { return *this = *this * b; }

  IntervalScalar scaled(const Rational& factor) const;
  /// Square root of the non-negative part; throws if certainly negative.
  IntervalScalar sqrt() const;
  IntervalScalar hull(const IntervalScalar& other) const;
  /// Widens both endpoints outward by `radius`.
  IntervalScalar inflated(const Rational& radius) const;

  std::string lower_string(int digits = 0) const;
  std::string upper_string(int digits = 0) const;
  double approx() const;

 private:
  mpfr_t lo_;
  mpfr_t hi_;
  mpfr_prec_t precision_;
};

struct IntervalPair {
  IntervalScalar first;
  IntervalScalar second;
};

/// Enclosures of (cos(pi/2^k), sin(pi/2^k)) with widths at most
/// 2^-precision_bits, built by the half-angle recurrence from cos(pi) = -1.
IntervalPair dyadic_trig(unsigned k, mpfr_prec_t precision_bits);

}  // namespace sslp
