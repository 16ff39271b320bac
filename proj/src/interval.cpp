#include "sslp/interval.hpp"

#include <algorithm>
#include <cstdlib>

#include "sslp/errors.hpp"

namespace sslp {

namespace {

Rational to_rational(const mpfr_t x) {
  Rational r;
  mpfr_get_q(r.get_mpq_t(), x);
  return r;
}

std::string to_decimal(const mpfr_t x, mpfr_rnd_t rnd, int digits) {
  char* buf = nullptr;
  if (digits <= 0) {
    digits = static_cast<int>(mpfr_get_prec(x) * 0.30103) + 2;
  }
  mpfr_asprintf(&buf, "%.*R*e", digits, rnd, x);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

}  // namespace

IntervalScalar::IntervalScalar(mpfr_prec_t precision_bits) : precision_(precision_bits) {
  mpfr_init2(lo_, precision_);
  mpfr_init2(hi_, precision_);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

IntervalScalar::IntervalScalar(const Rational& value, mpfr_prec_t precision_bits)
    : IntervalScalar(value, value, precision_bits) {}

IntervalScalar::IntervalScalar(const Rational& lo, const Rational& hi, mpfr_prec_t precision_bits)
    : precision_(precision_bits) {
  mpfr_init2(lo_, precision_);
  mpfr_init2(hi_, precision_);
  mpfr_set_q(lo_, lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, hi.get_mpq_t(), MPFR_RNDU);
  if (lo > hi) throw InvalidArgumentError("interval with lo > hi");
}

IntervalScalar::IntervalScalar(const IntervalScalar& other) : precision_(other.precision_) {
  mpfr_init2(lo_, precision_);
  mpfr_init2(hi_, precision_);
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

IntervalScalar::IntervalScalar(IntervalScalar&& other) noexcept : precision_(other.precision_) {
  mpfr_init2(lo_, precision_);
  mpfr_init2(hi_, precision_);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

IntervalScalar& IntervalScalar::operator=(IntervalScalar other) noexcept {
  swap(*this, other);
  return *this;
}

IntervalScalar::~IntervalScalar() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Rational IntervalScalar::lower() const { return to_rational(lo_); }
Rational IntervalScalar::upper() const { return to_rational(hi_); }
Rational IntervalScalar::midpoint() const { return (lower() + upper()) / 2; }
Rational IntervalScalar::width() const { return upper() - lower(); }

bool IntervalScalar::contains(const Rational& value) const {
  return mpfr_cmp_q(lo_, value.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, value.get_mpq_t()) >= 0;
}

bool IntervalScalar::contains(const IntervalScalar& other) const {
  return mpfr_lessequal_p(lo_, other.lo_) && mpfr_greaterequal_p(hi_, other.hi_);
}

bool IntervalScalar::overlaps(const IntervalScalar& other) const {
  return mpfr_lessequal_p(lo_, other.hi_) && mpfr_lessequal_p(other.lo_, hi_);
}

int IntervalScalar::certified_sign() const {
  if (certainly_positive()) return 1;
  if (certainly_negative()) return -1;
  return 0;
}

IntervalScalar IntervalScalar::operator-() const {
  IntervalScalar r(precision_);
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

IntervalScalar operator+(const IntervalScalar& a, const IntervalScalar& b) {
  IntervalScalar r(std::max(a.precision_, b.precision_));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

IntervalScalar operator-(const IntervalScalar& a, const IntervalScalar& b) {
  IntervalScalar r(std::max(a.precision_, b.precision_));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

IntervalScalar operator*(const IntervalScalar& a, const IntervalScalar& b) {
  const mpfr_prec_t p = std::max(a.precision_, b.precision_);
  IntervalScalar r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  const mpfr_srcptr xs[2] = {a.lo_, a.hi_};
  const mpfr_srcptr ys[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : xs) {
    for (auto y : ys) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

IntervalScalar operator/(const IntervalScalar& a, const IntervalScalar& b) {
  if (b.certified_sign() == 0) throw InvalidArgumentError("interval division by an interval containing zero");
  const mpfr_prec_t p = std::max(a.precision_, b.precision_);
  IntervalScalar inv(p);
  mpfr_ui_div(inv.lo_, 1, b.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, b.lo_, MPFR_RNDU);
  return a * inv;
}

IntervalScalar IntervalScalar::scaled(const Rational& factor) const {
  return *this * IntervalScalar(factor, precision_);
}

IntervalScalar IntervalScalar::sqrt() const {
  if (certainly_negative()) throw InvalidArgumentError("square root of a negative interval");
  IntervalScalar r(precision_);
  if (mpfr_sgn(lo_) > 0) {
    mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
  } else {
    mpfr_set_zero(r.lo_, 1);
  }
  mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
  return r;
}

IntervalScalar IntervalScalar::hull(const IntervalScalar& other) const {
  IntervalScalar r(std::max(precision_, other.precision_));
  mpfr_min(r.lo_, lo_, other.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, hi_, other.hi_, MPFR_RNDU);
  return r;
}

IntervalScalar IntervalScalar::inflated(const Rational& radius) const {
  IntervalScalar r(*this);
  mpfr_t t;
  mpfr_init2(t, precision_);
  mpfr_set_q(t, radius.get_mpq_t(), MPFR_RNDU);
  mpfr_sub(r.lo_, lo_, t, MPFR_RNDD);
  mpfr_add(r.hi_, hi_, t, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

std::string IntervalScalar::lower_string(int digits) const { return to_decimal(lo_, MPFR_RNDD, digits); }
std::string IntervalScalar::upper_string(int digits) const { return to_decimal(hi_, MPFR_RNDU, digits); }

double IntervalScalar::approx() const {
  return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN));
}

IntervalPair dyadic_trig(unsigned k, mpfr_prec_t precision_bits) {
  const Rational target = Rational(1) / Rational(Integer(1) << static_cast<mp_bitcnt_t>(precision_bits));
  // Each half-angle step loses a few bits; start with generous guard bits.
  mpfr_prec_t work = precision_bits + 2 * static_cast<mpfr_prec_t>(k) + 32;
  for (int attempt = 0; attempt < 16; ++attempt, work *= 2) {
    IntervalScalar c(Rational(-1), work);
    IntervalScalar s(Rational(0), work);
    const IntervalScalar half(Rational(1, 2), work);
    const IntervalScalar one(Rational(1), work);
    for (unsigned i = 0; i < k; ++i) {
      // cos(t/2) = sqrt((1 + cos t)/2); sin(t/2) = sin t / (2 cos(t/2)),
      // except from t = pi where sin t = 0 and sin(pi/2) = 1.
      IntervalScalar c_half = ((one + c) * half).sqrt();
      IntervalScalar s_half = i == 0 ? ((one - c) * half).sqrt() : s / (c_half + c_half);
      c = std::move(c_half);
      s = std::move(s_half);
    }
    if (c.width() <= target && s.width() <= target) return {std::move(c), std::move(s)};
  }
  throw PrecisionError("dyadic_trig: precision target not reached");
}

}  // namespace sslp
