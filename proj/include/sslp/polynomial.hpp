#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "sslp/rational.hpp"

namespace sslp {

using Exponents = std::vector<std::uint32_t>;

/// Sparse multivariate polynomial with exact rational coefficients. Terms
/// with coefficient zero are never stored, so structural equality is
/// functional equality.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, Rational>;

  explicit Polynomial(std::size_t num_vars = 0) : num_vars_(num_vars) {}

  static Polynomial constant(std::size_t num_vars, const Rational& value);
  /// The polynomial x_var.
  static Polynomial variable(std::size_t num_vars, std::size_t var);
  /// c0 + sum_i coeffs[i] * x_i.
  static Polynomial affine(const Rational& c0, std::span<const Rational> coeffs);
  /// Univariate polynomial from dense coefficients (index = power).
  static Polynomial univariate(std::span<const Rational> dense);

  std::size_t num_vars() const { return num_vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Rational coefficient(const Exponents& e) const;
  void add_term(const Exponents& e, const Rational& c);

  /// -1 for the zero polynomial.
  int total_degree() const;
  int degree_in(std::size_t var) const;
  int max_variable_degree() const;

  Rational evaluate(std::span<const Rational> point) const;

  Polynomial derivative(std::size_t var) const;
  /// Dense coefficients of a univariate polynomial.
  std::vector<Rational> dense_univariate() const;

  /// Substitutes x_i := images[i] (each over a common variable set).
  Polynomial compose(std::span<const Polynomial> images) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Rational& factor);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& f) { return a *= f; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }
  friend bool operator<(const Polynomial& a, const Polynomial& b) {
    if (a.num_vars_ != b.num_vars_) return a.num_vars_ < b.num_vars_;
    return a.terms_ < b.terms_;
  }

 private:
  std::size_t num_vars_;
  TermMap terms_;
};

/// Dense univariate helpers (index = power).
using DenseUnivariate = std::vector<Rational>;
DenseUnivariate dense_multiply(const DenseUnivariate& a, const DenseUnivariate& b);
Rational dense_evaluate(const DenseUnivariate& p, const Rational& t);
/// Exact integral of a dense univariate polynomial over [a, b].
Rational dense_integrate(const DenseUnivariate& p, const Rational& a, const Rational& b);

/// Unique polynomial of degree < points.size() through the points.
/// Throws IllPosedError on duplicate abscissae.
Polynomial interpolate_univariate(std::span<const std::pair<Rational, Rational>> points);

/// Exact integral of a univariate polynomial over [a, b], a <= b.
Rational integrate_segment(const Polynomial& p, const Rational& a, const Rational& b);

struct Sample {
  RationalVector point;
  Rational value;
};

/// Fits the unique polynomial of per-variable degree <= per_variable_degree
/// through samples that form a full tensor grid. Throws IllPosedError for
/// any other sample set.
Polynomial fit_multivariate(std::span<const Sample> samples, unsigned per_variable_degree);

/// Tensor-grid interpolation. `axes[v]` are the distinct nodes on axis v;
/// `values` is row-major with the last axis varying fastest.
Polynomial interpolate_tensor(const std::vector<RationalVector>& axes, std::vector<Rational> values);

}  // namespace sslp
