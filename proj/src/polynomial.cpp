#include "sslp/polynomial.hpp"

#include <algorithm>
#include <set>

#include "sslp/errors.hpp"

namespace sslp {

Polynomial Polynomial::constant(std::size_t num_vars, const Rational& value) {
  Polynomial p(num_vars);
  p.add_term(Exponents(num_vars, 0), value);
  return p;
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t var) {
  Polynomial p(num_vars);
  Exponents e(num_vars, 0);
  e[var] = 1;
  p.add_term(e, Rational(1));
  return p;
}

Polynomial Polynomial::affine(const Rational& c0, std::span<const Rational> coeffs) {
  Polynomial p(coeffs.size());
  p.add_term(Exponents(coeffs.size(), 0), c0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    Exponents e(coeffs.size(), 0);
    e[i] = 1;
    p.add_term(e, coeffs[i]);
  }
  return p;
}

Polynomial Polynomial::univariate(std::span<const Rational> dense) {
  Polynomial p(1);
  for (std::size_t i = 0; i < dense.size(); ++i) p.add_term({static_cast<std::uint32_t>(i)}, dense[i]);
  return p;
}

Rational Polynomial::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

int Polynomial::total_degree() const {
  int best = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (auto x : e) s += static_cast<int>(x);
    best = std::max(best, s);
  }
  return best;
}

int Polynomial::degree_in(std::size_t var) const {
  int best = -1;
  for (const auto& [e, c] : terms_) best = std::max(best, static_cast<int>(e[var]));
  return best;
}

int Polynomial::max_variable_degree() const {
  int best = -1;
  for (const auto& [e, c] : terms_)
    for (auto x : e) best = std::max(best, static_cast<int>(x));
  return terms_.empty() ? -1 : std::max(best, 0);
}

Rational Polynomial::evaluate(std::span<const Rational> point) const {
  // Powers are cached per variable.
  std::vector<std::vector<Rational>> powers(num_vars_);
  Rational sum = 0;
  for (const auto& [e, c] : terms_) {
    Rational term = c;
    for (std::size_t v = 0; v < num_vars_; ++v) {
      if (e[v] == 0) continue;
      auto& pw = powers[v];
      if (pw.empty()) pw.push_back(Rational(1));
      while (pw.size() <= e[v]) pw.push_back(pw.back() * point[v]);
      term *= pw[e[v]];
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  Polynomial d(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents f = e;
    f[var] -= 1;
    d.add_term(f, c * e[var]);
  }
  return d;
}

std::vector<Rational> Polynomial::dense_univariate() const {
  if (num_vars_ != 1) throw InvalidArgumentError("dense_univariate on a multivariate polynomial");
  std::vector<Rational> dense(static_cast<std::size_t>(std::max(total_degree(), 0)) + 1, Rational(0));
  for (const auto& [e, c] : terms_) dense[e[0]] = c;
  return dense;
}

Polynomial Polynomial::compose(std::span<const Polynomial> images) const {
  const std::size_t target_vars = images.empty() ? 0 : images[0].num_vars();
  std::vector<std::vector<Polynomial>> powers(num_vars_);
  Polynomial out(target_vars);
  for (const auto& [e, c] : terms_) {
    Polynomial term = Polynomial::constant(target_vars, c);
    for (std::size_t v = 0; v < num_vars_; ++v) {
      if (e[v] == 0) continue;
      auto& pw = powers[v];
      if (pw.empty()) pw.push_back(Polynomial::constant(target_vars, Rational(1)));
      while (pw.size() <= e[v]) pw.push_back(pw.back() * images[v]);
      term = term * pw[e[v]];
    }
    out += term;
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& factor) {
  if (sgn(factor) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= factor;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out(a.num_vars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponents e = ea;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

DenseUnivariate dense_multiply(const DenseUnivariate& a, const DenseUnivariate& b) {
  if (a.empty() || b.empty()) return {};
  DenseUnivariate out(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (sgn(b[j]) != 0) out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

Rational dense_evaluate(const DenseUnivariate& p, const Rational& t) {
  Rational acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * t + p[i];
  return acc;
}

Rational dense_integrate(const DenseUnivariate& p, const Rational& a, const Rational& b) {
  // Horner on the antiderivative.
  Rational fa = 0, fb = 0;
  for (std::size_t i = p.size(); i-- > 0;) {
    Rational c = p[i] / static_cast<unsigned long>(i + 1);
    fa = (fa + c) * a;
    fb = (fb + c) * b;
  }
  return fb - fa;
}

Polynomial interpolate_univariate(std::span<const std::pair<Rational, Rational>> points) {
  const std::size_t n = points.size();
  if (n == 0) return Polynomial(1);
  // Newton divided differences.
  std::vector<Rational> coef(n);
  for (std::size_t i = 0; i < n; ++i) coef[i] = points[i].second;
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      Rational dx = points[i].first - points[i - level].first;
      if (sgn(dx) == 0) throw IllPosedError("interpolate_univariate: duplicate abscissae");
      coef[i] = (coef[i] - coef[i - 1]) / dx;
    }
  }
  DenseUnivariate acc{coef[n - 1]};
  for (std::size_t i = n - 1; i-- > 0;) {
    acc = dense_multiply(acc, DenseUnivariate{-points[i].first, Rational(1)});
    acc[0] += coef[i];
  }
  return Polynomial::univariate(acc);
}

Rational integrate_segment(const Polynomial& p, const Rational& a, const Rational& b) {
  if (a > b) throw InvalidArgumentError("integrate_segment: a > b");
  if (p.is_zero()) return 0;
  return dense_integrate(p.dense_univariate(), a, b);
}

namespace {

// Monomial coefficients of the polynomial through (nodes[i], values[i]).
DenseUnivariate univariate_coefficients(const RationalVector& nodes, const std::vector<Rational>& values) {
  std::vector<std::pair<Rational, Rational>> pts;
  pts.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) pts.emplace_back(nodes[i], values[i]);
  const Polynomial p = interpolate_univariate(pts);
  DenseUnivariate dense(nodes.size(), Rational(0));
  for (const auto& [e, c] : p.terms()) dense[e[0]] = c;
  return dense;
}

}  // namespace

Polynomial interpolate_tensor(const std::vector<RationalVector>& axes, std::vector<Rational> values) {
  const std::size_t m = axes.size();
  std::vector<std::size_t> dims(m);
  std::size_t total = 1;
  for (std::size_t v = 0; v < m; ++v) {
    dims[v] = axes[v].size();
    total *= dims[v];
  }
  if (values.size() != total) throw IllPosedError("interpolate_tensor: value count does not match grid");
  // Process one axis at a time; stride of axis v is product of later dims.
  std::size_t stride = total;
  for (std::size_t v = 0; v < m; ++v) {
    const std::size_t n = dims[v];
    stride /= n;
    const std::size_t block = stride * n;
    std::vector<Rational> line(n);
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t j = 0; j < n; ++j) line[j] = values[base + off + j * stride];
        DenseUnivariate c = univariate_coefficients(axes[v], line);
        for (std::size_t j = 0; j < n; ++j) values[base + off + j * stride] = c[j];
      }
    }
  }
  Polynomial p(m);
  Exponents e(m, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t v = m; v-- > 0;) {
      e[v] = static_cast<std::uint32_t>(rem % dims[v]);
      rem /= dims[v];
    }
    p.add_term(e, values[idx]);
  }
  return p;
}

Polynomial fit_multivariate(std::span<const Sample> samples, unsigned per_variable_degree) {
  if (samples.empty()) throw IllPosedError("fit_multivariate: no samples");
  const std::size_t m = samples[0].point.size();
  std::vector<std::set<Rational>> coords(m);
  for (const auto& s : samples) {
    if (s.point.size() != m) throw IllPosedError("fit_multivariate: inconsistent sample dimension");
    for (std::size_t v = 0; v < m; ++v) coords[v].insert(s.point[v]);
  }
  std::vector<RationalVector> axes(m);
  std::size_t total = 1;
  for (std::size_t v = 0; v < m; ++v) {
    if (coords[v].size() != per_variable_degree + 1) {
      throw IllPosedError("fit_multivariate: axis does not carry degree+1 distinct nodes");
    }
    axes[v].assign(coords[v].begin(), coords[v].end());
    total *= axes[v].size();
  }
  if (samples.size() != total) throw IllPosedError("fit_multivariate: samples do not form a full tensor grid");
  std::vector<Rational> values(total);
  std::vector<bool> seen(total, false);
  for (const auto& s : samples) {
    std::size_t idx = 0;
    for (std::size_t v = 0; v < m; ++v) {
      auto pos = std::lower_bound(axes[v].begin(), axes[v].end(), s.point[v]) - axes[v].begin();
      idx = idx * axes[v].size() + static_cast<std::size_t>(pos);
    }
    if (seen[idx]) throw IllPosedError("fit_multivariate: repeated grid node");
    seen[idx] = true;
    values[idx] = s.value;
  }
  return interpolate_tensor(axes, std::move(values));
}

}  // namespace sslp
