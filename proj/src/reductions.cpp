#include "sslp/reductions.hpp"

#include <algorithm>
#include <functional>

#include "sslp/errors.hpp"
#include "sslp/recourse.hpp"

namespace sslp {

StochasticProgram shifted_recourse_program(const IntegerSystem& sys, std::span<const long> b, const Rational& t,
                                           const Rational& x) {
  sys.validate();
  const std::size_t m = sys.rows(), d = sys.cols();
  if (b.size() != m) throw InvalidArgumentError("shifted program: b length differs from the row count");
  if (sgn(x) <= 0) throw InvalidArgumentError("shifted program: x must be positive");
  StochasticProgram sp = StochasticProgram::zeros(1, 2, m + 1, 1, d);
  sp.A = {{Rational(1)}, {Rational(-1)}};
  sp.b = {x, -x};
  for (std::size_t j = 0; j <= m; ++j) sp.W[0][j] = 1;
  // min -(A xi - b - t e).y: q_xi = (b + t e) - A xi on the y columns.
  for (std::size_t j = 0; j < m; ++j) {
    sp.q0[j] = b[j] + t;
    for (std::size_t k = 0; k < d; ++k) sp.Qmat[j][k] = -sys.A[j][k];
  }
  // e.y + slack = x.
  sp.T0[0][0] = -1;
  return sp;
}

Rational polynomial_range(const IntegerSystem& sys) {
  sys.validate();
  const std::size_t m = sys.rows(), d = sys.cols();
  RationalMatrix rows;
  for (const auto& r : sys.A) rows.emplace_back(r.begin(), r.end());
  for (std::size_t k = 0; k < d; ++k) {
    RationalVector e(d, Rational(0));
    e[k] = 1;
    rows.push_back(std::move(e));
  }
  if (m + d > 24) throw UnsupportedError("polynomial_range: too many rows for minor enumeration");
  Rational h = 1;
  std::vector<std::size_t> pick(d);
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t start, std::size_t depth) {
    if (depth == d) {
      RationalMatrix sub;
      for (std::size_t r : pick) sub.push_back(rows[r]);
      h = std::max(h, Rational(abs(determinant(std::move(sub)))));
      return;
    }
    for (std::size_t r = start; r < rows.size(); ++r) {
      pick[depth] = r;
      choose(r + 1, depth + 1);
    }
  };
  choose(0, 0);
  return 1 / (Rational(static_cast<long>(d + 1)) * h);
}

RecourseVolume volume_via_recourse_detailed(const IntegerSystem& sys, std::span<const long> b, const Rational& x) {
  const std::size_t d = sys.cols();
  RecourseVolume out;
  out.range = polynomial_range(sys);
  auto p_at = [&](const Rational& t) {
    const StochasticProgram sp = shifted_recourse_program(sys, b, t, x);
    const RationalVector xv{x};
    // The program minimizes the negated Q_t.
    return Rational(-expected_recourse(sp, xv));
  };
  std::vector<std::pair<Rational, Rational>> pts;
  for (std::size_t j = 0; j <= d + 1; ++j) {
    const Rational t = out.range * make_rational(static_cast<long>(j), static_cast<long>(d + 1));
    out.samples.push_back(t);
    pts.emplace_back(t, p_at(t));
  }
  out.p = interpolate_univariate(pts);
  const Rational held = out.range / (2 * static_cast<long>(d + 1));
  if (out.p.evaluate(std::vector<Rational>{held}) != p_at(held)) {
    throw InternalConsistencyError("volume_via_recourse: fitted p exceeds degree d + 1");
  }
  const Polynomial dp = out.p.derivative(0);
  out.volume = dp.evaluate(std::vector<Rational>{Rational(0)}) / x + 1;
  return out;
}

Rational volume_via_recourse(const IntegerSystem& sys, std::span<const long> b, const Rational& x) {
  return volume_via_recourse_detailed(sys, b, x).volume;
}

}  // namespace sslp
