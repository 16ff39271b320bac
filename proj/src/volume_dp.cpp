#include "sslp/volume_dp.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>

#include "sslp/errors.hpp"
#include "sslp/polytope.hpp"

namespace sslp {

long IntegerSystem::norm_inf() const {
  long best = 0;
  for (const auto& row : A)
    for (long v : row) best = std::max(best, std::labs(v));
  return best;
}

void IntegerSystem::validate() const {
  if (A.empty() || A[0].empty()) throw InvalidArgumentError("IntegerSystem: matrix must be non-empty");
  for (const auto& row : A) {
    if (row.size() != A[0].size()) throw InvalidArgumentError("IntegerSystem: ragged matrix");
  }
}

namespace {

// Left null space of the block A[rows, cols] when it is one-dimensional;
// empty otherwise.
RationalVector unique_left_dependency(const IntegerSystem& sys, const std::vector<std::size_t>& rows,
                                      const std::vector<std::size_t>& cols) {
  const std::size_t r = rows.size();
  // Solve lambda^T A[rows, cols] = 0, i.e. M lambda = 0 with M = A^T.
  RationalMatrix M(cols.size(), RationalVector(r));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t i = 0; i < r; ++i) M[c][i] = sys.A[rows[i]][cols[c]];
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < r && row < M.size(); ++col) {
    std::size_t p = row;
    while (p < M.size() && sgn(M[p][col]) == 0) ++p;
    if (p == M.size()) continue;
    std::swap(M[p], M[row]);
    const Rational inv = 1 / M[row][col];
    for (auto& v : M[row]) v *= inv;
    for (std::size_t q = 0; q < M.size(); ++q) {
      if (q == row || sgn(M[q][col]) == 0) continue;
      const Rational f = M[q][col];
      for (std::size_t j = 0; j < r; ++j) M[q][j] -= f * M[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  if (r - pivot_col.size() != 1) return {};
  std::size_t free_col = 0;
  for (std::size_t j = 0, k = 0; j < r; ++j) {
    if (k < pivot_col.size() && pivot_col[k] == j) {
      ++k;
      continue;
    }
    free_col = j;
  }
  RationalVector lambda(r, Rational(0));
  lambda[free_col] = 1;
  for (std::size_t k = 0; k < pivot_col.size(); ++k) lambda[pivot_col[k]] = -M[k][free_col];
  return lambda;
}

long checked_long(const Integer& v) {
  if (!v.fits_slong_p()) throw UnsupportedError("volume_dp: value exceeds the machine integer range");
  return v.get_si();
}

Rational dot_int(const IntegerVector& lambda, std::span<const Rational> s) {
  Rational acc = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    if (lambda[i] != 0) acc += lambda[i] * s[i];
  return acc;
}

}  // namespace

std::vector<IntegerVector> wall_directions(const IntegerSystem& sys, std::size_t k) {
  const std::size_t m = sys.rows();
  if (m >= 20 || k >= 20) throw UnsupportedError("volume_dp: too many rows or columns for wall enumeration");
  std::vector<IntegerVector> out;
  for (std::size_t i = 0; i < m; ++i) {
    IntegerVector e(m, 0);
    e[i] = 1;
    out.push_back(std::move(e));
  }
  std::set<IntegerVector> seen(out.begin(), out.end());
  for (std::size_t rmask = 1; rmask < (std::size_t{1} << m); ++rmask) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m; ++i)
      if (rmask >> i & 1) rows.push_back(i);
    if (rows.size() < 2) continue;
    for (std::size_t cmask = 0; cmask < (std::size_t{1} << k); ++cmask) {
      std::vector<std::size_t> cols;
      for (std::size_t j = 0; j < k; ++j)
        if (cmask >> j & 1) cols.push_back(j);
      if (cols.size() + 1 < rows.size()) continue;
      RationalVector lam = unique_left_dependency(sys, rows, cols);
      if (lam.empty()) continue;
      if (std::any_of(lam.begin(), lam.end(), [](const Rational& v) { return sgn(v) == 0; })) continue;
      const Integer den = common_denominator(lam);
      std::vector<Integer> ints(lam.size());
      Integer g = 0;
      for (std::size_t i = 0; i < lam.size(); ++i) {
        ints[i] = Integer(lam[i] * den);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ints[i].get_mpz_t());
      }
      if (sgn(ints[0]) < 0) g = -g;
      IntegerVector dir(m, 0);
      for (std::size_t i = 0; i < rows.size(); ++i) dir[rows[i]] = checked_long(ints[i] / g);
      if (seen.insert(dir).second) out.push_back(std::move(dir));
    }
  }
  std::sort(out.begin() + static_cast<long>(m), out.end());
  return out;
}

VolumeTables::VolumeTables(IntegerSystem sys) : sys_(std::move(sys)) {
  sys_.validate();
  tables_.resize(sys_.cols() + 1);
  antiderivatives_.resize(sys_.cols() + 1);
  for (std::size_t k = 0; k < tables_.size(); ++k) {
    tables_[k].level = k;
    tables_[k].directions = wall_directions(sys_, k);
  }
}

ChamberKey VolumeTables::key_of(std::size_t level, std::span<const Rational> s) const {
  const auto& dirs = tables_[level].directions;
  ChamberKey key(dirs.size());
  // floor(lambda.s) on integer numerators over a common denominator.
  const Integer den = common_denominator(s);
  std::vector<Integer> num(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) num[i] = s[i].get_num() * (den / s[i].get_den());
  Integer acc, q;
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    acc = 0;
    for (std::size_t i = 0; i < num.size(); ++i)
      if (dirs[j][i] != 0) acc += dirs[j][i] * num[i];
    mpz_fdiv_q(q.get_mpz_t(), acc.get_mpz_t(), den.get_mpz_t());
    key[j] = checked_long(q);
  }
  return key;
}

Rational VolumeTables::volume(std::size_t level, std::span<const Rational> s) {
  if (s.size() != sys_.rows()) throw InvalidArgumentError("volume: right-hand side length differs from row count");
  return chamber_polynomial(level, s).evaluate(s);
}

const Polynomial& VolumeTables::chamber_polynomial(std::size_t level, std::span<const Rational> s) {
  ChamberKey key = key_of(level, s);
  auto& entries = tables_[level].entries;
  auto it = entries.find(key);
  if (it != entries.end()) return it->second;
  Polynomial p = fit_chamber(level, key);
  return entries.emplace(std::move(key), std::move(p)).first->second;
}

Polynomial VolumeTables::fit_chamber(std::size_t level, const ChamberKey& key) {
  const std::size_t m = sys_.rows();
  // The unit directions come first, so key[0..m) is the integer corner of
  // the unit box holding the chamber.
  if (level == 0) {
    bool nonneg = std::all_of(key.begin(), key.begin() + static_cast<long>(m), [](long c) { return c >= 0; });
    return nonneg ? Polynomial::constant(m, Rational(1)) : Polynomial(m);
  }
  // Row-wise tests over the whole unit box: every row redundant -> volume
  // 1; some row unsatisfiable in the interior -> volume 0.
  bool all_redundant = true;
  for (std::size_t i = 0; i < m; ++i) {
    long hi = 0, lo = 0;
    for (std::size_t j = 0; j < level; ++j) {
      hi += std::max(sys_.A[i][j], 0L);
      lo += std::min(sys_.A[i][j], 0L);
    }
    if (lo >= key[i] + 1) {
      ++shortcuts_;
      return Polynomial(m);
    }
    if (hi > key[i]) all_redundant = false;
  }
  if (all_redundant) {
    ++shortcuts_;
    return Polynomial::constant(m, Rational(1));
  }
  HPolytope probe = HPolytope::unit_cube(level);
  for (std::size_t i = 0; i < m; ++i) {
    RationalVector a(level);
    for (std::size_t j = 0; j < level; ++j) a[j] = sys_.A[i][j];
    probe.rows.push_back({std::move(a), Rational(key[i] + 1)});
  }
  if (!has_interior(probe)) {
    ++shortcuts_;
    return Polynomial(m);
  }

  // Deepest point of the chamber: max tau with z + tau <= lambda.s <= z + 1 - tau.
  const auto& dirs = tables_[level].directions;
  HPolytope chamber;
  chamber.dim = m + 1;
  long width = 1;
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    RationalVector up(m + 1), down(m + 1);
    long norm1 = 0;
    for (std::size_t i = 0; i < m; ++i) {
      up[i] = dirs[j][i];
      down[i] = -dirs[j][i];
      norm1 += std::labs(dirs[j][i]);
    }
    width = std::max(width, norm1);
    up[m] = 1;
    down[m] = 1;
    chamber.rows.push_back({std::move(up), Rational(key[j] + 1)});
    chamber.rows.push_back({std::move(down), Rational(-key[j])});
  }
  RationalVector cap(m + 1, Rational(0));
  cap[m] = 1;
  chamber.rows.push_back({cap, Rational(1)});
  LPResult deep = solve_lp(chamber, cap, Sense::maximize);
  if (deep.status != LpStatus::optimal || sgn(deep.value) <= 0) {
    throw InternalConsistencyError("volume_dp: chamber without interior");
  }
  const RationalVector center(deep.point.begin(), deep.point.begin() + static_cast<long>(m));
  // Nodes center + h alpha, |alpha| <= k, stay within an L-infinity ball of
  // radius rho = tau / (2 width) around the center, hence inside the chamber.
  const Rational h = deep.value / (2 * width * static_cast<long>(level));

  std::vector<std::vector<unsigned>> alphas;
  std::vector<unsigned> alpha(m, 0);
  std::function<void(std::size_t, unsigned)> gen = [&](std::size_t i, unsigned left) {
    if (i == m) {
      alphas.push_back(alpha);
      return;
    }
    for (unsigned a = 0; a <= left; ++a) {
      alpha[i] = a;
      gen(i + 1, left - a);
    }
    alpha[i] = 0;
  };
  gen(0, static_cast<unsigned>(level));
  std::map<std::vector<unsigned>, Rational> values;
  RationalVector s(m);
  for (const auto& a : alphas) {
    for (std::size_t i = 0; i < m; ++i) s[i] = center[i] + h * a[i];
    values.emplace(a, integrate_previous_level(level, s));
  }
  ++fitted_;

  // Newton form on the simplex lattice:
  //   p(u) = sum_alpha Delta^alpha f(0) prod_i binom(u_i, alpha_i),
  //   Delta^alpha f(0) = sum_{beta <= alpha} (-1)^{|alpha - beta|} prod_i binom(alpha_i, beta_i) f(beta).
  std::vector<std::vector<Polynomial>> falling(m);
  for (std::size_t i = 0; i < m; ++i) {
    falling[i].push_back(Polynomial::constant(m, Rational(1)));
    for (std::size_t a = 1; a <= level; ++a) {
      Polynomial f = falling[i].back() *
                     (Polynomial::variable(m, i) - Polynomial::constant(m, Rational(static_cast<long>(a - 1))));
      falling[i].push_back(f * make_rational(1, static_cast<long>(a)));
    }
  }
  Polynomial local(m);
  std::vector<unsigned> beta(m);
  for (const auto& a : alphas) {
    Rational diff = 0;
    std::function<void(std::size_t, Integer, unsigned)> sum = [&](std::size_t i, Integer weight, unsigned drop) {
      if (i == m) {
        if (drop % 2) diff -= weight * values.at(beta);
        else diff += weight * values.at(beta);
        return;
      }
      Integer binom = 1;
      for (unsigned b = 0; b <= a[i]; ++b) {
        beta[i] = b;
        sum(i + 1, weight * binom, drop + (a[i] - b));
        binom = binom * (a[i] - b) / (b + 1);
      }
    };
    sum(0, Integer(1), 0);
    if (sgn(diff) == 0) continue;
    Polynomial term = Polynomial::constant(m, diff);
    for (std::size_t i = 0; i < m; ++i)
      if (a[i]) term = term * falling[i][a[i]];
    local += term;
  }
  std::vector<Polynomial> images;
  for (std::size_t i = 0; i < m; ++i) {
    RationalVector coeffs(m, Rational(0));
    coeffs[i] = 1 / h;
    images.push_back(Polynomial::affine(-center[i] / h, coeffs));
  }
  Polynomial p = local.compose(images);
  if (p.total_degree() > static_cast<int>(level)) {
    throw InternalConsistencyError("volume_dp: fitted chamber polynomial exceeds the degree bound");
  }
  for (std::size_t i = 0; i < m; ++i) s[i] = center[i] + h / 2;
  if (p.evaluate(s) != integrate_previous_level(level, s)) {
    throw InternalConsistencyError("volume_dp: held-out chamber sample disagrees with the fit");
  }
  return p;
}

Rational VolumeTables::integrate_previous_level(std::size_t level, std::span<const Rational> s) {
  const std::size_t m = sys_.rows();
  const std::size_t col = level - 1;
  std::set<Rational> cuts{Rational(0), Rational(1)};
  // lambda.(s - a t) crosses the integer z at t = (lambda.s - z) / lambda.a.
  for (const auto& lambda : tables_[level - 1].directions) {
    long g = 0;
    for (std::size_t i = 0; i < m; ++i) g += lambda[i] * sys_.A[i][col];
    if (g == 0) continue;
    const Rational v = dot_int(lambda, s);
    const Rational lo = g > 0 ? Rational(v - g) : v;
    const Rational hi = g > 0 ? v : Rational(v - g);
    for (Integer z = ceil(lo); z <= floor(hi); ++z) {
      Rational t = (v - Rational(z)) / g;
      if (sgn(t) > 0 && t < 1) cuts.insert(std::move(t));
    }
  }
  Rational total = 0;
  std::vector<Rational> bounds(cuts.begin(), cuts.end());
  RationalVector point(m);
  RationalVector at(s.begin(), s.end());
  at.push_back(0);
  for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
    const Rational& t0 = bounds[seg];
    const Rational& t1 = bounds[seg + 1];
    const Rational mid = (t0 + t1) / 2;
    for (std::size_t i = 0; i < m; ++i) point[i] = s[i] - sys_.A[i][col] * mid;
    const Polynomial& prev = chamber_polynomial(level - 1, point);
    if (prev.is_zero()) continue;
    const Polynomial& anti = line_antiderivative(level, prev);
    at[m] = t1;
    total += anti.evaluate(at);
    at[m] = t0;
    total -= anti.evaluate(at);
  }
  return total;
}

const Polynomial& VolumeTables::line_antiderivative(std::size_t level, const Polynomial& prev) {
  auto& cache = antiderivatives_[level];
  if (auto it = cache.find(&prev); it != cache.end()) return it->second;
  const std::size_t m = sys_.rows();
  const std::size_t col = level - 1;
  std::vector<Polynomial> images;
  for (std::size_t i = 0; i < m; ++i) {
    images.push_back(Polynomial::variable(m + 1, i) - Polynomial::variable(m + 1, m) * Rational(sys_.A[i][col]));
  }
  const Polynomial along = prev.compose(images);
  Polynomial anti(m + 1);
  for (const auto& [e, c] : along.terms()) {
    Exponents f = e;
    ++f[m];
    anti.add_term(f, c / static_cast<unsigned long>(f[m]));
  }
  return cache.emplace(&prev, std::move(anti)).first->second;
}

Rational volume_dp(const IntegerSystem& sys, std::span<const Rational> b) {
  VolumeTables tables(sys);
  return tables.volume(b);
}

LineRestriction line_restriction(const IntegerSystem& sys, std::span<const long> b, std::span<const long> b_dir) {
  sys.validate();
  const std::size_t m = sys.rows();
  const std::size_t d = sys.cols();
  if (b.size() != m || b_dir.size() != m) throw InvalidArgumentError("line_restriction: vector length differs from row count");
  long norm = 0;
  for (long v : b_dir) norm = std::max(norm, std::labs(v));
  if (norm == 0) throw InvalidArgumentError("line_restriction: direction must be nonzero");
  LineRestriction out;
  out.direction.assign(b_dir.begin(), b_dir.end());
  // b is integral, so t = 0 lies on every wall lambda.s in Z and the next
  // crossing along b_dir is at t = 1/|lambda.b_dir| at the earliest.
  long steep = norm;
  for (const IntegerVector& lambda : wall_directions(sys, d)) {
    Integer v = 0;
    for (std::size_t i = 0; i < m; ++i) v += Integer(lambda[i]) * b_dir[i];
    steep = std::max(steep, std::labs(checked_long(v)));
  }
  out.t_max = make_rational(1, steep);

  VolumeTables tables(sys);
  auto at = [&](const Rational& t) {
    RationalVector point(m);
    for (std::size_t i = 0; i < m; ++i) point[i] = b[i] + t * b_dir[i];
    return tables.volume(point);
  };
  std::vector<std::pair<Rational, Rational>> pts;
  // Samples avoid t = 0, where a zero row of A can make the volume jump.
  const long n = static_cast<long>(d) + 1;
  for (long j = 1; j <= n; ++j) {
    Rational t = out.t_max * make_rational(j, n);
    pts.emplace_back(t, at(t));
  }
  out.poly = interpolate_univariate(pts);
  const Rational held_out = out.t_max * make_rational(1, 2 * n);
  const Rational predicted = out.poly.evaluate(std::span<const Rational>(&held_out, 1));
  if (predicted != at(held_out)) {
    throw InternalConsistencyError("line_restriction: held-out evaluation disagrees with the degree-d fit");
  }
  return out;
}

namespace {

// Appends columns u_v (one per lifted index) with rows u_v - xi_{index} <= 0.
IntegerSystem lifted_system(const IntegerSystem& sys, const std::vector<std::size_t>& indices) {
  IntegerSystem out = sys;
  const std::size_t d = sys.cols();
  const std::size_t extra = indices.size();
  for (auto& row : out.A) row.resize(d + extra, 0);
  for (std::size_t v = 0; v < extra; ++v) {
    IntegerVector row(d + extra, 0);
    row[indices[v]] = -1;
    row[d + v] = 1;
    out.A.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::vector<Rational> quad_moments(const IntegerSystem& sys, std::span<const Rational> b,
                                   std::span<const Polynomial> integrands) {
  sys.validate();
  const std::size_t d = sys.cols();
  std::map<std::vector<std::size_t>, Rational> cache;
  auto moment = [&](const std::vector<std::size_t>& idx) -> const Rational& {
    auto it = cache.find(idx);
    if (it != cache.end()) return it->second;
    RationalVector rhs(b.begin(), b.end());
    rhs.resize(rhs.size() + idx.size(), Rational(0));
    Rational v = volume_dp(lifted_system(sys, idx), rhs);
    return cache.emplace(idx, std::move(v)).first->second;
  };
  std::vector<Rational> out;
  for (const auto& q : integrands) {
    if (q.num_vars() != d) throw InvalidArgumentError("quad_moment: polynomial has the wrong number of variables");
    if (q.total_degree() > 2) throw UnsupportedError("quad_moment: degree > 2");
    Rational acc = 0;
    for (const auto& [e, c] : q.terms()) {
      std::vector<std::size_t> idx;
      for (std::size_t j = 0; j < d; ++j)
        for (std::uint32_t t = 0; t < e[j]; ++t) idx.push_back(j);
      acc += c * moment(idx);
    }
    out.push_back(acc);
  }
  return out;
}

Rational quad_moment(const IntegerSystem& sys, std::span<const Rational> b, const Polynomial& q) {
  return quad_moments(sys, b, std::span<const Polynomial>(&q, 1)).front();
}

}  // namespace sslp
