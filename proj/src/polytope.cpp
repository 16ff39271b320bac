#include "sslp/polytope.hpp"

#include <mpfr.h>

#include <algorithm>
#include <map>
#include <set>

#include "sslp/errors.hpp"
#include "sslp/random.hpp"

namespace sslp {

void HPolytope::validate() const {
  for (const auto& r : rows) {
    if (r.a.size() != dim) throw InvalidArgumentError("HPolytope: row length differs from dim");
  }
  if (box) {
    if (box->lower.size() != dim || box->upper.size() != dim) {
      throw InvalidArgumentError("HPolytope: box length differs from dim");
    }
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(box->lower[i] < box->upper[i])) throw InvalidArgumentError("HPolytope: box requires lower < upper");
    }
  }
}

std::vector<HalfSpace> HPolytope::all_rows() const {
  std::vector<HalfSpace> out = rows;
  if (box) {
    for (std::size_t i = 0; i < dim; ++i) {
      RationalVector lo(dim, Rational(0)), hi(dim, Rational(0));
      lo[i] = -1;
      hi[i] = 1;
      out.push_back({lo, -box->lower[i]});
      out.push_back({hi, box->upper[i]});
    }
  }
  return out;
}

bool HPolytope::contains(std::span<const Rational> point) const {
  for (const auto& r : rows) {
    if (dot(r.a, point) > r.rhs) return false;
  }
  if (box) {
    for (std::size_t i = 0; i < dim; ++i) {
      if (point[i] < box->lower[i] || point[i] > box->upper[i]) return false;
    }
  }
  return true;
}

HPolytope HPolytope::unit_cube(std::size_t dim) {
  HPolytope p;
  p.dim = dim;
  p.box = Box{RationalVector(dim, Rational(0)), RationalVector(dim, Rational(1))};
  return p;
}

LPResult solve_lp(const HPolytope& p, std::span<const Rational> objective, Sense sense) {
  p.validate();
  if (objective.size() != p.dim) throw InvalidArgumentError("solve_lp: objective length differs from dim");
  const std::size_t d = p.dim;
  const std::size_t nrows = p.rows.size() + (p.box ? d : 0);
  const std::size_t nvars = p.box ? d : 2 * d;
  const std::size_t ncols = nvars + nrows;
  RationalMatrix A(nrows, RationalVector(ncols, Rational(0)));
  RationalVector b(nrows);
  RationalVector c(ncols, Rational(0));
  const int flip = sense == Sense::maximize ? -1 : 1;
  for (std::size_t j = 0; j < d; ++j) {
    c[j] = flip * objective[j];
    if (!p.box) c[d + j] = -c[j];
  }
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto& row = p.rows[i];
    b[i] = row.rhs;
    for (std::size_t j = 0; j < d; ++j) {
      A[i][j] = row.a[j];
      if (p.box) {
        b[i] -= row.a[j] * p.box->lower[j];
      } else {
        A[i][d + j] = -row.a[j];
      }
    }
    A[i][nvars + i] = 1;
  }
  if (p.box) {
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t i = p.rows.size() + j;
      A[i][j] = 1;
      A[i][nvars + i] = 1;
      b[i] = p.box->upper[j] - p.box->lower[j];
    }
  }
  const StandardFormResult res = solve_standard_form(A, b, c);
  LPResult out;
  out.status = res.status;
  if (res.status != LpStatus::optimal) return out;
  out.point.assign(d, Rational(0));
  for (std::size_t j = 0; j < d; ++j) {
    out.point[j] = p.box ? Rational(res.primal[j] + p.box->lower[j]) : Rational(res.primal[j] - res.primal[d + j]);
  }
  out.value = dot(objective, out.point);
  return out;
}

bool has_interior(const HPolytope& p) {
  HPolytope lifted;
  lifted.dim = p.dim + 1;
  for (const auto& r : p.all_rows()) {
    // 0 <= rhs holds everywhere or nowhere and never strictly matters.
    if (std::all_of(r.a.begin(), r.a.end(), [](const Rational& v) { return sgn(v) == 0; })) {
      if (sgn(r.rhs) < 0) return false;
      continue;
    }
    RationalVector a = r.a;
    a.push_back(Rational(1));
    lifted.rows.push_back({std::move(a), r.rhs});
  }
  RationalVector cap(p.dim + 1, Rational(0));
  cap.back() = 1;
  lifted.rows.push_back({cap, Rational(1)});
  const LPResult res = solve_lp(lifted, cap, Sense::maximize);
  return res.status == LpStatus::optimal && sgn(res.value) > 0;
}

bool is_bounded(const HPolytope& p) {
  if (p.box) return true;
  for (std::size_t j = 0; j < p.dim; ++j) {
    RationalVector e(p.dim, Rational(0));
    e[j] = 1;
    for (auto sense : {Sense::maximize, Sense::minimize}) {
      const LPResult r = solve_lp(p, e, sense);
      if (r.status == LpStatus::infeasible) return true;
      if (r.status == LpStatus::unbounded) return false;
    }
  }
  return true;
}

HPolytope remove_redundant_rows(const HPolytope& p) {
  HPolytope out = p;
  for (std::size_t i = 0; i < out.rows.size();) {
    HPolytope rest = out;
    const HalfSpace row = rest.rows[i];
    rest.rows.erase(rest.rows.begin() + static_cast<std::ptrdiff_t>(i));
    const LPResult r = solve_lp(rest, row.a, Sense::maximize);
    if (r.status == LpStatus::infeasible) return out;
    if (r.status == LpStatus::optimal && r.value <= row.rhs) {
      out.rows = std::move(rest.rows);
    } else {
      ++i;
    }
  }
  return out;
}

namespace {

// Scales every row so its first nonzero coefficient is +-1, drops trivial
// rows and keeps the tightest of parallel duplicates. Returns false when a
// trivial row is violated (empty set).
bool canonical_rows(const std::vector<HalfSpace>& in, std::vector<HalfSpace>& out) {
  std::map<RationalVector, Rational> tightest;
  std::vector<RationalVector> order;
  for (const auto& r : in) {
    std::size_t j = 0;
    while (j < r.a.size() && sgn(r.a[j]) == 0) ++j;
    if (j == r.a.size()) {
      if (sgn(r.rhs) < 0) return false;
      continue;
    }
    const Rational scale = 1 / abs(r.a[j]);
    RationalVector a(r.a.size());
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = r.a[k] * scale;
    Rational rhs = r.rhs * scale;
    auto [it, inserted] = tightest.try_emplace(a, rhs);
    if (inserted) {
      order.push_back(a);
    } else if (rhs < it->second) {
      it->second = rhs;
    }
  }
  out.clear();
  for (const auto& a : order) out.push_back({a, tightest[a]});
  return true;
}

Rational lasserre_rows(const std::vector<HalfSpace>& input, std::size_t d) {
  std::vector<HalfSpace> rows;
  if (!canonical_rows(input, rows)) return 0;
  if (d == 1) {
    std::optional<Rational> lo, hi;
    for (const auto& r : rows) {
      const Rational bound = r.rhs / r.a[0];
      if (sgn(r.a[0]) > 0) {
        if (!hi || bound < *hi) hi = bound;
      } else if (!lo || bound > *lo) {
        lo = bound;
      }
    }
    if (!lo || !hi) throw InvalidArgumentError("lasserre_volume: unbounded polytope");
    return *hi > *lo ? Rational(*hi - *lo) : Rational(0);
  }
  HPolytope p;
  p.dim = d;
  p.rows = rows;
  if (!has_interior(p)) return 0;
  Rational sum = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& ri = rows[i];
    if (sgn(ri.rhs) == 0) continue;
    std::size_t j = 0;
    for (std::size_t k = 1; k < d; ++k) {
      if (abs(ri.a[k]) > abs(ri.a[j])) j = k;
    }
    // Eliminate xi_j = (rhs_i - sum_{k != j} a_ik xi_k) / a_ij.
    std::vector<HalfSpace> facet;
    facet.reserve(rows.size() - 1);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k == i) continue;
      const auto& rk = rows[k];
      const Rational f = rk.a[j] / ri.a[j];
      HalfSpace h;
      h.a.reserve(d - 1);
      for (std::size_t c = 0; c < d; ++c) {
        if (c != j) h.a.push_back(rk.a[c] - f * ri.a[c]);
      }
      h.rhs = rk.rhs - f * ri.rhs;
      facet.push_back(std::move(h));
    }
    const Rational v = lasserre_rows(facet, d - 1);
    if (sgn(v) != 0) sum += ri.rhs * v / abs(ri.a[j]);
  }
  return sum / static_cast<unsigned long>(d);
}

// Orders points of a convex polygon counter-clockwise around their centroid.
void order_convex(std::vector<std::size_t>& idx, const std::vector<std::pair<Rational, Rational>>& pts) {
  Rational cx = 0, cy = 0;
  for (auto i : idx) {
    cx += pts[i].first;
    cy += pts[i].second;
  }
  cx /= static_cast<unsigned long>(idx.size());
  cy /= static_cast<unsigned long>(idx.size());
  auto half = [&](std::size_t i) {
    const int sy = sgn(pts[i].second - cy);
    const int sx = sgn(pts[i].first - cx);
    return (sy > 0 || (sy == 0 && sx > 0)) ? 0 : 1;
  };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    const Rational ax = pts[a].first - cx, ay = pts[a].second - cy;
    const Rational bx = pts[b].first - cx, by = pts[b].second - cy;
    return sgn(ax * by - ay * bx) > 0;
  });
}

void require_low_dim(const HPolytope& p) {
  if (p.dim == 0 || p.dim > 3) throw UnsupportedError("vertex enumeration supports dimensions 1..3 only");
}

}  // namespace

Rational lasserre_volume(const HPolytope& p) {
  p.validate();
  if (p.dim == 0) return 1;
  if (!is_bounded(p)) throw InvalidArgumentError("lasserre_volume: unbounded polytope");
  return lasserre_rows(p.all_rows(), p.dim);
}

std::vector<RationalVector> enumerate_vertices(const HPolytope& p) {
  p.validate();
  require_low_dim(p);
  if (!is_bounded(p)) throw InvalidArgumentError("enumerate_vertices: unbounded polytope");
  std::vector<HalfSpace> rows;
  if (!canonical_rows(p.all_rows(), rows)) return {};
  const std::size_t d = p.dim;
  const std::size_t m = rows.size();
  std::set<RationalVector> found;
  std::vector<std::size_t> pick(d);
  for (std::size_t i = 0; i < d; ++i) pick[i] = i;
  if (m < d) return {};
  for (;;) {
    RationalMatrix M(d);
    RationalVector rhs(d);
    for (std::size_t i = 0; i < d; ++i) {
      M[i] = rows[pick[i]].a;
      rhs[i] = rows[pick[i]].rhs;
    }
    RationalVector x;
    if (solve_linear(M, rhs, x)) {
      bool feasible = true;
      for (const auto& r : rows) {
        if (dot(r.a, x) > r.rhs) {
          feasible = false;
          break;
        }
      }
      if (feasible) found.insert(std::move(x));
    }
    std::size_t k = d;
    while (k > 0 && pick[k - 1] == m - d + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t i = k; i < d; ++i) pick[i] = pick[i - 1] + 1;
  }
  return {found.begin(), found.end()};
}

std::vector<Simplex> triangulate(const HPolytope& p) {
  require_low_dim(p);
  if (!has_interior(p)) return {};
  const std::vector<RationalVector> verts = enumerate_vertices(p);
  std::vector<Simplex> out;
  if (p.dim == 1) {
    out.push_back({verts.front(), verts.back()});
    return out;
  }
  if (p.dim == 2) {
    std::vector<std::pair<Rational, Rational>> pts;
    for (const auto& v : verts) pts.emplace_back(v[0], v[1]);
    std::vector<std::size_t> idx(verts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    order_convex(idx, pts);
    for (std::size_t i = 1; i + 1 < idx.size(); ++i) out.push_back({verts[idx[0]], verts[idx[i]], verts[idx[i + 1]]});
    return out;
  }
  std::vector<HalfSpace> rows;
  canonical_rows(p.all_rows(), rows);
  const RationalVector& apex = verts.front();
  for (const auto& r : rows) {
    std::vector<std::size_t> on;
    bool has_apex = false;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (dot(r.a, verts[i]) == r.rhs) {
        on.push_back(i);
        if (i == 0) has_apex = true;
      }
    }
    if (on.size() < 3 || has_apex) continue;
    std::size_t drop = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (abs(r.a[k]) > abs(r.a[drop])) drop = k;
    }
    const std::size_t u = drop == 0 ? 1 : 0;
    const std::size_t w = drop == 2 ? 1 : 2;
    std::vector<std::pair<Rational, Rational>> pts(verts.size());
    for (auto i : on) pts[i] = {verts[i][u], verts[i][w]};
    order_convex(on, pts);
    for (std::size_t i = 1; i + 1 < on.size(); ++i) {
      out.push_back({apex, verts[on[0]], verts[on[i]], verts[on[i + 1]]});
    }
  }
  return out;
}

std::vector<Rational> integrate_triangulated(const HPolytope& p, std::span<const Polynomial> integrands) {
  p.validate();
  require_low_dim(p);
  for (const auto& q : integrands) {
    if (q.total_degree() > 2) throw UnsupportedError("integrate_triangulated: degree > 2");
  }
  const std::size_t d = p.dim;
  std::vector<Rational> totals(integrands.size(), Rational(0));
  unsigned long factorial = 1;
  for (std::size_t i = 2; i <= d; ++i) factorial *= i;
  for (const auto& s : triangulate(p)) {
    RationalMatrix edges(d, RationalVector(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) edges[i][j] = s[i + 1][j] - s[0][j];
    const Rational vol = abs(determinant(edges)) / factorial;
    if (sgn(vol) == 0) continue;
    RationalVector sum(d, Rational(0));
    for (const auto& v : s)
      for (std::size_t j = 0; j < d; ++j) sum[j] += v[j];
    const unsigned long k1 = d + 1, k2 = (d + 1) * (d + 2);
    for (std::size_t q = 0; q < integrands.size(); ++q) {
      for (const auto& [e, c] : integrands[q].terms()) {
        std::vector<std::size_t> vars;
        for (std::size_t j = 0; j < d; ++j)
          for (std::uint32_t t = 0; t < e[j]; ++t) vars.push_back(j);
        Rational moment;
        if (vars.empty()) {
          moment = vol;
        } else if (vars.size() == 1) {
          moment = vol * sum[vars[0]] / k1;
        } else {
          Rational acc = sum[vars[0]] * sum[vars[1]];
          for (const auto& v : s) acc += v[vars[0]] * v[vars[1]];
          moment = vol * acc / k2;
        }
        totals[q] += c * moment;
      }
    }
  }
  return totals;
}

Rational integrate_quadratic_triangulated(const HPolytope& p, const Polynomial& q) {
  return integrate_triangulated(p, std::span<const Polynomial>(&q, 1)).front();
}

Rational sqrt_upper(const Rational& value) {
  mpfr_t x;
  mpfr_init2(x, 128);
  mpfr_set_q(x, value.get_mpq_t(), MPFR_RNDU);
  mpfr_sqrt(x, x, MPFR_RNDU);
  Rational r;
  mpfr_get_q(r.get_mpq_t(), x);
  mpfr_clear(x);
  return r;
}

namespace {

struct IntegerRow {
  std::vector<__int128> coeff;
  __int128 rhs;
};

bool fits(const Integer& z, int bits) { return mpz_sizeinbase(z.get_mpz_t(), 2) < static_cast<std::size_t>(bits); }

__int128 to_int128(const Integer& z) {
  Integer a = abs(z);
  __int128 v = 0;
  const std::size_t limbs = mpz_size(a.get_mpz_t());
  for (std::size_t i = limbs; i-- > 0;) {
    v = (v << 64) | static_cast<__int128>(mpz_getlimbn(a.get_mpz_t(), static_cast<mp_size_t>(i)));
  }
  return sgn(z) < 0 ? -v : v;
}

}  // namespace

McEstimate mc_volume(const HPolytope& p, std::uint64_t samples, std::uint64_t seed) {
  p.validate();
  if (samples == 0) throw InvalidArgumentError("mc_volume: samples must be positive");
  if (!p.box) throw InvalidArgumentError("mc_volume: a bounding box is required");
  const std::size_t d = p.dim;
  const Box& box = *p.box;
  Rational box_volume = 1;
  for (std::size_t i = 0; i < d; ++i) box_volume *= box.upper[i] - box.lower[i];

  // Sample point i-th coordinate: lower + (upper - lower) * (2k + 1) / 2^33.
  // Row test: sum C_i (2k_i + 1) <= R with C_i = a_i (u_i - l_i),
  // R = 2^33 (rhs - a.l), cleared of denominators.
  const Rational scale(Integer(1) << 33);
  std::vector<IntegerRow> fast;
  std::vector<std::pair<std::vector<Integer>, Integer>> slow;
  for (const auto& r : p.rows) {
    RationalVector vals(d + 1);
    Rational shift = r.rhs;
    for (std::size_t i = 0; i < d; ++i) {
      vals[i] = r.a[i] * (box.upper[i] - box.lower[i]);
      shift -= r.a[i] * box.lower[i];
    }
    vals[d] = scale * shift;
    const Integer den = common_denominator(vals);
    std::vector<Integer> ints(d + 1);
    bool small = true;
    for (std::size_t i = 0; i <= d; ++i) {
      Rational s = vals[i] * den;
      ints[i] = s.get_num();
      small = small && fits(ints[i], i < d ? 60 : 120);
    }
    if (small) {
      IntegerRow row;
      for (std::size_t i = 0; i < d; ++i) row.coeff.push_back(to_int128(ints[i]));
      row.rhs = to_int128(ints[d]);
      fast.push_back(std::move(row));
    } else {
      Integer rhs = ints[d];
      ints.pop_back();
      slow.emplace_back(std::move(ints), std::move(rhs));
    }
  }

  SplitMix64 rng(seed);
  std::vector<std::int64_t> odd(d);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < d; ++i) odd[i] = static_cast<std::int64_t>(2 * (rng.next() >> 32) + 1);
    bool inside = true;
    for (const auto& row : fast) {
      __int128 acc = 0;
      for (std::size_t i = 0; i < d; ++i) acc += row.coeff[i] * odd[i];
      if (acc > row.rhs) {
        inside = false;
        break;
      }
    }
    for (std::size_t r = 0; inside && r < slow.size(); ++r) {
      Integer acc = 0;
      for (std::size_t i = 0; i < d; ++i) acc += slow[r].first[i] * static_cast<long>(odd[i]);
      if (acc > slow[r].second) inside = false;
    }
    if (inside) ++hits;
  }
  Rational ratio(Integer(static_cast<unsigned long>(hits)), Integer(static_cast<unsigned long>(samples)));
  ratio.canonicalize();
  McEstimate out;
  out.estimate = box_volume * ratio;
  const Rational var = ratio * (1 - ratio) / Rational(Integer(static_cast<unsigned long>(samples)));
  out.stderr_bound = box_volume * sqrt_upper(var);
  return out;
}

}  // namespace sslp
