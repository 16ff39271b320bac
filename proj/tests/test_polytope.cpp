#include <gtest/gtest.h>

#include <algorithm>

#include "sslp/errors.hpp"
#include "sslp/lp.hpp"
#include "sslp/polytope.hpp"
#include "sslp/random.hpp"

using namespace sslp;

namespace {

Rational R(const char* s) { return parse_rational(s); }

HPolytope cut_square(const char* rhs) {
  HPolytope p = HPolytope::unit_cube(2);
  p.rows.push_back({{R("1"), R("1")}, R(rhs)});
  return p;
}

// Shoelace area of a convex polygon given by unsorted vertices.
Rational shoelace(std::vector<RationalVector> v) {
  RationalVector c{Rational(0), Rational(0)};
  for (const auto& p : v) {
    c[0] += p[0];
    c[1] += p[1];
  }
  // Sort by angle around the centroid using exact cross products per half plane.
  Rational n(static_cast<long>(v.size()));
  c[0] /= n;
  c[1] /= n;
  auto half = [&](const RationalVector& p) {
    Rational y = p[1] - c[1], x = p[0] - c[0];
    return sgn(y) > 0 || (sgn(y) == 0 && sgn(x) > 0) ? 0 : 1;
  };
  std::sort(v.begin(), v.end(), [&](const RationalVector& a, const RationalVector& b) {
    int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    Rational cross = (a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]);
    return sgn(cross) > 0;
  });
  Rational area = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    area += p[0] * q[1] - p[1] * q[0];
  }
  return area / 2;
}

HPolytope random_polytope(SplitMix64& rng, std::size_t dim, std::size_t rows) {
  HPolytope p = HPolytope::unit_cube(dim);
  for (std::size_t r = 0; r < rows; ++r) {
    RationalVector a(dim);
    for (auto& v : a) v = Rational(static_cast<long>(rng.below(7)) - 3);
    Rational rhs = Rational(static_cast<long>(rng.below(9)) - 2) / 2;
    p.rows.push_back({a, rhs});
  }
  return p;
}

}  // namespace

TEST(StandardForm, SmallLp) {
  // min -y1 - y2 s.t. y1 + y3 = 1, y2 + y4 = 2
  RationalMatrix A{{R("1"), R("0"), R("1"), R("0")}, {R("0"), R("1"), R("0"), R("1")}};
  StandardFormResult r = solve_standard_form(A, {R("1"), R("2")}, {R("-1"), R("-1"), R("0"), R("0")});
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_EQ(r.value, R("-3"));
  EXPECT_EQ(dot(r.dual, RationalVector{R("1"), R("2")}), r.value);
}

TEST(StandardForm, InfeasibleAndUnbounded) {
  RationalMatrix A{{R("1"), R("1")}};
  EXPECT_EQ(solve_standard_form(A, {R("-1")}, {R("0"), R("0")}).status, LpStatus::infeasible);
  RationalMatrix B{{R("1"), R("-1")}};
  EXPECT_EQ(solve_standard_form(B, {R("0")}, {R("-1"), R("0")}).status, LpStatus::unbounded);
}

TEST(SolveLp, KnownValues) {
  HPolytope sq = HPolytope::unit_cube(2);
  LPResult r = solve_lp(sq, RationalVector{R("1"), R("1")}, Sense::maximize);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_EQ(r.value, R("2"));
  EXPECT_EQ(r.point, (RationalVector{R("1"), R("1")}));

  HPolytope bad = HPolytope::unit_cube(2);
  bad.rows.push_back({{R("1"), R("0")}, R("-1")});
  EXPECT_EQ(solve_lp(bad, RationalVector{R("1"), R("0")}, Sense::maximize).status, LpStatus::infeasible);

  // Q4: facets w.p <= 1 with w in {(0,1),(-1,0),(0,-1),(1,0)}, no box.
  HPolytope q4;
  q4.dim = 2;
  q4.rows = {{{R("0"), R("1")}, R("1")}, {{R("-1"), R("0")}, R("1")}, {{R("0"), R("-1")}, R("1")}, {{R("1"), R("0")}, R("1")}};
  LPResult m = solve_lp(q4, RationalVector{R("1"), R("0")}, Sense::maximize);
  ASSERT_EQ(m.status, LpStatus::optimal);
  EXPECT_EQ(m.value, R("1"));
  HPolytope half;
  half.dim = 1;
  half.rows = {{{R("1")}, R("1")}};
  EXPECT_EQ(solve_lp(half, RationalVector{R("-1")}, Sense::maximize).status, LpStatus::unbounded);
}

TEST(SolveLp, OptimaAreFeasibleAndBeatVertices) {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t dim = 1 + rng.below(3);
    HPolytope p = random_polytope(rng, dim, 1 + rng.below(3));
    RationalVector obj(dim);
    for (auto& v : obj) v = Rational(static_cast<long>(rng.below(5)) - 2);
    LPResult r = solve_lp(p, obj, Sense::maximize);
    auto verts = enumerate_vertices(p);
    if (r.status == LpStatus::infeasible) {
      EXPECT_TRUE(verts.empty());
      continue;
    }
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_TRUE(p.contains(r.point));
    EXPECT_EQ(dot(obj, r.point), r.value);
    for (const auto& v : verts) EXPECT_LE(dot(obj, v), r.value);
  }
}

TEST(Volume, KnownValues) {
  EXPECT_EQ(lasserre_volume(HPolytope::unit_cube(2)), R("1"));
  EXPECT_EQ(lasserre_volume(cut_square("1")), R("1/2"));
  EXPECT_EQ(lasserre_volume(cut_square("3/2")), R("7/8"));
  EXPECT_EQ(shoelace(enumerate_vertices(cut_square("3/2"))), R("7/8"));
  EXPECT_EQ(lasserre_volume(cut_square("-1")), R("0"));
  HPolytope flat = HPolytope::unit_cube(2);
  flat.rows.push_back({{R("1"), R("0")}, R("0")});
  EXPECT_EQ(lasserre_volume(flat), R("0"));
  HPolytope open;
  open.dim = 1;
  open.rows = {{{R("1")}, R("1")}};
  EXPECT_THROW(lasserre_volume(open), InvalidArgumentError);
}

TEST(Vertices, KnownValues) {
  auto sq = enumerate_vertices(HPolytope::unit_cube(2));
  ASSERT_EQ(sq.size(), 4u);
  auto cut = enumerate_vertices(cut_square("3/2"));
  EXPECT_EQ(cut.size(), 5u);
  EXPECT_NE(std::find(cut.begin(), cut.end(), RationalVector{R("1"), R("1/2")}), cut.end());
  EXPECT_NE(std::find(cut.begin(), cut.end(), RationalVector{R("1/2"), R("1")}), cut.end());
  EXPECT_TRUE(enumerate_vertices(cut_square("-1")).empty());
  EXPECT_THROW(enumerate_vertices(HPolytope::unit_cube(4)), UnsupportedError);
}

TEST(Triangulated, KnownValues) {
  Polynomial x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
  EXPECT_EQ(integrate_quadratic_triangulated(HPolytope::unit_cube(2), x1 * x2), R("1/4"));
  EXPECT_EQ(integrate_quadratic_triangulated(cut_square("1"), x1), R("1/6"));
  EXPECT_EQ(integrate_quadratic_triangulated(cut_square("3/2"), Polynomial::constant(2, R("1"))), R("7/8"));
  EXPECT_THROW(integrate_quadratic_triangulated(HPolytope::unit_cube(2), x1 * x1 * x2), UnsupportedError);
}

TEST(Triangulated, MomentsOfTheCube) {
  // Independent oracle: separable integrals over [0,1]^3.
  HPolytope cube = HPolytope::unit_cube(3);
  Polynomial x = Polynomial::variable(3, 0), y = Polynomial::variable(3, 1), z = Polynomial::variable(3, 2);
  EXPECT_EQ(integrate_quadratic_triangulated(cube, x * x), R("1/3"));
  EXPECT_EQ(integrate_quadratic_triangulated(cube, x * z + y), R("3/4"));
}

TEST(Volume, LasserreEqualsTriangulation) {
  SplitMix64 rng(5);
  Polynomial one;
  for (int trial = 0; trial < 80; ++trial) {
    std::size_t dim = 1 + rng.below(3);
    HPolytope p = random_polytope(rng, dim, rng.below(4));
    EXPECT_EQ(lasserre_volume(p), integrate_quadratic_triangulated(p, Polynomial::constant(dim, R("1")))) << trial;
  }
}

TEST(Volume, PermutationAndRedundancyInvariance) {
  SplitMix64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    HPolytope p = random_polytope(rng, 3, 1 + rng.below(3));
    Rational v = lasserre_volume(p);
    HPolytope perm = p;
    for (auto& row : perm.rows) std::rotate(row.a.begin(), row.a.begin() + 1, row.a.end());
    EXPECT_EQ(lasserre_volume(perm), v);
    HPolytope extra = p;
    extra.rows.push_back({{R("1"), R("1"), R("1")}, R("3")});
    extra.rows.push_back(p.rows.front());
    EXPECT_EQ(lasserre_volume(extra), v);
    HPolytope more = p;
    more.rows.push_back({{R("1"), R("-1"), R("0")}, R("0")});
    EXPECT_LE(lasserre_volume(more), v);
    EXPECT_EQ(lasserre_volume(remove_redundant_rows(p)), v);
  }
}

TEST(Volume, Lasserre4d) {
  // Standard 4-simplex scaled: {x >= 0, sum x <= 1} has volume 1/24.
  HPolytope p = HPolytope::unit_cube(4);
  p.rows.push_back({{R("1"), R("1"), R("1"), R("1")}, R("1")});
  EXPECT_EQ(lasserre_volume(p), R("1/24"));
}

TEST(MonteCarlo, KnownValues) {
  McEstimate sq = mc_volume(HPolytope::unit_cube(2), 1000, 1);
  EXPECT_EQ(sq.estimate, R("1"));
  EXPECT_EQ(sq.stderr_bound, R("0"));
  EXPECT_EQ(mc_volume(cut_square("-1"), 1000, 1).estimate, R("0"));
  McEstimate s = mc_volume(cut_square("1"), 1000000, 42);
  EXPECT_LE(abs(s.estimate - R("1/2")), 4 * s.stderr_bound);
  EXPECT_GT(s.stderr_bound, 0);
  EXPECT_THROW(mc_volume(cut_square("1"), 0, 1), InvalidArgumentError);
  McEstimate again = mc_volume(cut_square("1"), 1000, 3);
  EXPECT_EQ(again.estimate, mc_volume(cut_square("1"), 1000, 3).estimate);
}

TEST(Interior, Basic) {
  EXPECT_TRUE(has_interior(HPolytope::unit_cube(2)));
  HPolytope flat = HPolytope::unit_cube(2);
  flat.rows.push_back({{R("1"), R("0")}, R("0")});
  EXPECT_FALSE(has_interior(flat));
  EXPECT_TRUE(is_bounded(flat));
  HPolytope open;
  open.dim = 2;
  open.rows = {{{R("1"), R("0")}, R("1")}};
  EXPECT_FALSE(is_bounded(open));
}

TEST(Interior, ZeroRowsAreVacuousOrEmpty) {
  HPolytope p = HPolytope::unit_cube(2);
  p.rows.push_back({{R("0"), R("0")}, R("0")});
  p.rows.push_back({{R("1"), R("1")}, R("1")});
  EXPECT_TRUE(has_interior(p));
  EXPECT_EQ(lasserre_volume(p), R("1/2"));
  EXPECT_EQ(integrate_quadratic_triangulated(p, Polynomial::constant(2, R("1"))), R("1/2"));
  p.rows.push_back({{R("0"), R("0")}, R("-1")});
  EXPECT_FALSE(has_interior(p));
  EXPECT_EQ(integrate_quadratic_triangulated(p, Polynomial::constant(2, R("1"))), R("0"));
}
