#include <gtest/gtest.h>

#include "sslp/errors.hpp"
#include "sslp/polytope.hpp"
#include "sslp/random.hpp"
#include "sslp/volume_dp.hpp"

using namespace sslp;

namespace {

Rational R(const char* s) { return parse_rational(s); }

HPolytope as_polytope(const IntegerSystem& sys, std::span<const Rational> b) {
  HPolytope p = HPolytope::unit_cube(sys.cols());
  for (std::size_t i = 0; i < sys.rows(); ++i) {
    RationalVector a;
    for (long v : sys.A[i]) a.push_back(Rational(v));
    p.rows.push_back({a, b[i]});
  }
  return p;
}

IntegerSystem random_system(SplitMix64& rng, std::size_t m, std::size_t d, long bound) {
  IntegerSystem s;
  s.A.assign(m, IntegerVector(d));
  for (auto& row : s.A)
    for (auto& v : row) v = static_cast<long>(rng.below(2 * bound + 1)) - bound;
  return s;
}

RationalVector random_rhs(SplitMix64& rng, std::size_t m) {
  RationalVector b(m);
  for (auto& v : b) v = Rational(static_cast<long>(rng.below(13)) - 4, 4);
  for (auto& v : b) v.canonicalize();
  return b;
}

}  // namespace

TEST(VolumeDp, KnownValues) {
  IntegerSystem s{{{1, 1}}};
  EXPECT_EQ(volume_dp(s, RationalVector{R("1")}), R("1/2"));
  EXPECT_EQ(volume_dp(s, RationalVector{R("3/2")}), R("7/8"));
  EXPECT_EQ(volume_dp(s, RationalVector{R("-1")}), R("0"));
}

TEST(VolumeDp, EqualsLasserre) {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t m = 1 + rng.below(3), d = 1 + rng.below(3);
    IntegerSystem s = random_system(rng, m, d, 3);
    RationalVector b = random_rhs(rng, m);
    EXPECT_EQ(volume_dp(s, b), lasserre_volume(as_polytope(s, b))) << trial;
  }
}

TEST(VolumeDp, MonotoneInRhsAndInRange) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    IntegerSystem s = random_system(rng, 2, 2, 2);
    VolumeTables tables(s);
    RationalVector b = random_rhs(rng, 2);
    RationalVector bigger = b;
    bigger[rng.below(2)] += R("1/3");
    Rational v = tables.volume(b), w = tables.volume(bigger);
    EXPECT_LE(v, w);
    EXPECT_GE(v, 0);
    EXPECT_LE(w, 1);
  }
}

TEST(VolumeDp, TablesRespectDegreeBound) {
  SplitMix64 rng(8);
  IntegerSystem s = random_system(rng, 2, 3, 2);
  VolumeTables tables(s);
  tables.volume(RationalVector{R("1/2"), R("3/4")});
  for (std::size_t k = 0; k <= 3; ++k) {
    for (const auto& [corner, poly] : tables.table(k).entries) {
      EXPECT_LE(poly.total_degree(), static_cast<int>(k));
      EXPECT_LE(poly.max_variable_degree(), static_cast<int>(k));
    }
  }
}

TEST(VolumeDp, TablesContinuousAcrossWalls) {
  // Continuity holds when no row of A restricted to the first k columns
  // vanishes; such rows make the level-k volume jump at s_i = 0.
  IntegerSystem s{{{1, 2, -1}, {-1, 1, 1}}};
  VolumeTables tables(s);
  SplitMix64 rng(4);
  const Rational eps = R("1/1024");
  for (int trial = 0; trial < 30; ++trial) {
    RationalVector b{Rational(static_cast<long>(rng.below(5)) - 1), rng.unit_dyadic() + 1};
    RationalVector below{b[0] - eps, b[1]};
    for (std::size_t k = 1; k <= 3; ++k) {
      const Polynomial& on = tables.chamber_polynomial(k, b);
      const Polynomial& under = tables.chamber_polynomial(k, below);
      EXPECT_EQ(on.evaluate(b), under.evaluate(b)) << trial << " level " << k;
    }
  }
}

TEST(VolumeDp, PiecewiseOffTheIntegerGrid) {
  // Two rows whose kink s1 + s2 = 2 crosses the open unit box in s.
  IntegerSystem s{{{1, -1}, {1, 1}}};
  VolumeTables tables(s);
  const char* expect[] = {"1/4", "1/2", "3/4", "15/16", "1"};
  for (int j = 0; j <= 4; ++j) {
    Rational t = make_rational(j, 4);
    RationalVector b{t, 1 + t};
    EXPECT_EQ(tables.volume(b), R(expect[j])) << j;
    HPolytope p = HPolytope::unit_cube(2);
    p.rows.push_back({RationalVector{R("1"), R("-1")}, t});
    p.rows.push_back({RationalVector{R("1"), R("1")}, 1 + t});
    EXPECT_EQ(tables.volume(b), lasserre_volume(p)) << j;
  }
}

TEST(LineRestriction, KnownValues) {
  IntegerSystem a1{{{1}}};
  LineRestriction r = line_restriction(a1, std::vector<long>{0}, std::vector<long>{1});
  EXPECT_EQ(r.t_max, R("1"));
  EXPECT_EQ(r.poly, Polynomial::variable(1, 0));
  IntegerSystem a2{{{1, 1}}};
  LineRestriction q = line_restriction(a2, std::vector<long>{0}, std::vector<long>{2});
  EXPECT_EQ(q.t_max, R("1/2"));
  Polynomial t = Polynomial::variable(1, 0);
  EXPECT_EQ(q.poly, t * t * R("2"));
  LineRestriction c = line_restriction(a1, std::vector<long>{5}, std::vector<long>{1});
  EXPECT_EQ(c.poly, Polynomial::constant(1, R("1")));
  EXPECT_THROW(line_restriction(a1, std::vector<long>{0}, std::vector<long>{0}), InvalidArgumentError);
}

TEST(LineRestriction, StopsBeforeTheFirstWall) {
  // A fit over [0, 1/||b'||] fails here because a non-axis wall is crossed
  // inside; the shortened segment is a single polynomial.
  IntegerSystem s{{{-3, 2, -2}, {0, 3, -1}, {2, 1, -1}}};
  const std::vector<long> b{-1, 1, 2}, dir{1, -1, 1};
  LineRestriction r = line_restriction(s, b, dir);
  EXPECT_LT(r.t_max, R("1"));
  EXPECT_LE(r.poly.total_degree(), 3);
  for (int j = 0; j <= 7; ++j) {
    const Rational t = r.t_max * Rational(j, 7);
    RationalVector bt{b[0] + t, b[1] - t, b[2] + t};
    EXPECT_EQ(r.poly.evaluate(std::vector<Rational>{t}), lasserre_volume(as_polytope(s, bt))) << j;
  }
}

TEST(LineRestriction, ZeroRowJumpsAtZero) {
  // 0 <= -2t holds only at t = 0, so the fit describes (0, t_max].
  IntegerSystem s{{{3}, {0}}};
  const std::vector<long> b{2, 0}, dir{0, -2};
  LineRestriction r = line_restriction(s, b, dir);
  EXPECT_EQ(volume_dp(s, RationalVector{R("2"), R("0")}), R("2/3"));
  EXPECT_EQ(r.poly.evaluate(std::vector<Rational>{R("0")}), R("0"));
  EXPECT_EQ(r.poly.evaluate(std::vector<Rational>{r.t_max / 3}), R("0"));
}

TEST(QuadMoment, KnownValues) {
  Polynomial x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
  IntegerSystem none{{{0, 0}}};
  EXPECT_EQ(quad_moment(none, RationalVector{R("0")}, x1 * x2), R("1/4"));
  IntegerSystem s{{{1, 1}}};
  EXPECT_EQ(quad_moment(s, RationalVector{R("1")}, x1), R("1/6"));
  EXPECT_EQ(quad_moment(s, RationalVector{R("3/2")}, Polynomial::constant(2, R("1"))), R("7/8"));
  EXPECT_THROW(quad_moment(s, RationalVector{R("1")}, x1 * x1 * x2), UnsupportedError);
}

TEST(QuadMoment, MatchesTriangulation) {
  SplitMix64 rng(55);
  for (int trial = 0; trial < 15; ++trial) {
    std::size_t m = 1 + rng.below(2), d = 2 + rng.below(2);
    IntegerSystem s = random_system(rng, m, d, 2);
    RationalVector b = random_rhs(rng, m);
    Polynomial q = Polynomial::constant(d, R("1/3"));
    for (std::size_t i = 0; i < d; ++i) {
      q += Polynomial::variable(d, i) * Rational(static_cast<long>(rng.below(5)) - 2);
      q += Polynomial::variable(d, i) * Polynomial::variable(d, (i + 1) % d) * R("1/2");
    }
    EXPECT_EQ(quad_moment(s, b, q), integrate_quadratic_triangulated(as_polytope(s, b), q)) << trial;
  }
}
