#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sslp/errors.hpp"
#include "sslp/polytope.hpp"
#include "sslp/reductions.hpp"

using namespace sslp;

namespace {

RationalVector to_rational(const std::vector<long>& b) { return RationalVector(b.begin(), b.end()); }

}  // namespace

TEST(VolumeViaRecourse, KnownValues) {
  IntegerSystem a1{{{1}}};
  EXPECT_EQ(volume_via_recourse(a1, std::vector<long>{1}, Rational(1)), 1);
  RecourseVolume r = volume_via_recourse_detailed(a1, std::vector<long>{0}, Rational(1));
  EXPECT_EQ(r.volume, 0);
  // E[max(0, xi - t)] = (1 - t)^2 / 2.
  Polynomial t = Polynomial::variable(1, 0);
  Polynomial one = Polynomial::constant(1, Rational(1));
  EXPECT_EQ(r.p, (one - t) * (one - t) * Rational(1, 2));
  IntegerSystem a2{{{1, 1}}};
  EXPECT_EQ(volume_via_recourse(a2, std::vector<long>{1}, Rational(1)), Rational(1, 2));
  EXPECT_EQ(volume_dp(a2, RationalVector{Rational(1)}), Rational(1, 2));
  EXPECT_THROW(volume_via_recourse(a1, std::vector<long>{0}, Rational(0)), InvalidArgumentError);
}

TEST(VolumeViaRecourse, PolynomialRange) {
  EXPECT_EQ(polynomial_range(IntegerSystem{{{1}}}), Rational(1, 2));
  // Minors of [[2,1],[1,-1],[1,0],[0,1]]: largest |det| is 3.
  EXPECT_EQ(polynomial_range(IntegerSystem{{{2, 1}, {1, -1}}}), Rational(1, 9));
}

TEST(VolumeViaRecourse, DerivativeIdentity) {
  // p'(t) = (vol(P_t) - 1) x at every sample.
  IntegerSystem s{{{1, -1}, {1, 1}}};
  std::vector<long> b{0, 1};
  const Rational x(2, 3);
  RecourseVolume r = volume_via_recourse_detailed(s, b, x);
  const Polynomial dp = r.p.derivative(0);
  for (const Rational& t : r.samples) {
    RationalVector bt{Rational(b[0]) + t, Rational(b[1]) + t};
    EXPECT_EQ(dp.evaluate(std::vector<Rational>{t}), (volume_dp(s, bt) - 1) * x);
  }
  EXPECT_LE(r.p.total_degree(), 3);
}

TEST(VolumeViaRecourse, MatchesVolumeDp) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t m = trial < 2 ? 1 : 1 + rng.below(3), d = 1 + rng.below(3);
    IntegerSystem s = fixtures::random_integer_system(rng, m, d, 2);
    std::vector<long> b(m);
    for (auto& v : b) v = static_cast<long>(rng.below(4)) - 1;
    RecourseVolume r = volume_via_recourse_detailed(s, b, Rational(1, 2));
    EXPECT_EQ(r.volume, volume_dp(s, to_rational(b))) << trial;
    EXPECT_LE(r.p.total_degree(), static_cast<int>(d + 1));
  }
}
