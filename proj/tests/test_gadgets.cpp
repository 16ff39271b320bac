#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "sslp/errors.hpp"
#include "sslp/gadget.hpp"
#include "sslp/recourse.hpp"

using namespace sslp;

namespace {

IntervalScalar I(long v, mpfr_prec_t bits = 160) { return IntervalScalar(Rational(v), bits); }

// (cos, sin)(pi/2^k) from the half-angle identities, independent of the
// gadget's angle addition.
IntervalPair half_angle(unsigned k) { return dyadic_trig(k, 160); }

IntervalScalar dot(const IntervalPair& a, const IntervalPair& b) { return a.first * b.first + a.second * b.second; }

// 8 tan(pi/8) - 3 delta with tan(pi/8) = sqrt2 - 1 and cos(pi/4) = sqrt2 / 2.
IntervalScalar cherry_area() {
  const IntervalScalar r2 = I(2).sqrt();
  const IntervalScalar t = r2 - I(1);
  const IntervalScalar delta = (t * (I(1) - r2.scaled(Rational(1, 2)))).scaled(Rational(1, 2));
  return t.scaled(Rational(8)) - delta.scaled(Rational(3));
}

std::vector<Graph> small_graphs() {
  std::vector<Graph> out{fixtures::cherry_graph(), make_graph(2, {}), make_graph(2, {{1, 2}})};
  for (int n = 3; n <= 5; ++n) {
    out.push_back(fixtures::path_graph(n));
    out.push_back(fixtures::cycle_graph(n));
    out.push_back(fixtures::star_graph(n));
    out.push_back(fixtures::complete_graph(n));
  }
  for (std::uint64_t seed = 1; seed <= 8; ++seed) out.push_back(fixtures::random_graph(seed, 2 + seed % 5));
  return out;
}

}  // namespace

TEST(Graph, Validation) {
  EXPECT_THROW(make_graph(1, {}), InvalidArgumentError);
  EXPECT_THROW(make_graph(3, {{1, 1}}), InvalidArgumentError);
  EXPECT_THROW(make_graph(3, {{1, 2}, {2, 1}}), InvalidArgumentError);
  EXPECT_THROW(make_graph(3, {{1, 4}}), InvalidArgumentError);
  Graph g = make_graph(3, {{3, 1}});
  EXPECT_EQ(g.edges[0], (Edge{1, 3}));
  EXPECT_TRUE(g.has_edge(3, 1));
}

TEST(BitVector, SmallLabels) {
  EXPECT_EQ(bit_string(bit_vector(0, 2)), "10");
  EXPECT_EQ(bit_string(bit_vector(3, 2)), "00");
  const char* n2[] = {"10", "11", "01", "00"};
  for (long l = 0; l < 4; ++l) EXPECT_EQ(bit_string(bit_vector(l, 2)), n2[l]);
  const char* n3[] = {"100", "101", "111", "110", "010", "011", "001", "000"};
  for (long l = 0; l < 8; ++l) EXPECT_EQ(bit_string(bit_vector(l, 3)), n3[l]);
}

TEST(BitVector, Bijection) {
  for (int n = 1; n <= 12; ++n) {
    std::set<std::string> seen;
    std::vector<std::vector<int>> table;
    if (n >= 2) table = build_gadget(make_graph(n, {}), default_precision(n)).bits;
    for (long l = 0; l < (1L << n); ++l) {
      std::vector<int> b = n >= 2 ? table[static_cast<std::size_t>(l)] : bit_vector(l, n);
      if (n <= 6) EXPECT_EQ(b, bit_vector(l, n));
      seen.insert(bit_string(b));
    }
    EXPECT_EQ(seen.size(), std::size_t{1} << n) << n;
  }
  EXPECT_THROW(bit_vector(4, 2), InvalidArgumentError);
}

TEST(Gadget, SquareExample) {
  Gadget g = build_gadget(make_graph(2, {}), default_precision(2));
  for (const auto& v : g.vertices) {
    EXPECT_TRUE(v.first.contains(Rational(1)) || v.first.contains(Rational(-1)));
    EXPECT_TRUE(v.second.contains(Rational(1)) || v.second.contains(Rational(-1)));
  }
  EXPECT_TRUE(g.polygon_area.contains(Rational(4)));
  EXPECT_TRUE(g.delta.contains(Rational(1, 2)));
}

TEST(Gadget, RowCounts) {
  for (int n = 2; n <= 6; ++n) {
    Gadget g = build_gadget(fixtures::path_graph(n), default_precision(n));
    EXPECT_EQ(g.formulations.at(std::nullopt).rows.size(), static_cast<std::size_t>(3 * n + 2));
    EXPECT_EQ(g.formulations.at(Edge{1, 2}).rows.size(), static_cast<std::size_t>(3 * n - 1));
    EXPECT_EQ(g.formulations.at(std::nullopt).num_vars, static_cast<std::size_t>(2 * (n + 1)));
  }
}

TEST(Gadget, NormsAreaAndDelta) {
  for (int n = 2; n <= 7; ++n) {
    Gadget g = build_gadget(make_graph(n, {}), default_precision(n));
    const IntervalPair h = half_angle(static_cast<unsigned>(n - 1));
    // sec^2(a/2) = 2 / (1 + cos a), tan(a/2) = sin a / (1 + cos a).
    const IntervalScalar sec2 = I(2) / (I(1) + h.first);
    const IntervalScalar tan_half = h.second / (I(1) + h.first);
    for (std::size_t l = 0; l < g.vertices.size(); ++l) {
      EXPECT_TRUE(dot(g.vertices[l], g.vertices[l]).overlaps(sec2));
      EXPECT_TRUE(dot(g.midpoints[l], g.midpoints[l]).contains(Rational(1)) ||
                  dot(g.midpoints[l], g.midpoints[l]).overlaps(I(1)));
    }
    EXPECT_TRUE(g.delta.overlaps((tan_half * (I(1) - h.first)).scaled(Rational(1, 2))));
    EXPECT_TRUE(g.polygon_area.overlaps(tan_half.scaled(Rational(1L << n))));
  }
}

TEST(CutIndicator, KnownValues) {
  Gadget g = build_gadget(make_graph(2, {{1, 2}}), default_precision(2));
  EXPECT_TRUE(cut_indicator(g, {1, 2}, 3));   // b = 00
  EXPECT_FALSE(cut_indicator(g, {1, 2}, 0));  // b = 10
  EXPECT_THROW(cut_indicator(g, {1, 3}, 0), InvalidArgumentError);
}

TEST(Trajectory, FormulationAdmitsLifts) {
  for (const Graph& graph : small_graphs()) {
    const Gadget g = build_gadget(graph, default_precision(graph.n));
    const long k = 1L << graph.n;
    for (const auto& [key, f] : g.formulations) {
      for (long l = 0; l < k; ++l) {
        // (a) midpoints lie in every projection.
        EXPECT_TRUE(formulation_admits(f, lift_point(g, key, 2 * l + 2)));
        const std::uint32_t s = g.subsets[static_cast<std::size_t>(l)];
        const bool inside = !key || !((s >> (key->i - 1) & 1) && (s >> (key->j - 1) & 1));
        if (inside) {
          // (b) and the empty-set formulation: the vertex lifts.
          EXPECT_TRUE(formulation_admits(f, lift_point(g, key, 2 * l + 1)));
        } else {
          // (c) the chord through w_{l-1} and w_l supports the cut.
          const IntervalPair& v = g.vertices[static_cast<std::size_t>(l)];
          const IntervalPair& w0 = g.midpoints[static_cast<std::size_t>((l + k - 1) % k)];
          const IntervalPair& w1 = g.midpoints[static_cast<std::size_t>(l)];
          EXPECT_TRUE(dot(v, w0).contains(Rational(1)));
          EXPECT_TRUE(dot(v, w1).contains(Rational(1)));
          EXPECT_TRUE(cut_indicator(g, *key, l));
        }
      }
    }
  }
}

TEST(Area, KnownValues) {
  EXPECT_TRUE(area_via_gadget(make_graph(2, {{1, 2}}), default_precision(2)).contains(Rational(7, 2)));
  EXPECT_TRUE(area_via_gadget(make_graph(2, {}), default_precision(2)).contains(Rational(4)));
  IntervalScalar fig = area_via_gadget(fixtures::cherry_graph(), default_precision(3));
  EXPECT_TRUE(fig.overlaps(cherry_area()));
  EXPECT_LT(fig.width(), Rational(1, 1000000));
  EXPECT_NEAR(fig.approx(), 3.131728, 1e-6);
}

TEST(CountIs, KnownValues) {
  EXPECT_EQ(count_is(make_graph(2, {{1, 2}}), CountMode::brute), 3u);
  EXPECT_EQ(count_is(make_graph(2, {{1, 2}}), CountMode::area), 3u);
  for (int n = 2; n <= 6; ++n) {
    EXPECT_EQ(count_is(make_graph(n, {}), CountMode::area), std::uint64_t{1} << n);
    EXPECT_EQ(count_is(make_graph(n, {}), CountMode::brute), std::uint64_t{1} << n);
  }
  EXPECT_EQ(count_is(fixtures::cherry_graph(), CountMode::area), 5u);
  EXPECT_EQ(count_is(fixtures::cherry_graph(), CountMode::brute), 5u);
  EXPECT_THROW(count_is(make_graph(4, {}), CountMode::area, 3), InvalidArgumentError);
}

TEST(CountIs, AreaMatchesBrute) {
  for (const Graph& g : small_graphs()) EXPECT_EQ(count_is(g, CountMode::area), count_is(g, CountMode::brute));
}

TEST(Area, EdgeMonotonicity) {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    Graph g = fixtures::random_graph(seed, 4);
    Graph h = fixtures::complete_graph(4);
    Edge added{};
    bool found = false;
    for (const Edge& e : h.edges)
      if (!g.has_edge(e.i, e.j)) {
        added = e;
        found = true;
        break;
      }
    if (!found) continue;
    Graph bigger = g;
    bigger.edges.push_back(added);
    bigger.validate();
    const long lost = static_cast<long>(count_is(g, CountMode::brute) - count_is(bigger, CountMode::brute));
    const Gadget gd = build_gadget(g, default_precision(4));
    const IntervalScalar drop = area_via_gadget(g, default_precision(4)) - area_via_gadget(bigger, default_precision(4));
    EXPECT_TRUE(drop.overlaps(gd.delta.scaled(Rational(lost)))) << seed;
  }
}

TEST(Envelope, KnownValues) {
  EnvelopeExpectations sq = envelope_expectations(make_graph(2, {}), default_precision(2));
  EXPECT_TRUE(sq.emax.contains(Rational(1)));
  EXPECT_TRUE(sq.emin.contains(Rational(-1)));
  EnvelopeExpectations k2 = envelope_expectations(make_graph(2, {{1, 2}}), default_precision(2));
  EXPECT_TRUE(k2.emax.contains(Rational(1)));
  EXPECT_TRUE(k2.emin.contains(Rational(-3, 4)));
}

TEST(Envelope, AreaIdentity) {
  for (const Graph& g : small_graphs()) {
    EnvelopeExpectations e = envelope_expectations(g, default_precision(g.n));
    IntervalScalar twice = (e.emax - e.emin).scaled(Rational(2));
    EXPECT_TRUE(twice.overlaps(area_via_gadget(g, default_precision(g.n))));
    EXPECT_TRUE(e.emax.lower() > Rational(1, 2) && e.emax.upper() <= Rational(1) + e.emax.width());
  }
}

TEST(SslpFromGraph, Shape) {
  for (const Graph& g : {make_graph(2, {{1, 2}}), fixtures::cherry_graph(), fixtures::path_graph(4)}) {
    GraphProgram gp = sslp_from_graph(g, 40);
    const std::size_t n = static_cast<std::size_t>(g.n);
    EXPECT_EQ(gp.program.d, 1u);
    EXPECT_EQ(gp.program.n1, 1u);
    EXPECT_EQ(gp.formulation_rows, 3 * n + 2 + g.edges.size() * (3 * n - 1));
    EXPECT_EQ(gp.program.m2, gp.formulation_rows);
    EXPECT_FALSE(gp.program.objective_random());
    EXPECT_GT(gp.rounding_radius, 0);
    EXPECT_LE(gp.rounding_radius, Rational(1) / Rational(Integer(1) << 40));
  }
}

TEST(SslpFromGraph, ExpectationAtOneMatchesEnvelope) {
  for (const Graph& g : {make_graph(2, {}), make_graph(2, {{1, 2}}), fixtures::cherry_graph()}) {
    GraphProgram gp = sslp_from_graph(g, 40);
    const Rational eq = evaluate_recourse_parametric(gp.program, RationalVector{Rational(1)}).value;
    const IntervalScalar e = envelope_expectation(g, default_precision(g.n));
    EXPECT_TRUE((-e).inflated(program_perturbation(gp)).contains(eq));
    // At x = 0 every right-hand side vanishes.
    EXPECT_EQ(evaluate_recourse_parametric(gp.program, RationalVector{Rational(0)}).value, 0);
  }
}

TEST(Bisection, SquareConvergesToOne) {
  Graph g = make_graph(2, {});
  BisectionResult r = bisection_expectation(g, envelope_oracle(g));
  EXPECT_TRUE(r.interval.contains(Rational(1)));
  EXPECT_LE(r.calls, 3);
  EXPECT_TRUE(r.bracket_held);
}

TEST(Bisection, CallBoundAndEnclosure) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Graph g = fixtures::random_graph(100 + seed, 2 + static_cast<int>(seed % 5));
    BisectionResult r = bisection_expectation(g, envelope_oracle(g));
    EXPECT_LE(r.calls, 3 * g.n - 3);
    EXPECT_LE(r.interval.width(), Rational(1) / Rational(Integer(1) << (3 * g.n - 3)));
    EXPECT_TRUE(r.interval.overlaps(envelope_expectation(g, default_precision(g.n))));
    EXPECT_TRUE(r.bracket_held);
  }
}

TEST(Bisection, ProgramOracle) {
  for (const Graph& g : {make_graph(2, {{1, 2}}), fixtures::cherry_graph()}) {
    GraphProgram gp = sslp_from_graph(g, 40);
    BisectionResult r = bisection_expectation(g, program_oracle(gp), program_perturbation(gp));
    EXPECT_LE(r.calls, 3 * g.n - 3);
    EXPECT_TRUE(r.interval.overlaps(envelope_expectation(g, default_precision(g.n))));
  }
}

TEST(Bisection, ProtocolErrors) {
  Graph g = make_graph(2, {});
  auto positive = [](const Rational&) { return FirstStageSolution{{Rational(1)}, Rational(1), Rational(0), 1}; };
  EXPECT_THROW(bisection_expectation(g, positive), ProtocolError);
  auto nonzero_at_zero = [](const Rational&) { return FirstStageSolution{{Rational(0)}, Rational(-1), Rational(0), 1}; };
  EXPECT_THROW(bisection_expectation(g, nonzero_at_zero), ProtocolError);
  // Implies E = c + 5, far outside [1/2, 1].
  auto off_bracket = [](const Rational&) { return FirstStageSolution{{Rational(1)}, Rational(-5), Rational(0), 1}; };
  EXPECT_THROW(bisection_expectation(g, off_bracket), ProtocolError);
}

TEST(Bisection, WidensWhenBracketFails) {
  Graph g = make_graph(2, {});
  // A consistent oracle for E = 1/4.
  auto low = [](const Rational& c) {
    const Rational e(1, 4);
    if (e > c) return FirstStageSolution{{Rational(1)}, c - e, Rational(0), 1};
    return FirstStageSolution{{Rational(0)}, Rational(0), Rational(0), 1};
  };
  BisectionResult r = bisection_expectation(g, low);
  EXPECT_FALSE(r.bracket_held);
  EXPECT_TRUE(r.interval.contains(Rational(1, 4)));
}
