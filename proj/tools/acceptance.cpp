// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sslp/first_stage.hpp"
#include "sslp/gadget.hpp"
#include "sslp/io.hpp"
#include "sslp/polytope.hpp"
#include "sslp/random.hpp"
#include "sslp/recourse.hpp"
#include "sslp/reductions.hpp"
#include "sslp/volume_dp.hpp"

using namespace sslp;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir{SSLP_DATA_DIR};

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures; the first few are spelled out in the detail line.
struct Tally {
  int checks = 0;
  int failures = 0;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    if (notes.size() < 3) notes.push_back(what);
  }

  Outcome outcome(const std::string& summary) const {
    std::ostringstream os;
    os << summary << " (" << checks - failures << "/" << checks << " checks)";
    for (const auto& n : notes) os << "; " << n;
    return {failures == 0, os.str()};
  }
};

Rational pow2_inv(int k) { return Rational(1) / Rational(Integer(1) << static_cast<mp_bitcnt_t>(k)); }

IntegerSystem random_system(SplitMix64& rng, std::size_t m, std::size_t d, long bound) {
  IntegerSystem s;
  s.A.assign(m, IntegerVector(d));
  bool nonzero = false;
  for (auto& row : s.A)
    for (auto& v : row) {
      v = static_cast<long>(rng.below(static_cast<std::uint64_t>(2 * bound + 1))) - bound;
      nonzero = nonzero || v != 0;
    }
  if (!nonzero) s.A[0][0] = 1;
  return s;
}

// Right-hand side strictly between the row minimum and maximum over the
// cube when the row allows it, on a grid of step 1/den.
RationalVector interior_rhs(SplitMix64& rng, const IntegerSystem& s, long den) {
  RationalVector b;
  for (const auto& row : s.A) {
    long lo = 0, hi = 0;
    for (long v : row) (v < 0 ? lo : hi) += v;
    const long span = (hi - lo) * den;
    const long k = span > 1 ? 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(span - 1))) : 0;
    b.push_back(Rational(lo) + make_rational(k, den));
  }
  return b;
}

HPolytope as_polytope(const IntegerSystem& s, const RationalVector& b) {
  HPolytope p = HPolytope::unit_cube(s.cols());
  for (std::size_t i = 0; i < s.rows(); ++i) p.rows.push_back({RationalVector(s.A[i].begin(), s.A[i].end()), b[i]});
  return p;
}

std::vector<std::pair<std::string, Graph>> fixture_graphs() {
  std::vector<std::pair<std::string, Graph>> out;
  for (const char* sub : {"random", "named"}) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(data_dir / "graphs" / sub)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.emplace_back(f.filename().string(), std::get<Graph>(parse_instance(f.string()).payload));
  }
  return out;
}

// 8 tan(pi/8) - 3 delta from sqrt(2) alone: tan(pi/8) = sqrt2 - 1,
// delta = tan(pi/8) (1 - cos(pi/4)) / 2.
IntervalScalar cherry_area() {
  const mpfr_prec_t bits = 200;
  const IntervalScalar r2 = IntervalScalar(Rational(2), bits).sqrt();
  const IntervalScalar one(Rational(1), bits);
  const IntervalScalar t = r2 - one;
  const IntervalScalar delta = (t * (one - r2.scaled(Rational(1, 2)))).scaled(Rational(1, 2));
  return t.scaled(Rational(8)) - delta.scaled(Rational(3));
}

Outcome criterion_1() {
  Tally t;
  for (const auto& [name, g] : fixture_graphs()) {
    if (g.n > 8) continue;
    const std::uint64_t area = count_is(g, CountMode::area, 8);
    const std::uint64_t brute = count_is(g, CountMode::brute, 8);
    t.check(area == brute, name + ": area " + std::to_string(area) + " vs brute " + std::to_string(brute));
  }
  const Graph cherry = make_graph(3, {{1, 2}, {1, 3}});
  t.check(count_is(cherry, CountMode::area) == 5, "cherry count != 5");
  const IntervalScalar area = area_via_gadget(cherry, default_precision(3));
  const IntervalScalar oracle = cherry_area();
  t.check(area.overlaps(oracle) && area.contains(oracle.midpoint()), "cherry area misses 8 tan(pi/8) - 3 delta");
  t.check(area.width() < Rational(1, 1000000), "cherry area interval too wide");
  return t.outcome("#IS area count = brute force on fixture graphs n<=8; cherry area [" + area.lower_string(10) +
                   ", " + area.upper_string(10) + "]");
}

Outcome criterion_2() {
  Tally t;
  SplitMix64 rng(2);
  int nontrivial = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(3), d = 1 + rng.below(3);
    const IntegerSystem s = random_system(rng, m, d, 3);
    const RationalVector b = interior_rhs(rng, s, 1 + static_cast<long>(rng.below(3)));
    const HPolytope p = as_polytope(s, b);
    const Rational dp = volume_dp(s, b);
    const Rational lv = lasserre_volume(p);
    const Rational tri = integrate_quadratic_triangulated(p, Polynomial::constant(d, Rational(1)));
    if (dp > 0 && dp < 1) ++nontrivial;
    t.check(dp == lv && lv == tri, "exact mismatch at trial " + std::to_string(trial));
  }
  int worst_trial = -1;
  double worst_z = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 4 + rng.below(2), m = 1 + rng.below(3);
    const IntegerSystem s = random_system(rng, m, d, 3);
    const RationalVector b = interior_rhs(rng, s, 1);
    const Rational dp = volume_dp(s, b);
    const McEstimate mc = mc_volume(as_polytope(s, b), 1000000, 100 + static_cast<std::uint64_t>(trial));
    const Rational diff = abs(dp - mc.estimate);
    const double z = sgn(mc.stderr_bound) > 0 ? Rational(diff / mc.stderr_bound).get_d() : (sgn(diff) == 0 ? 0.0 : 1e9);
    if (z > worst_z) worst_z = z, worst_trial = trial;
    t.check(diff <= 4 * mc.stderr_bound, "d>=4 trial " + std::to_string(trial) + " off by " + std::to_string(z) + " stderr");
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "volume_dp = lasserre = triangulation on 100 systems (%d with 0<vol<1); d in {4,5} max |z| = %.2f (trial %d)",
                nontrivial, worst_z, worst_trial);
  return t.outcome(buf);
}

Outcome criterion_3() {
  Tally t;
  SplitMix64 rng(3);
  int full_interval_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng.below(3), d = 1 + rng.below(3);
    const IntegerSystem s = random_system(rng, m, d, 3);
    std::vector<long> b(m), dir(m);
    const RationalVector rb = interior_rhs(rng, s, 1);
    for (std::size_t i = 0; i < m; ++i) b[i] = rb[i].get_num().get_si();
    bool nonzero = false;
    for (auto& v : dir) {
      v = static_cast<long>(rng.below(5)) - 2;
      nonzero = nonzero || v != 0;
    }
    if (!nonzero) dir[0] = 1;
    auto vol = [&](const Rational& tt) {
      RationalVector bt(m);
      for (std::size_t i = 0; i < m; ++i) bt[i] = b[i] + tt * dir[i];
      return volume_dp(s, bt);
    };
    // Fit through d+1 samples in (0, tmax], predict a held-out one. t = 0
    // is left out: a zero row of A makes the volume jump there.
    auto fits = [&](const Rational& tmax) {
      const long n = static_cast<long>(d) + 1;
      std::vector<std::pair<Rational, Rational>> pts;
      for (long j = 1; j <= n; ++j) {
        const Rational tt = tmax * make_rational(j, n);
        pts.emplace_back(tt, vol(tt));
      }
      const Polynomial p = interpolate_univariate(pts);
      const Rational held = tmax * make_rational(2 * static_cast<long>(rng.below(d + 1)) + 1, 2 * n);
      return p.total_degree() <= static_cast<int>(d) && p.evaluate(std::vector<Rational>{held}) == vol(held);
    };
    long norm = 0;
    for (long v : dir) norm = std::max(norm, std::labs(v));
    if (!fits(make_rational(1, norm))) ++full_interval_failures;
    const LineRestriction lr = line_restriction(s, b, dir);
    t.check(fits(lr.t_max), "trial " + std::to_string(trial) + " held-out sample missed");
  }
  return t.outcome("degree-d fit predicts the held-out sample on the wall-free segment (0, 1/max|lambda.b'|]; over (0, 1/||b'||] " +
                   std::to_string(full_interval_failures) + "/50 cross a chamber wall");
}

Outcome criterion_4() {
  Tally t;
  for (long k = 0; k <= 4; ++k) {
    const StochasticProgram sp = newsvendor(Rational(0));
    const Rational x = make_rational(k, 4);
    const RationalVector xv{x};
    const Rational closed = (1 - x) * (1 - x) / 2;
    t.check(expected_recourse(sp, xv) == closed, "expected_recourse at x=" + to_string(x));
    t.check(expected_recourse_1d(sp, xv) == closed, "expected_recourse_1d at x=" + to_string(x));
    const RationalVector g = expected_subgradient(sp, xv);
    t.check(g.size() == 1 && g[0] == -(1 - x), "expected_subgradient at x=" + to_string(x));
  }
  const FirstStageSolution s = solve_first_stage(newsvendor(Rational(1, 4)), Rational(1, 10000000));
  t.check(abs(s.x[0] - Rational(3, 4)) <= Rational(1, 1000000), "solve x = " + to_string(s.x[0]));
  t.check(abs(s.value - Rational(7, 32)) <= Rational(1, 1000000), "solve value = " + to_string(s.value));
  return t.outcome("newsvendor (1-x)^2/2 exact at x in {0,1/4,1/2,3/4,1}; solve c=1/4 gives x=" + to_string(s.x[0]) +
                   ", value=" + to_string(s.value));
}

Outcome criterion_5() {
  Tally t;
  SplitMix64 rng(5);
  int single_row = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = trial < 4 ? 1 : 1 + rng.below(3), d = 1 + rng.below(3);
    if (m == 1) ++single_row;
    const IntegerSystem s = random_system(rng, m, d, 2);
    const RationalVector rb = interior_rhs(rng, s, 1);
    std::vector<long> b;
    for (const Rational& v : rb) b.push_back(v.get_num().get_si());
    const Rational x = make_rational(1 + static_cast<long>(rng.below(4)), 4);
    const RecourseVolume r = volume_via_recourse_detailed(s, b, x);
    t.check(r.volume == volume_dp(s, rb), "trial " + std::to_string(trial) + " volume mismatch");
    t.check(r.p.total_degree() <= static_cast<int>(d) + 1, "trial " + std::to_string(trial) + " degree of p");
  }
  return t.outcome("volume_via_recourse = volume_dp on 20 instances (" + std::to_string(single_row) + " with m=1), deg p <= d+1");
}

Outcome criterion_6() {
  Tally t;
  int bisected = 0, identities = 0;
  for (const auto& [name, g] : fixture_graphs()) {
    const mpfr_prec_t bits = default_precision(g.n);
    if (g.n <= 6) {
      const BisectionResult r = bisection_expectation(g, envelope_oracle(g));
      const IntervalScalar e = envelope_expectation(g, bits);
      t.check(r.calls <= 3 * g.n - 3, name + ": " + std::to_string(r.calls) + " calls");
      t.check(r.interval.width() <= pow2_inv(3 * g.n - 3), name + ": interval too wide");
      t.check(r.interval.contains(e), name + ": interval misses E[max z1]");
      ++bisected;
    }
    const EnvelopeExpectations ee = envelope_expectations(g, bits);
    t.check((ee.emax - ee.emin).scaled(Rational(2)).overlaps(area_via_gadget(g, bits)), name + ": area != 2(Emax - Emin)");
    ++identities;
  }
  return t.outcome("bisection on " + std::to_string(bisected) + " graphs with n<=6; area identity on " +
                   std::to_string(identities) + " graphs");
}

StochasticProgram random_complete_program(SplitMix64& rng) {
  const std::size_t m2 = 1 + rng.below(2), d = 1 + rng.below(2), n1 = 1 + rng.below(2);
  const std::size_t extra = m2 == 1 ? 1 + rng.below(2) : 1;
  const std::size_t n2 = 2 * m2 + extra;
  StochasticProgram sp = StochasticProgram::zeros(n1, 2 * n1, n2, m2, d);
  auto small = [&](long range, long den) { return make_rational(static_cast<long>(rng.below(static_cast<std::uint64_t>(2 * range + 1))) - range, den); };
  for (std::size_t j = 0; j < n1; ++j) {
    sp.c[j] = small(2, 2);
    sp.A[2 * j][j] = 1;
    sp.b[2 * j] = 1;
    sp.A[2 * j + 1][j] = -1;
  }
  // [I, -I, extra]: complete recourse; positive costs keep it bounded.
  for (std::size_t i = 0; i < m2; ++i) {
    sp.W[i][i] = 1;
    sp.W[i][m2 + i] = -1;
    for (std::size_t k = 2 * m2; k < n2; ++k) sp.W[i][k] = small(2, 1);
  }
  for (std::size_t k = 0; k < n2; ++k) {
    sp.q0[k] = make_rational(2 + static_cast<long>(rng.below(5)), 2);
    for (std::size_t v = 0; v < d; ++v) sp.Qmat[k][v] = small(2, 4);
  }
  for (std::size_t i = 0; i < m2; ++i) {
    sp.h0[i] = small(2, 2);
    for (std::size_t v = 0; v < d; ++v) sp.Hmat[i][v] = small(2, 1);
    for (std::size_t j = 0; j < n1; ++j) {
      sp.T0[i][j] = small(2, 1);
      for (std::size_t v = 0; v < d; ++v) sp.Tk[v][i][j] = small(1, 2);
    }
  }
  return sp;
}

Outcome criterion_7() {
  Tally t;
  SplitMix64 rng(7);
  int worst = -1;
  double worst_z = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const StochasticProgram sp = random_complete_program(rng);
    sp.validate();
    RationalVector x(sp.n1);
    for (auto& v : x) v = make_rational(static_cast<long>(rng.below(5)), 4);
    const std::vector<Basis> bases = enumerate_bases(sp.W);
    const std::vector<BasisCell> cells = build_cells(sp, x, bases);
    int mismatches = 0;
    for (int k = 0; k < 10000; ++k) {
      RationalVector xi(sp.d);
      for (std::size_t v = 0; v < sp.d; ++v) xi[v] = sp.l[v] + (sp.u[v] - sp.l[v]) * rng.unit_dyadic();
      std::optional<Rational> best;
      for (const BasisCell& c : cells) {
        if (!c.cell.contains(xi)) continue;
        const Rational val = c.objective.evaluate(xi);
        if (!best || val > *best) best = val;
      }
      const SecondStageResult lp = solve_second_stage(sp, x, xi);
      if (!best || lp.status != LpStatus::optimal || *best != lp.value) ++mismatches;
    }
    t.check(mismatches == 0, "program " + std::to_string(trial) + ": " + std::to_string(mismatches) + " cell/LP mismatches");
    const Rational exact = expected_recourse(sp, x);
    const McRecourse mc = mc_expected_recourse(sp, x, 100000, 700 + static_cast<std::uint64_t>(trial));
    const Rational diff = abs(exact - mc.estimate);
    const double z = sgn(mc.stderr_bound) > 0 ? Rational(diff / mc.stderr_bound).get_d() : (sgn(diff) == 0 ? 0.0 : 1e9);
    if (z > worst_z) worst_z = z, worst = trial;
    t.check(diff <= 4 * mc.stderr_bound, "program " + std::to_string(trial) + " MC off by " + std::to_string(z) + " stderr");
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max over cells = LP value at 10^4 xi per program; MC max |z| = %.2f (program %d)", worst_z, worst);
  return t.outcome(buf);
}

Outcome criterion_8() {
  Tally t;
  int incomplete = 0, complete = 0;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(data_dir / "recourse")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const InstanceFile inst = parse_instance(f.string());
    const auto& sp = std::get<StochasticProgram>(inst.payload);
    RationalVector x;
    for (const Json& v : inst.metadata["x"]) x.push_back(rational_from_json(v, "/metadata/x"));
    const Rational expected = rational_from_json(inst.metadata["coverage_deficit"], "/metadata/coverage_deficit");
    const std::string name = f.filename().string();
    if (inst.metadata["complete"].get<bool>()) {
      ++complete;
      const RecourseEvaluation e = evaluate_recourse(sp, x);
      t.check(e.coverage_deficit == 0, name + ": deficit " + to_string(e.coverage_deficit));
    } else {
      ++incomplete;
      try {
        evaluate_recourse(sp, x);
        t.check(false, name + ": no incompleteness error");
      } catch (const RecourseIncompleteError& e) {
        const Rational deficit = e.deficit().empty() ? Rational(0) : parse_rational(e.deficit());
        t.check(deficit > 0 && deficit == expected, name + ": deficit " + e.deficit());
      }
    }
  }
  return t.outcome(std::to_string(incomplete) + " incomplete fixtures raise with the certified deficit, " +
                   std::to_string(complete) + " complete fixtures certify 0");
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                       criterion_5, criterion_6, criterion_7, criterion_8};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu: %s %s [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
