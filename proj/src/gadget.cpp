#include "sslp/gadget.hpp"

#include <algorithm>
#include <memory>
#include <set>

#include "sslp/errors.hpp"

namespace sslp {

namespace {

constexpr int kMaxRetries = 16;

// Angles are tracked exactly as integers in units of pi/2^n, mod 2^{n+1}.
long wrap(long a, int n) {
  const long full = 2L << n;
  a %= full;
  return a < 0 ? a + full : a;
}

// Second entry of the unit vector at this angle is negative.
bool below_axis(long a, int n) { return a > (1L << n); }

bool on_axis(long a, int n) { return a == 0 || a == (1L << n); }

IntervalScalar num(long v, mpfr_prec_t bits) { return IntervalScalar(Rational(v), bits); }

std::vector<IntervalPair> rotation_table(int n, mpfr_prec_t bits) {
  std::vector<IntervalPair> out;
  for (int k = 0; k <= n; ++k) out.push_back(dyadic_trig(static_cast<unsigned>(k), bits));
  return out;
}

// (cos, sin)(index pi / 2^n) by adding up the dyadic angles of the set bits.
IntervalPair unit_at(const std::vector<IntervalPair>& rot, int n, long index, mpfr_prec_t bits) {
  index = wrap(index, n);
  IntervalScalar c = num(1, bits), s = num(0, bits);
  for (int k = 0; k <= n; ++k) {
    if (!(index >> k & 1)) continue;
    const IntervalPair& t = rot[static_cast<std::size_t>(n - k)];
    IntervalScalar nc = c * t.first - s * t.second;
    IntervalScalar ns = s * t.first + c * t.second;
    c = std::move(nc);
    s = std::move(ns);
  }
  return {std::move(c), std::move(s)};
}

// b^l by the recursive rule, deciding each sign in interval arithmetic and
// cross-checking it against the exact angle.
std::vector<int> trajectory_bits(const std::vector<IntervalPair>& rot, int n, long ell, mpfr_prec_t bits) {
  // Signs only depend on the direction, so the unit vector stands in for
  // v_l (which is unbounded for n = 1).
  IntervalPair p = unit_at(rot, n, 2 * ell + 1, bits);
  IntervalScalar y = std::move(p.first), z = std::move(p.second);
  long a = wrap(2 * ell + 1, n);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const IntervalPair& r = rot[static_cast<std::size_t>(i - 1)];
    IntervalScalar ny = r.first * y + r.second * z;
    IntervalScalar nz = r.first * z - r.second * y;
    a = wrap(a - (1L << (n - i + 1)), n);
    const int sign = nz.certified_sign();
    if (sign == 0) throw PrecisionError("bit_vector: sign of the second entry not certified");
    if ((sign < 0) != below_axis(a, n)) throw InternalConsistencyError("bit_vector: interval sign disagrees with the angle");
    out[static_cast<std::size_t>(i - 1)] = sign < 0 ? 1 : 0;
    if (sign < 0) {
      nz = -nz;
      a = wrap(-a, n);
    }
    y = std::move(ny);
    z = std::move(nz);
  }
  // The composed transform must land on the direction of v_0.
  const IntervalPair& v0 = rot[static_cast<std::size_t>(n)];
  if (a != 1 || !y.overlaps(v0.first) || !z.overlaps(v0.second)) {
    throw InternalConsistencyError("bit_vector: transformed vertex is not v_0");
  }
  return out;
}

template <class F>
auto with_retries(mpfr_prec_t bits, F&& f) {
  for (int attempt = 0;; ++attempt, bits *= 2) {
    try {
      return f(bits);
    } catch (const PrecisionError&) {
      if (attempt == kMaxRetries) throw;
    }
  }
}

ExtendedFormulation make_formulation(int n, const std::vector<IntervalPair>& rot, const FormulationKey& key,
                                     mpfr_prec_t bits) {
  const std::size_t nv = 2 * static_cast<std::size_t>(n + 1);
  auto Y = [](int i) { return static_cast<std::size_t>(i - 1); };
  auto Z = [n](int i) { return static_cast<std::size_t>(n + i); };
  ExtendedFormulation f;
  f.num_vars = nv;
  auto row = [&](Relation rel, std::vector<std::pair<std::size_t, IntervalScalar>> terms, IntervalScalar rhs) {
    FormulationRow r;
    r.coefficients.assign(nv, num(0, bits));
    for (auto& [v, c] : terms) r.coefficients[v] = std::move(c);
    r.relation = rel;
    r.rhs = std::move(rhs);
    f.rows.push_back(std::move(r));
  };
  for (int i = 1; i <= n; ++i) {
    const IntervalScalar& c = rot[static_cast<std::size_t>(i - 1)].first;
    const IntervalScalar& s = rot[static_cast<std::size_t>(i - 1)].second;
    const bool tight = key && (key->i == i || key->j == i);
    // y_{i+1} = c y_i + s z_i
    row(Relation::eq, {{Y(i + 1), num(1, bits)}, {Y(i), -c}, {Z(i), -s}}, num(0, bits));
    if (tight) {
      // z_{i+1} = -s y_i + c z_i
      row(Relation::eq, {{Z(i + 1), num(1, bits)}, {Y(i), s}, {Z(i), -c}}, num(0, bits));
    } else {
      row(Relation::le, {{Z(i + 1), num(-1, bits)}, {Y(i), -s}, {Z(i), c}}, num(0, bits));
      row(Relation::le, {{Z(i + 1), num(-1, bits)}, {Y(i), s}, {Z(i), -c}}, num(0, bits));
    }
  }
  if (!key) {
    const IntervalPair& t = rot[static_cast<std::size_t>(n - 1)];
    row(Relation::le, {{Y(n + 1), num(1, bits)}}, num(1, bits));
    row(Relation::le, {{Y(n + 1), t.first}, {Z(n + 1), t.second}}, num(1, bits));
  } else {
    const IntervalPair& t = rot[static_cast<std::size_t>(n)];
    row(Relation::le, {{Y(n + 1), t.first}, {Z(n + 1), t.second}}, t.first);
  }
  return f;
}

IntervalScalar row_residual(const FormulationRow& r, std::span<const IntervalScalar> p) {
  IntervalScalar acc = -r.rhs;
  for (std::size_t v = 0; v < p.size(); ++v) acc += r.coefficients[v] * p[v];
  return acc;
}

std::vector<bool> cut_mask(const Gadget& gadget) {
  const long k = 1L << gadget.n;
  std::vector<bool> cut(static_cast<std::size_t>(k), false);
  for (long ell = 0; ell < k; ++ell)
    for (const Edge& e : gadget.graph.edges)
      if (cut_indicator(gadget, e, ell)) {
        cut[static_cast<std::size_t>(ell)] = true;
        break;
      }
  return cut;
}

IntervalScalar shoelace(const std::vector<const IntervalPair*>& pts, mpfr_prec_t bits) {
  IntervalScalar twice = num(0, bits);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const IntervalPair& a = *pts[i];
    const IntervalPair& b = *pts[(i + 1) % pts.size()];
    twice += a.first * b.second - b.first * a.second;
  }
  return twice.scaled(Rational(1, 2));
}

struct Line {
  long index;
  IntervalScalar ay, az;
};

// Integral over [-1, 1] of the envelope formed by consecutive supporting
// lines a.p = 1 of a convex polygon, listed in the order they become active.
IntervalScalar chain_integral(const std::vector<Line>& lines, mpfr_prec_t bits) {
  std::vector<IntervalScalar> xs{num(-1, bits)};
  for (std::size_t j = 0; j + 1 < lines.size(); ++j) {
    const Line& p = lines[j];
    const Line& q = lines[j + 1];
    const IntervalScalar det = p.ay * q.az - q.ay * p.az;
    if (det.certified_sign() == 0) throw PrecisionError("envelope: parallel test not certified");
    xs.push_back((q.az - p.az) / det);
  }
  xs.push_back(num(1, bits));
  const IntervalScalar one = num(1, bits);
  IntervalScalar total = num(0, bits);
  for (std::size_t j = 0; j < lines.size(); ++j) {
    const Line& l = lines[j];
    IntervalScalar z0 = (one - l.ay * xs[j]) / l.az;
    IntervalScalar z1 = (one - l.ay * xs[j + 1]) / l.az;
    total += (xs[j + 1] - xs[j]) * (z0 + z1);
  }
  return total.scaled(Rational(1, 2));
}

Rational dyadic_round(const IntervalScalar& v, int p, Rational& radius) {
  const Integer scale = Integer(1) << static_cast<mp_bitcnt_t>(p);
  const Rational mid = v.midpoint() * scale;
  Integer q = floor(mid + Rational(1, 2));
  Rational r(q, scale);
  r.canonicalize();
  radius = std::max({radius, Rational(abs(r - v.lower())), Rational(abs(v.upper() - r))});
  return r;
}

}  // namespace

void Graph::validate() {
  if (n < 2) throw InvalidArgumentError("graph needs n >= 2");
  if (n > 30) throw UnsupportedError("graph with more than 30 vertices");
  std::set<Edge> seen;
  for (Edge& e : edges) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 1 || e.j > n) throw InvalidArgumentError("edge endpoint outside 1..n");
    if (e.i == e.j) throw InvalidArgumentError("graph has a loop");
    if (!seen.insert(e).second) throw InvalidArgumentError("graph has a duplicate edge");
  }
}

bool Graph::has_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::find(edges.begin(), edges.end(), Edge{a, b}) != edges.end();
}

Graph make_graph(int n, std::vector<std::pair<int, int>> edges) {
  Graph g;
  g.n = n;
  for (auto [a, b] : edges) g.edges.push_back({a, b});
  g.validate();
  return g;
}

std::vector<int> bit_vector(long ell, int n) {
  if (n < 1) throw InvalidArgumentError("bit_vector: n must be positive");
  if (ell < 0 || ell >= (1L << n)) throw InvalidArgumentError("bit_vector: index out of range");
  return with_retries(default_precision(n), [&](mpfr_prec_t bits) {
    return trajectory_bits(rotation_table(n, bits), n, ell, bits);
  });
}

std::string bit_string(const std::vector<int>& bits) {
  std::string s;
  for (int b : bits) s += b ? '1' : '0';
  return s;
}

Gadget build_gadget(const Graph& graph, mpfr_prec_t precision_bits) {
  Graph g = graph;
  g.validate();
  if (g.n > 20) throw UnsupportedError("gadget: n above 20");
  return with_retries(precision_bits, [&](mpfr_prec_t bits) {
    Gadget out;
    out.graph = g;
    out.n = g.n;
    out.precision_bits = bits;
    const int n = g.n;
    const long k = 1L << n;
    out.rotations = rotation_table(n, bits);
    const IntervalPair& base = out.rotations[static_cast<std::size_t>(n)];
    const IntervalScalar sec = num(1, bits) / base.first;
    for (long ell = 0; ell < k; ++ell) {
      IntervalPair v = unit_at(out.rotations, n, 2 * ell + 1, bits);
      out.vertices.push_back({v.first * sec, v.second * sec});
      out.midpoints.push_back(unit_at(out.rotations, n, 2 * ell + 2, bits));
      out.bits.push_back(trajectory_bits(out.rotations, n, ell, bits));
      std::uint32_t mask = 0;
      for (int i = 0; i < n; ++i)
        if (out.bits.back()[static_cast<std::size_t>(i)] == 0) mask |= 1u << i;
      out.subsets.push_back(mask);
    }
    const IntervalScalar tan0 = base.second / base.first;
    const IntervalScalar& c1 = out.rotations[static_cast<std::size_t>(n - 1)].first;
    out.delta = (tan0 * (num(1, bits) - c1)).scaled(Rational(1, 2));
    out.polygon_area = tan0.scaled(Rational(Integer(1) << static_cast<mp_bitcnt_t>(n)));
    out.formulations.emplace(std::nullopt, make_formulation(n, out.rotations, std::nullopt, bits));
    for (const Edge& e : g.edges) out.formulations.emplace(e, make_formulation(n, out.rotations, e, bits));
    return out;
  });
}

std::vector<IntervalScalar> lift_point(const Gadget& gadget, const FormulationKey& key, long index) {
  const int n = gadget.n;
  const mpfr_prec_t bits = gadget.precision_bits;
  const auto& rot = gadget.rotations;
  std::vector<IntervalScalar> p(2 * static_cast<std::size_t>(n + 1), num(0, bits));
  IntervalPair start = unit_at(rot, n, index, bits);
  IntervalScalar y = std::move(start.first), z = std::move(start.second);
  if (wrap(index, n) % 2) {
    const IntervalScalar sec = num(1, bits) / rot[static_cast<std::size_t>(n)].first;
    y = y * sec;
    z = z * sec;
  }
  long a = wrap(index, n);
  p[0] = y;
  p[static_cast<std::size_t>(n + 1)] = z;
  for (int i = 1; i <= n; ++i) {
    const IntervalPair& r = rot[static_cast<std::size_t>(i - 1)];
    IntervalScalar ny = r.first * y + r.second * z;
    IntervalScalar nz = r.first * z - r.second * y;
    a = wrap(a - (1L << (n - i + 1)), n);
    const int sign = nz.certified_sign();
    // A zero second entry is a designed degeneracy of midpoints; the exact
    // angle decides it.
    if (sign == 0 && !on_axis(a, n)) throw PrecisionError("lift_point: sign of the second entry not certified");
    if (sign != 0 && (sign < 0) != below_axis(a, n)) {
      throw InternalConsistencyError("lift_point: interval sign disagrees with the angle");
    }
    const bool fixed = key && (key->i == i || key->j == i);
    if (!fixed && below_axis(a, n)) {
      nz = -nz;
      a = wrap(-a, n);
    }
    y = std::move(ny);
    z = std::move(nz);
    p[static_cast<std::size_t>(i)] = y;
    p[static_cast<std::size_t>(n + 1 + i)] = z;
  }
  return p;
}

bool formulation_admits(const ExtendedFormulation& f, std::span<const IntervalScalar> point) {
  if (point.size() != f.num_vars) throw InvalidArgumentError("formulation_admits: point has the wrong length");
  for (const auto& r : f.rows) {
    const IntervalScalar res = row_residual(r, point);
    if (r.relation == Relation::eq ? res.certified_sign() != 0 : res.certainly_positive()) return false;
  }
  return true;
}

bool cut_indicator(const Gadget& gadget, const Edge& e, long ell) {
  if (!gadget.graph.has_edge(e.i, e.j)) throw InvalidArgumentError("cut_indicator: edge not in the graph");
  if (ell < 0 || ell >= (1L << gadget.n)) throw InvalidArgumentError("cut_indicator: vertex index out of range");
  const std::uint32_t s = gadget.subsets[static_cast<std::size_t>(ell)];
  const bool combinatorial = (s >> (e.i - 1) & 1) && (s >> (e.j - 1) & 1);

  auto geometric = [&](const Gadget& gd) {
    const ExtendedFormulation& f = gd.formulations.at(e);
    const std::vector<IntervalScalar> p = lift_point(gd, e, 2 * ell + 1);
    for (std::size_t r = 0; r + 1 < f.rows.size(); ++r) {
      const IntervalScalar res = row_residual(f.rows[r], p);
      const bool bad = f.rows[r].relation == Relation::eq ? res.certified_sign() != 0 : res.certainly_positive();
      if (bad) throw InternalConsistencyError("cut_indicator: trajectory violates a recursive row");
    }
    const int sign = row_residual(f.rows.back(), p).certified_sign();
    if (sign == 0) throw PrecisionError("cut_indicator: terminal row undecided");
    return sign > 0;
  };
  bool cut;
  try {
    cut = geometric(gadget);
  } catch (const PrecisionError&) {
    cut = with_retries(gadget.precision_bits * 2,
                       [&](mpfr_prec_t bits) { return geometric(build_gadget(gadget.graph, bits)); });
  }
  if (cut != combinatorial) throw InternalConsistencyError("cut_indicator: geometric and combinatorial tests disagree");
  return cut;
}

std::vector<long> cut_vertices(const Graph& g, mpfr_prec_t precision_bits) {
  const Gadget gadget = build_gadget(g, precision_bits);
  const std::vector<bool> cut = cut_mask(gadget);
  std::vector<long> out;
  for (std::size_t ell = 0; ell < cut.size(); ++ell)
    if (cut[ell]) out.push_back(static_cast<long>(ell));
  return out;
}

IntervalScalar area_via_gadget(const Graph& g, mpfr_prec_t precision_bits) {
  return with_retries(precision_bits, [&](mpfr_prec_t bits) {
    const Gadget gadget = build_gadget(g, bits);
    const std::vector<bool> cut = cut_mask(gadget);
    std::vector<const IntervalPair*> chain;
    long cuts = 0;
    for (std::size_t ell = 0; ell < cut.size(); ++ell) {
      if (cut[ell]) ++cuts;
      else chain.push_back(&gadget.vertices[ell]);
      chain.push_back(&gadget.midpoints[ell]);
    }
    IntervalScalar area = shoelace(chain, bits);
    const IntervalScalar formula = gadget.polygon_area - gadget.delta.scaled(Rational(cuts));
    if (!area.overlaps(formula)) throw InternalConsistencyError("area_via_gadget: shoelace area disagrees with the cut count");
    const Rational target = Rational(1) / Rational(Integer(1) << static_cast<mp_bitcnt_t>(3 * g.n - 2));
    if (area.width() >= target) throw PrecisionError("area_via_gadget: enclosure too wide");
    return area;
  });
}

std::uint64_t count_is(const Graph& graph, CountMode mode, int max_n) {
  Graph g = graph;
  g.validate();
  if (mode == CountMode::brute) {
    const std::uint64_t total = std::uint64_t{1} << g.n;
    std::uint64_t count = 0;
    for (std::uint64_t s = 0; s < total; ++s) {
      bool independent = true;
      for (const Edge& e : g.edges)
        if ((s >> (e.i - 1) & 1) && (s >> (e.j - 1) & 1)) {
          independent = false;
          break;
        }
      count += independent;
    }
    return count;
  }
  if (g.n > max_n) throw InvalidArgumentError("count_is: n exceeds the configured maximum for area mode");
  return with_retries(default_precision(g.n), [&](mpfr_prec_t bits) {
    const Gadget gadget = build_gadget(g, bits);
    const IntervalScalar area = area_via_gadget(g, bits);
    const IntervalScalar n_is = num(1L << g.n, bits) - (gadget.polygon_area - area) / gadget.delta;
    const Integer lo = ceil(n_is.lower()), hi = floor(n_is.upper());
    if (lo != hi) throw PrecisionError("count_is: count interval does not isolate an integer");
    return static_cast<std::uint64_t>(lo.get_ui());
  });
}

EnvelopeExpectations envelope_expectations(const Graph& g, mpfr_prec_t precision_bits) {
  return with_retries(precision_bits, [&](mpfr_prec_t bits) {
    const Gadget gadget = build_gadget(g, bits);
    const std::vector<bool> cut = cut_mask(gadget);
    const int n = g.n;
    const long half = 1L << n;
    std::vector<Line> upper, lower;
    auto add = [&](long index, const IntervalPair& a) {
      if (index == 0 || index == half || index == 2 * half) return;
      (index < half ? upper : lower).push_back({index, a.first, a.second});
    };
    for (std::size_t ell = 0; ell < cut.size(); ++ell) {
      const long l = static_cast<long>(ell);
      add(2 * l + 2, gadget.midpoints[ell]);
      if (cut[ell]) add(2 * l + 1, gadget.vertices[ell]);
    }
    // The upper envelope is traced from the normal nearest pi down to 0,
    // the lower one from pi up to 2 pi.
    std::sort(upper.begin(), upper.end(), [](const Line& a, const Line& b) { return a.index > b.index; });
    std::sort(lower.begin(), lower.end(), [](const Line& a, const Line& b) { return a.index < b.index; });
    return EnvelopeExpectations{chain_integral(upper, bits).scaled(Rational(1, 2)),
                                chain_integral(lower, bits).scaled(Rational(1, 2))};
  });
}

IntervalScalar envelope_expectation(const Graph& g, mpfr_prec_t precision_bits) {
  return envelope_expectations(g, precision_bits).emax;
}

GraphProgram sslp_from_graph(const Graph& graph, int rational_bits) {
  if (rational_bits < 8) throw InvalidArgumentError("sslp_from_graph: need at least 8 bits");
  Graph g = graph;
  g.validate();
  const Gadget gadget = build_gadget(g, std::max<mpfr_prec_t>(default_precision(g.n), rational_bits + 64));
  const int n = g.n;
  GraphProgram out;
  out.rational_bits = rational_bits;
  out.n = n;
  out.rounding_radius = 0;
  // Each rounded rotation moves a lifted point by at most 2 sqrt(2) 2^-bits;
  // n steps plus the rounded terminal row stay below 8 (n + 1) 2^-bits.
  out.terminal_margin = Rational(8 * (n + 1)) / Rational(Integer(1) << static_cast<mp_bitcnt_t>(rational_bits));

  // Columns: z_1 split into (+, -); per formulation the split pairs of
  // y_2..y_{n+1}, z_2..z_{n+1}, then one slack per inequality.
  struct Block {
    const ExtendedFormulation* f;
    std::size_t first_col, first_slack;
  };
  std::vector<Block> blocks;
  std::size_t cols = 2, rows = 0;
  for (const auto& [key, f] : gadget.formulations) {
    Block b{&f, cols, cols + 4 * static_cast<std::size_t>(n)};
    cols = b.first_slack;
    for (const auto& r : f.rows) cols += r.relation == Relation::le;
    rows += f.rows.size();
    blocks.push_back(b);
  }
  out.formulation_rows = rows;
  StochasticProgram sp = StochasticProgram::zeros(1, 2, cols, rows, 1);
  sp.A = {{Rational(1)}, {Rational(-1)}};
  sp.b = {Rational(1), Rational(0)};
  sp.l = {Rational(-1)};
  sp.u = {Rational(1)};
  sp.q0[0] = -1;
  sp.q0[1] = 1;
  RationalMatrix T1(rows, RationalVector(1, Rational(0)));
  const std::size_t y1 = 0, z1 = static_cast<std::size_t>(n + 1);
  std::size_t row = 0;
  for (const Block& b : blocks) {
    std::size_t slack = b.first_slack;
    for (const auto& r : b.f->rows) {
      auto coef = [&](std::size_t v) { return dyadic_round(r.coefficients[v], rational_bits, out.rounding_radius); };
      sp.W[row][0] = coef(z1);
      sp.W[row][1] = -sp.W[row][0];
      std::size_t col = b.first_col;
      for (std::size_t v = 0; v < r.coefficients.size(); ++v) {
        if (v == y1 || v == z1) continue;
        sp.W[row][col] = coef(v);
        sp.W[row][col + 1] = -sp.W[row][col];
        col += 2;
      }
      if (r.relation == Relation::le) sp.W[row][slack++] = 1;
      // W y = h - T_xi x with T_xi = -rhs + xi a_{y1}: the right-hand side
      // becomes rhs x - a_{y1} x xi.
      Rational rhs = dyadic_round(r.rhs, rational_bits, out.rounding_radius);
      // Only the terminal rows have a nonzero right-hand side.
      if (sgn(rhs) != 0) rhs += out.terminal_margin;
      sp.T0[row][0] = -rhs;
      T1[row][0] = coef(y1);
      ++row;
    }
  }
  sp.Tk = {std::move(T1)};
  sp.validate();
  out.program = std::move(sp);
  return out;
}

ExpectationOracle envelope_oracle(const Graph& g) {
  // The enclosure is kept between calls and only refined when a query
  // falls inside it.
  struct State {
    mpfr_prec_t bits;
    std::optional<IntervalScalar> e;
  };
  auto state = std::make_shared<State>(State{default_precision(g.n), std::nullopt});
  return [g, state](const Rational& c) {
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
      if (!state->e || attempt > 0) {
        if (attempt > 0) state->bits *= 2;
        state->e = envelope_expectation(g, state->bits);
      }
      const IntervalScalar& e = *state->e;
      FirstStageSolution s;
      s.iterations = static_cast<std::size_t>(attempt) + 1;
      if (e.lower() > c) {
        // f(x) = x (c - E) is decreasing: x = 1.
        s.x = {Rational(1)};
        s.value = c - e.midpoint();
        s.gap = e.width();
        return s;
      }
      if (e.upper() < c) {
        s.x = {Rational(0)};
        s.value = 0;
        s.gap = 0;
        return s;
      }
    }
    throw PrecisionError("envelope oracle: cost inside the enclosure at maximum precision");
  };
}

ExpectationOracle program_oracle(const GraphProgram& gp) {
  return [gp](const Rational& c) {
    StochasticProgram sp = gp.program;
    sp.c = {c};
    const Rational eps = Rational(1) / Rational(Integer(1) << static_cast<mp_bitcnt_t>(gp.rational_bits));
    return solve_first_stage(sp, eps, parametric_evaluator(sp));
  };
}

Rational program_perturbation(const GraphProgram& gp) {
  // The envelope moves by about the margin over the smallest |a_z| of a
  // supporting line, sin(pi/2^n) > 2^{1-n}.
  return gp.terminal_margin * Rational(Integer(1) << static_cast<mp_bitcnt_t>(gp.n + 2));
}

BisectionResult bisection_expectation(const Graph& graph, const ExpectationOracle& oracle,
                                      const Rational& perturbation) {
  Graph g = graph;
  g.validate();
  const Rational target = Rational(1) / Rational(Integer(1) << static_cast<mp_bitcnt_t>(3 * g.n - 3));
  BisectionResult out;
  Rational lo(1, 2), hi(1);
  // With f(x) = x (c - E): x* = 1 means E >= c, x* = 0 means E <= c.
  auto decide = [&](const Rational& c) {
    const FirstStageSolution s = oracle(c);
    ++out.calls;
    if (s.x.size() != 1 || sgn(s.x[0]) < 0 || s.x[0] > 1) throw ProtocolError("oracle returned x outside [0,1]");
    const Rational& x = s.x[0];
    if (s.value > s.gap) throw ProtocolError("oracle value above f(0) = 0");
    if (sgn(x) == 0) {
      if (sgn(s.value) != 0) throw ProtocolError("oracle reports x = 0 with a nonzero value");
    } else {
      const Rational implied = c - s.value / x;
      const Rational tol = s.gap / x + perturbation;
      if (implied < lo - tol || implied > hi + tol) throw ProtocolError("oracle value inconsistent with the bracket");
    }
    return 2 * x >= 1;
  };
  // E >= 1/2 holds since P_G contains the diamond spanned by the facet
  // midpoints at multiples of pi/2; E <= 1 from the facet z_1 <= 1.
  if (!decide(lo)) {
    out.bracket_held = false;
    hi = lo;
    lo = 0;
  }
  while (hi - lo > target) {
    const Rational mid = (lo + hi) / 2;
    if (decide(mid)) lo = mid;
    else hi = mid;
  }
  out.interval = IntervalScalar(lo - perturbation, hi + perturbation, default_precision(g.n));
  return out;
}

}  // namespace sslp
