#include "sslp/recourse.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sslp/errors.hpp"
#include "sslp/random.hpp"
#include "sslp/volume_dp.hpp"

namespace sslp {

std::vector<Basis> enumerate_bases(const RationalMatrix& W) {
  const std::size_t m = W.size();
  const std::size_t n = m == 0 ? 0 : W[0].size();
  if (m == 0) throw InvalidArgumentError("enumerate_bases: W has no rows");
  if (m > n) throw InvalidArgumentError("enumerate_bases: W has more rows than columns");
  std::vector<Basis> out;
  std::vector<std::size_t> cols(m);
  for (std::size_t i = 0; i < m; ++i) cols[i] = i;
  RationalMatrix sub(m, RationalVector(m));
  while (true) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) sub[i][j] = W[i][cols[j]];
    if (sgn(determinant(sub)) != 0) out.push_back({cols});
    // next combination in lexicographic order
    std::size_t i = m;
    while (i > 0 && cols[i - 1] == n - m + i - 1) --i;
    if (i == 0) break;
    ++cols[i - 1];
    for (std::size_t j = i; j < m; ++j) cols[j] = cols[j - 1] + 1;
  }
  return out;
}

BasisCell basis_cell(const StochasticProgram& sp, std::span<const Rational> x, const Basis& basis) {
  const std::size_t m2 = sp.m2, d = sp.d, n1 = sp.n1;
  if (basis.columns.size() != m2) throw InvalidArgumentError("basis_cell: basis size differs from m2");
  RationalMatrix wb(m2, RationalVector(m2));
  for (std::size_t i = 0; i < m2; ++i)
    for (std::size_t j = 0; j < m2; ++j) wb[i][j] = sp.W[i][basis.columns[j]];
  RationalMatrix inv;
  if (!invert(wb, inv)) throw InvalidArgumentError("basis_cell: singular basis");
  const RationalMatrix inv_t = transpose(inv);

  // beta(xi) = W_B^-1 r(xi), lambda(xi) = W_B^-T q_B(xi); index 0 is the
  // constant part, index k+1 the coefficient of xi_k.
  std::vector<RationalVector> beta(d + 1), lambda(d + 1);
  beta[0] = multiply(inv, sp.rhs_constant(x));
  RationalVector qb(m2);
  for (std::size_t j = 0; j < m2; ++j) qb[j] = sp.q0[basis.columns[j]];
  lambda[0] = multiply(inv_t, qb);
  for (std::size_t k = 0; k < d; ++k) {
    beta[k + 1] = multiply(inv, sp.rhs_slope(x, k));
    for (std::size_t j = 0; j < m2; ++j) qb[j] = sp.Qmat[basis.columns[j]][k];
    lambda[k + 1] = multiply(inv_t, qb);
  }

  BasisCell out;
  out.basis = basis;
  out.cell.dim = d;
  out.cell.box = Box{sp.l, sp.u};
  auto add_row = [&](RationalVector a, Rational rhs) {
    if (std::all_of(a.begin(), a.end(), [](const Rational& v) { return sgn(v) == 0; })) {
      if (sgn(rhs) < 0) out.empty = true;
      return;
    }
    out.cell.rows.push_back({std::move(a), std::move(rhs)});
  };
  for (std::size_t i = 0; i < m2; ++i) {
    RationalVector a(d);
    for (std::size_t k = 0; k < d; ++k) a[k] = -beta[k + 1][i];
    add_row(std::move(a), beta[0][i]);
  }
  std::set<std::size_t> in_basis(basis.columns.begin(), basis.columns.end());
  for (std::size_t j = 0; j < sp.n2; ++j) {
    if (in_basis.count(j)) continue;
    auto wl = [&](const RationalVector& lam) {
      Rational s = 0;
      for (std::size_t i = 0; i < m2; ++i) s += sp.W[i][j] * lam[i];
      return s;
    };
    RationalVector a(d);
    for (std::size_t k = 0; k < d; ++k) a[k] = wl(lambda[k + 1]) - sp.Qmat[j][k];
    add_row(std::move(a), sp.q0[j] - wl(lambda[0]));
  }

  std::vector<Polynomial> lam_poly, r_poly;
  RationalVector coeffs(d);
  const RationalVector r0 = sp.rhs_constant(x);
  std::vector<RationalVector> rk(d);
  for (std::size_t k = 0; k < d; ++k) rk[k] = sp.rhs_slope(x, k);
  for (std::size_t i = 0; i < m2; ++i) {
    for (std::size_t k = 0; k < d; ++k) coeffs[k] = lambda[k + 1][i];
    lam_poly.push_back(Polynomial::affine(lambda[0][i], coeffs));
    for (std::size_t k = 0; k < d; ++k) coeffs[k] = rk[k][i];
    r_poly.push_back(Polynomial::affine(r0[i], coeffs));
  }
  out.objective = Polynomial(d);
  for (std::size_t i = 0; i < m2; ++i) out.objective += lam_poly[i] * r_poly[i];
  out.subgradient.assign(n1, Polynomial(d));
  for (std::size_t j = 0; j < n1; ++j) {
    for (std::size_t i = 0; i < m2; ++i) {
      for (std::size_t k = 0; k < d; ++k) coeffs[k] = sp.Tk[k][i][j];
      out.subgradient[j] -= Polynomial::affine(sp.T0[i][j], coeffs) * lam_poly[i];
    }
  }
  return out;
}

std::vector<BasisCell> build_cells(const StochasticProgram& sp, std::span<const Rational> x,
                                   std::span<const Basis> bases) {
  std::vector<BasisCell> cells;
  for (const auto& b : bases) {
    BasisCell c = basis_cell(sp, x, b);
    if (c.empty || !has_interior(c.cell)) continue;
    cells.push_back(std::move(c));
  }
  return cells;
}

std::vector<ObjectiveClass> group_objective_classes(std::span<const BasisCell> cells) {
  std::vector<ObjectiveClass> out;
  std::map<Polynomial, std::size_t> index;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto [it, fresh] = index.emplace(cells[i].objective, out.size());
    if (fresh) out.push_back({cells[i].objective, {}, {}});
    out[it->second].members.push_back(cells[i].basis);
    out[it->second].cells.push_back(i);
  }
  return out;
}

std::optional<Rational> cell_value_at(std::span<const BasisCell> cells, std::span<const Rational> xi) {
  for (const auto& c : cells) {
    if (c.cell.contains(xi)) return c.objective.evaluate(xi);
  }
  return std::nullopt;
}

namespace {

std::vector<std::string> to_strings(std::span<const Rational> v) {
  std::vector<std::string> out;
  for (const auto& r : v) out.push_back(to_string(r));
  return out;
}

// Throws the error matching the second-stage status at xi; returns when
// the second stage is solvable there.
void classify_point(const StochasticProgram& sp, std::span<const Rational> x, std::span<const Rational> xi,
                    const Rational& deficit) {
  SecondStageResult r = solve_second_stage(sp, x, xi);
  if (r.status == LpStatus::infeasible) {
    throw RecourseIncompleteError("second stage infeasible on a set of positive measure", to_string(deficit),
                                  to_strings(xi));
  }
  if (r.status == LpStatus::unbounded) {
    throw UnboundedRecourseError("second stage unbounded at xi = (" + [&] {
      std::string s;
      for (const auto& t : to_strings(xi)) s += (s.empty() ? "" : ", ") + t;
      return s;
    }() + ")");
  }
}

[[noreturn]] void report_uncovered(const StochasticProgram& sp, std::span<const Rational> x,
                                   std::span<const BasisCell> cells, const Rational& deficit,
                                   const RecourseOptions& options) {
  SplitMix64 rng(options.seed);
  RationalVector xi(sp.d);
  for (std::uint64_t s = 0; s < options.witness_samples; ++s) {
    for (std::size_t k = 0; k < sp.d; ++k) xi[k] = sp.l[k] + (sp.u[k] - sp.l[k]) * rng.unit_dyadic();
    if (cell_value_at(cells, xi)) continue;
    classify_point(sp, x, xi, deficit);
  }
  throw RecourseIncompleteError("basis cells leave part of the box uncovered (no witness found)", to_string(deficit),
                                {});
}

// Integrates `integrands` (polynomials in zeta) over `region` (inside the
// unit cube).
std::vector<Rational> integrate_region(const HPolytope& region, std::span<const Polynomial> integrands,
                                       IntegrationBackend backend, Integer& norm) {
  if (backend == IntegrationBackend::triangulation) return integrate_triangulated(region, integrands);
  HPolytope reduced = remove_redundant_rows(region);
  const std::size_t d = region.dim;
  IntegerSystem sys;
  RationalVector rhs;
  for (const auto& row : reduced.rows) {
    Integer scale = common_denominator(row.a);
    std::vector<Integer> ints(d);
    Integer g = 0;
    for (std::size_t j = 0; j < d; ++j) {
      ints[j] = Integer(row.a[j] * scale);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ints[j].get_mpz_t());
    }
    IntegerVector a(d);
    for (std::size_t j = 0; j < d; ++j) {
      Integer v = ints[j] / g;
      if (!v.fits_slong_p()) throw UnsupportedError("volume_dp backend: scaled row does not fit a machine integer");
      a[j] = v.get_si();
      if (abs(v) > norm) norm = abs(v);
    }
    sys.A.push_back(std::move(a));
    Rational r = row.rhs * scale / g;
    r.canonicalize();
    rhs.push_back(std::move(r));
  }
  if (sys.A.empty()) {
    sys.A.push_back(IntegerVector(d, 0));
    rhs.push_back(Rational(0));
  }
  return quad_moments(sys, rhs, integrands);
}

}  // namespace

RecourseEvaluation evaluate_recourse(const StochasticProgram& sp, std::span<const Rational> x,
                                     std::span<const Basis> bases, const RecourseOptions& options) {
  sp.validate();
  if (!sp.first_stage_feasible(x)) throw InvalidArgumentError("expected_recourse: x violates Ax <= b");
  const std::size_t d = sp.d;
  IntegrationBackend backend = options.backend;
  if (backend == IntegrationBackend::automatic) {
    backend = d <= 3 ? IntegrationBackend::triangulation : IntegrationBackend::volume_dp;
  }

  RecourseEvaluation out;
  out.bases = bases.size();
  std::vector<BasisCell> cells = build_cells(sp, x, bases);
  out.cells = cells.size();
  std::vector<ObjectiveClass> classes = group_objective_classes(cells);
  out.classes = classes.size();

  // xi = l + diag(u - l) zeta maps the unit cube onto the box; under the
  // uniform law the expectation is the plain integral over zeta.
  std::vector<Polynomial> images;
  for (std::size_t k = 0; k < d; ++k) {
    RationalVector coeffs(d, Rational(0));
    coeffs[k] = sp.u[k] - sp.l[k];
    images.push_back(Polynomial::affine(sp.l[k], coeffs));
  }
  std::vector<std::vector<HalfSpace>> rows(cells.size());
  std::vector<std::vector<Polynomial>> integrands(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (const auto& h : cells[c].cell.rows) {
      HalfSpace t{RationalVector(d), h.rhs};
      for (std::size_t k = 0; k < d; ++k) {
        t.a[k] = h.a[k] * (sp.u[k] - sp.l[k]);
        t.rhs -= h.a[k] * sp.l[k];
      }
      rows[c].push_back(std::move(t));
    }
    integrands[c].push_back(Polynomial::constant(d, Rational(1)));
    integrands[c].push_back(cells[c].objective.compose(images));
    for (const auto& g : cells[c].subgradient) integrands[c].push_back(g.compose(images));
  }

  std::vector<Rational> total(2 + sp.n1, Rational(0));
  for (const auto& cls : classes) {
    if (cls.cells.size() > options.max_class_size) {
      throw UnsupportedError("expected_recourse: objective class with " + std::to_string(cls.cells.size()) +
                             " bases exceeds the inclusion-exclusion cap");
    }
    struct Node {
      std::vector<std::size_t> members;  // positions in cls.cells, increasing
      HPolytope region;
    };
    std::vector<Node> level;
    for (std::size_t i = 0; i < cls.cells.size(); ++i) {
      HPolytope r = HPolytope::unit_cube(d);
      r.rows = rows[cls.cells[i]];
      level.push_back({{i}, std::move(r)});
    }
    // A subset contributes with the integrand of its first member; summed
    // over all subsets this picks the last cell containing each point,
    // which is optimal there.
    for (std::size_t size = 1; !level.empty(); ++size) {
      const bool add = size % 2 == 1;
      std::vector<Node> next;
      for (const auto& node : level) {
        ++out.regions;
        const std::size_t owner = cls.cells[node.members.front()];
        std::vector<Rational> vals = integrate_region(node.region, integrands[owner], backend, out.scaled_norm);
        for (std::size_t t = 0; t < total.size(); ++t) {
          if (add) total[t] += vals[t];
          else total[t] -= vals[t];
        }
        for (std::size_t j = node.members.back() + 1; j < cls.cells.size(); ++j) {
          Node child{node.members, node.region};
          child.members.push_back(j);
          const auto& extra = rows[cls.cells[j]];
          child.region.rows.insert(child.region.rows.end(), extra.begin(), extra.end());
          if (has_interior(child.region)) next.push_back(std::move(child));
        }
      }
      level = std::move(next);
    }
  }

  out.coverage_deficit = Rational(1) - total[0];
  if (sgn(out.coverage_deficit) < 0) {
    throw InternalConsistencyError("expected_recourse: basis cells cover more than the box");
  }
  if (sgn(out.coverage_deficit) > 0) report_uncovered(sp, x, cells, out.coverage_deficit, options);
  out.value = total[1];
  out.subgradient.assign(total.begin() + 2, total.end());
  return out;
}

RecourseEvaluation evaluate_recourse(const StochasticProgram& sp, std::span<const Rational> x,
                                     const RecourseOptions& options) {
  sp.validate();
  std::vector<Basis> bases = enumerate_bases(sp.W);
  return evaluate_recourse(sp, x, bases, options);
}

Rational expected_recourse(const StochasticProgram& sp, std::span<const Rational> x, const RecourseOptions& options) {
  return evaluate_recourse(sp, x, options).value;
}

RationalVector expected_subgradient(const StochasticProgram& sp, std::span<const Rational> x,
                                    const RecourseOptions& options) {
  return evaluate_recourse(sp, x, options).subgradient;
}

RecourseEvaluation evaluate_recourse_1d(const StochasticProgram& sp, std::span<const Rational> x) {
  sp.validate();
  if (sp.d != 1) throw InvalidArgumentError("expected_recourse_1d: d must be 1");
  if (!sp.first_stage_feasible(x)) throw InvalidArgumentError("expected_recourse_1d: x violates Ax <= b");
  RecourseEvaluation out;
  std::vector<Basis> bases = enumerate_bases(sp.W);
  out.bases = bases.size();
  std::vector<BasisCell> cells = build_cells(sp, x, bases);
  out.cells = cells.size();
  out.classes = group_objective_classes(cells).size();

  const Rational& l = sp.l[0];
  const Rational& u = sp.u[0];
  std::vector<std::pair<Rational, Rational>> spans;
  std::set<Rational> points{l, u};
  for (const auto& c : cells) {
    Rational lo = l, hi = u;
    for (const auto& row : c.cell.rows) {
      const Rational bound = row.rhs / row.a[0];
      if (sgn(row.a[0]) > 0) hi = std::min(hi, bound);
      else lo = std::max(lo, bound);
    }
    spans.emplace_back(lo, hi);
    points.insert(lo);
    points.insert(hi);
  }
  std::vector<Rational> pts(points.begin(), points.end());
  Rational value = 0, uncovered = 0;
  RationalVector grad(sp.n1, Rational(0));
  std::vector<RationalVector> gaps;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const Rational& a = pts[s];
    const Rational& b = pts[s + 1];
    const Rational mid = (a + b) / 2;
    std::size_t hit = cells.size();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (spans[c].first < mid && mid < spans[c].second) {
        hit = c;
        break;
      }
    }
    if (hit == cells.size()) {
      uncovered += b - a;
      gaps.push_back({mid});
      continue;
    }
    ++out.regions;
    value += integrate_segment(cells[hit].objective, a, b);
    for (std::size_t j = 0; j < sp.n1; ++j) grad[j] += integrate_segment(cells[hit].subgradient[j], a, b);
  }
  const Rational len = u - l;
  out.coverage_deficit = uncovered / len;
  if (sgn(out.coverage_deficit) > 0) {
    for (const auto& g : gaps) classify_point(sp, x, g, out.coverage_deficit);
    report_uncovered(sp, x, cells, out.coverage_deficit, RecourseOptions{});
  }
  out.value = value / len;
  for (auto& g : grad) g /= len;
  out.subgradient = std::move(grad);
  return out;
}

Rational expected_recourse_1d(const StochasticProgram& sp, std::span<const Rational> x) {
  return evaluate_recourse_1d(sp, x).value;
}

RecourseEvaluation evaluate_recourse_parametric(const StochasticProgram& sp, std::span<const Rational> x) {
  sp.validate();
  if (sp.d != 1) throw InvalidArgumentError("parametric recourse: d must be 1");
  if (sp.objective_random()) throw InvalidArgumentError("parametric recourse: objective must be deterministic");
  if (!sp.first_stage_feasible(x)) throw InvalidArgumentError("parametric recourse: x violates Ax <= b");
  const std::size_t m2 = sp.m2, n2 = sp.n2;
  const Rational& l = sp.l[0];
  const Rational& u = sp.u[0];
  const Rational len = u - l;
  const RationalVector r0 = sp.rhs_constant(x);
  const RationalVector r1 = sp.rhs_slope(x, 0);

  // Feasible xi form an interval: extreme xi of {W y - xi r1 = r0, y >= 0}.
  // Columns: y (n2), t = xi - l, s = u - xi.
  RationalMatrix A(m2 + 1, RationalVector(n2 + 2, Rational(0)));
  RationalVector rhs(m2 + 1);
  for (std::size_t i = 0; i < m2; ++i) {
    for (std::size_t j = 0; j < n2; ++j) A[i][j] = sp.W[i][j];
    A[i][n2] = -r1[i];
    rhs[i] = r0[i] + l * r1[i];
  }
  A[m2][n2] = 1;
  A[m2][n2 + 1] = 1;
  rhs[m2] = len;
  RationalVector obj(n2 + 2, Rational(0));
  obj[n2] = 1;
  StandardFormResult lo_res = solve_standard_form(A, rhs, obj);
  if (lo_res.status != LpStatus::optimal) {
    RationalVector w{(l + u) / 2};
    throw RecourseIncompleteError("second stage infeasible on the whole box", "1/1", to_strings(w));
  }
  obj[n2] = -1;
  StandardFormResult hi_res = solve_standard_form(A, rhs, obj);
  const Rational lo = l + lo_res.primal[n2];
  const Rational hi = l + hi_res.primal[n2];
  RecourseEvaluation out;
  out.coverage_deficit = ((lo - l) + (u - hi)) / len;
  if (sgn(out.coverage_deficit) > 0) {
    RationalVector w{lo > l ? Rational((l + lo) / 2) : Rational((hi + u) / 2)};
    classify_point(sp, x, w, out.coverage_deficit);
    throw InternalConsistencyError("parametric recourse: uncovered point has a finite optimum");
  }

  struct Probe {
    Rational xi, value, slope;
    RationalVector dual;
  };
  auto probe = [&](const Rational& xi) {
    RationalVector pt{xi};
    SecondStageResult r = solve_second_stage(sp, x, pt);
    if (r.status == LpStatus::unbounded) throw UnboundedRecourseError("second stage unbounded on the whole box");
    if (r.status != LpStatus::optimal) throw InternalConsistencyError("parametric recourse: infeasible inside the feasible interval");
    ++out.regions;
    return Probe{xi, r.value, dot(r.dual, r1), r.dual};
  };

  Rational value = 0;
  RationalVector grad(sp.n1, Rational(0));
  // On [a, b] the dual lam is optimal: Q = lam.r(xi) and the x-subgradient
  // is -(T0 + xi T1)^T lam.
  auto accumulate = [&](const Probe& p, const Rational& a, const Rational& b) {
    if (a == b) return;
    const Rational d1 = b - a;
    const Rational d2 = (b * b - a * a) / 2;
    value += dot(p.dual, r0) * d1 + p.slope * d2;
    for (std::size_t j = 0; j < sp.n1; ++j) {
      Rational c0 = 0, c1 = 0;
      for (std::size_t i = 0; i < m2; ++i) {
        c0 += sp.T0[i][j] * p.dual[i];
        c1 += sp.Tk[0][i][j] * p.dual[i];
      }
      grad[j] -= c0 * d1 + c1 * d2;
    }
  };

  std::vector<std::pair<Probe, Probe>> stack;
  stack.emplace_back(probe(l), probe(u));
  while (!stack.empty()) {
    auto [pa, pb] = std::move(stack.back());
    stack.pop_back();
    if (pa.slope == pb.slope) {
      if (pa.value + pa.slope * (pb.xi - pa.xi) != pb.value) {
        throw InternalConsistencyError("parametric recourse: recourse is not convex in xi");
      }
      accumulate(pa, pa.xi, pb.xi);
      continue;
    }
    if (pa.slope > pb.slope) throw InternalConsistencyError("parametric recourse: slopes not monotone");
    const Rational m = (pb.value - pa.value + pa.slope * pa.xi - pb.slope * pb.xi) / (pa.slope - pb.slope);
    const Rational tangent = pa.value + pa.slope * (m - pa.xi);
    Probe pm = probe(m);
    if (pm.value == tangent) {
      accumulate(pa, pa.xi, m);
      accumulate(pb, m, pb.xi);
      continue;
    }
    if (pm.value < tangent) throw InternalConsistencyError("parametric recourse: value below a supporting line");
    Probe pm2 = pm;
    stack.emplace_back(std::move(pm2), pb);
    stack.emplace_back(pa, std::move(pm));
  }
  out.value = value / len;
  for (auto& g : grad) g /= len;
  out.subgradient = std::move(grad);
  return out;
}

McRecourse mc_expected_recourse(const StochasticProgram& sp, std::span<const Rational> x, std::uint64_t samples,
                                std::uint64_t seed) {
  sp.validate();
  if (samples == 0) throw InvalidArgumentError("mc_expected_recourse: samples must be positive");
  SplitMix64 rng(seed);
  RationalVector xi(sp.d);
  Rational sum = 0, sum_sq = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < sp.d; ++k) xi[k] = sp.l[k] + (sp.u[k] - sp.l[k]) * rng.unit_dyadic();
    SecondStageResult r = solve_second_stage(sp, x, xi);
    if (r.status == LpStatus::infeasible) {
      throw RecourseIncompleteError("second stage infeasible at a sampled point", "", to_strings(xi));
    }
    if (r.status == LpStatus::unbounded) throw UnboundedRecourseError("second stage unbounded at a sampled point");
    sum += r.value;
    sum_sq += r.value * r.value;
  }
  McRecourse out;
  const Rational n(static_cast<unsigned long>(samples));
  out.estimate = sum / n;
  if (samples > 1) {
    Rational var = (sum_sq - sum * out.estimate) / (n - 1);
    if (sgn(var) < 0) var = 0;
    out.stderr_bound = sqrt_upper(var / n);
  } else {
    out.stderr_bound = 0;
  }
  return out;
}

}  // namespace sslp
