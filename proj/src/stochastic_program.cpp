#include "sslp/stochastic_program.hpp"

#include <string>

#include "sslp/errors.hpp"

namespace sslp {

namespace {

void expect_shape(const RationalMatrix& m, std::size_t rows, std::size_t cols, const char* name) {
  if (m.size() != rows) throw InvalidArgumentError(std::string(name) + ": wrong number of rows");
  for (const auto& row : m) {
    if (row.size() != cols) throw InvalidArgumentError(std::string(name) + ": wrong number of columns");
  }
}

void expect_size(const RationalVector& v, std::size_t n, const char* name) {
  if (v.size() != n) throw InvalidArgumentError(std::string(name) + ": wrong length");
}

}  // namespace

void StochasticProgram::validate() const {
  if (n1 == 0 || m1 == 0 || n2 == 0 || m2 == 0 || d == 0) {
    throw InvalidArgumentError("StochasticProgram: n1, m1, n2, m2, d must be positive");
  }
  expect_size(c, n1, "c");
  expect_shape(A, m1, n1, "A");
  expect_size(b, m1, "b");
  expect_shape(W, m2, n2, "W");
  expect_size(q0, n2, "q0");
  expect_shape(Qmat, n2, d, "Qmat");
  expect_shape(T0, m2, n1, "T0");
  if (Tk.size() != d) throw InvalidArgumentError("Tk: need one matrix per random variable");
  for (const auto& t : Tk) expect_shape(t, m2, n1, "Tk");
  expect_size(h0, m2, "h0");
  expect_shape(Hmat, m2, d, "Hmat");
  expect_size(l, d, "l");
  expect_size(u, d, "u");
  for (std::size_t k = 0; k < d; ++k) {
    if (!(l[k] < u[k])) throw InvalidArgumentError("StochasticProgram: need l < u");
  }
}

HPolytope StochasticProgram::first_stage_polytope() const {
  HPolytope p;
  p.dim = n1;
  for (std::size_t i = 0; i < m1; ++i) p.rows.push_back({A[i], b[i]});
  return p;
}

void StochasticProgram::certify_first_stage() const {
  HPolytope p = first_stage_polytope();
  RationalVector dir(n1, Rational(0));
  for (std::size_t j = 0; j < n1; ++j) {
    dir.assign(n1, Rational(0));
    dir[j] = 1;
    for (Sense s : {Sense::maximize, Sense::minimize}) {
      LPResult r = solve_lp(p, dir, s);
      if (r.status == LpStatus::infeasible) throw InvalidArgumentError("StochasticProgram: first stage is empty");
      if (r.status == LpStatus::unbounded) throw InvalidArgumentError("StochasticProgram: first stage is unbounded");
    }
  }
}

bool StochasticProgram::first_stage_feasible(std::span<const Rational> x) const {
  if (x.size() != n1) return false;
  for (std::size_t i = 0; i < m1; ++i) {
    if (dot(A[i], x) > b[i]) return false;
  }
  return true;
}

bool StochasticProgram::objective_random() const {
  for (const auto& row : Qmat)
    for (const auto& v : row)
      if (sgn(v) != 0) return true;
  return false;
}

RationalVector StochasticProgram::q_at(std::span<const Rational> xi) const {
  RationalVector q = q0;
  for (std::size_t j = 0; j < n2; ++j) q[j] += dot(Qmat[j], xi);
  return q;
}

RationalMatrix StochasticProgram::T_at(std::span<const Rational> xi) const {
  RationalMatrix t = T0;
  for (std::size_t k = 0; k < d; ++k) {
    if (sgn(xi[k]) == 0) continue;
    for (std::size_t i = 0; i < m2; ++i)
      for (std::size_t j = 0; j < n1; ++j) t[i][j] += xi[k] * Tk[k][i][j];
  }
  return t;
}

RationalVector StochasticProgram::rhs_constant(std::span<const Rational> x) const {
  RationalVector r = h0;
  for (std::size_t i = 0; i < m2; ++i) r[i] -= dot(T0[i], x);
  return r;
}

RationalVector StochasticProgram::rhs_slope(std::span<const Rational> x, std::size_t k) const {
  RationalVector r(m2);
  for (std::size_t i = 0; i < m2; ++i) r[i] = Hmat[i][k] - dot(Tk[k][i], x);
  return r;
}

RationalVector StochasticProgram::rhs_at(std::span<const Rational> x, std::span<const Rational> xi) const {
  RationalVector r = rhs_constant(x);
  for (std::size_t k = 0; k < d; ++k) {
    if (sgn(xi[k]) == 0) continue;
    RationalVector s = rhs_slope(x, k);
    for (std::size_t i = 0; i < m2; ++i) r[i] += xi[k] * s[i];
  }
  return r;
}

StochasticProgram StochasticProgram::zeros(std::size_t n1, std::size_t m1, std::size_t n2, std::size_t m2,
                                           std::size_t d) {
  StochasticProgram sp;
  sp.n1 = n1;
  sp.m1 = m1;
  sp.n2 = n2;
  sp.m2 = m2;
  sp.d = d;
  sp.c.assign(n1, Rational(0));
  sp.A.assign(m1, RationalVector(n1, Rational(0)));
  sp.b.assign(m1, Rational(0));
  sp.W.assign(m2, RationalVector(n2, Rational(0)));
  sp.q0.assign(n2, Rational(0));
  sp.Qmat.assign(n2, RationalVector(d, Rational(0)));
  sp.T0.assign(m2, RationalVector(n1, Rational(0)));
  sp.Tk.assign(d, RationalMatrix(m2, RationalVector(n1, Rational(0))));
  sp.h0.assign(m2, Rational(0));
  sp.Hmat.assign(m2, RationalVector(d, Rational(0)));
  sp.l.assign(d, Rational(0));
  sp.u.assign(d, Rational(1));
  return sp;
}

StochasticProgram newsvendor(const Rational& c) {
  StochasticProgram sp = StochasticProgram::zeros(1, 2, 2, 1, 1);
  sp.c = {c};
  sp.A = {{Rational(1)}, {Rational(-1)}};
  sp.b = {Rational(1), Rational(0)};
  sp.W = {{Rational(1), Rational(-1)}};
  sp.q0 = {Rational(1), Rational(0)};
  sp.T0 = {{Rational(1)}};
  sp.Hmat = {{Rational(1)}};
  return sp;
}

SecondStageResult solve_second_stage(const StochasticProgram& sp, std::span<const Rational> x,
                                     std::span<const Rational> xi) {
  StandardFormResult r = solve_standard_form(sp.W, sp.rhs_at(x, xi), sp.q_at(xi));
  SecondStageResult out;
  out.status = r.status;
  out.value = r.value;
  out.y = std::move(r.primal);
  out.dual = std::move(r.dual);
  return out;
}

RationalVector second_stage_subgradient(const StochasticProgram& sp, std::span<const Rational> xi,
                                        std::span<const Rational> dual) {
  RationalMatrix t = sp.T_at(xi);
  RationalVector g(sp.n1, Rational(0));
  for (std::size_t i = 0; i < sp.m2; ++i) {
    if (sgn(dual[i]) == 0) continue;
    for (std::size_t j = 0; j < sp.n1; ++j) g[j] -= t[i][j] * dual[i];
  }
  return g;
}

}  // namespace sslp
