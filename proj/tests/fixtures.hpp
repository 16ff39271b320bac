#pragma once

// Seeded instance generators shared by the unit tests and the acceptance run.

#include "sslp/gadget.hpp"
#include "sslp/random.hpp"
#include "sslp/stochastic_program.hpp"
#include "sslp/volume_dp.hpp"

namespace sslp::fixtures {

inline Rational small_rational(SplitMix64& rng, long range, long den) {
  Rational r(static_cast<long>(rng.below(2 * range + 1)) - range, den);
  r.canonicalize();
  return r;
}

/// Complete, bounded recourse: W = [I, -I, w] with q_xi >= 0 on the box, so
/// y = 0 prices are dual feasible and every right-hand side is reachable.
inline StochasticProgram random_complete_sslp(std::uint64_t seed, std::size_t m2, std::size_t d, std::size_t n1 = 1) {
  SplitMix64 rng(seed);
  const std::size_t n2 = 2 * m2 + (m2 == 1 ? 1 + rng.below(2) : 1);
  StochasticProgram sp = StochasticProgram::zeros(n1, 2 * n1, n2, m2, d);
  for (std::size_t j = 0; j < n1; ++j) {
    sp.A[2 * j][j] = 1;
    sp.b[2 * j] = 1;
    sp.A[2 * j + 1][j] = -1;
    sp.b[2 * j + 1] = 0;
    sp.c[j] = small_rational(rng, 2, 4);
  }
  for (std::size_t i = 0; i < m2; ++i) {
    sp.W[i][i] = 1;
    sp.W[i][m2 + i] = -1;
    for (std::size_t j = 2 * m2; j < n2; ++j) sp.W[i][j] = small_rational(rng, 2, 1);
  }
  for (std::size_t j = 0; j < n2; ++j) {
    Rational bound = 0;
    for (std::size_t k = 0; k < d; ++k) {
      sp.Qmat[j][k] = small_rational(rng, 1, 2);
      bound += abs(sp.Qmat[j][k]);
    }
    sp.q0[j] = bound + small_rational(rng, 2, 2) + 1;
  }
  for (std::size_t i = 0; i < m2; ++i) {
    sp.h0[i] = small_rational(rng, 2, 2);
    for (std::size_t k = 0; k < d; ++k) sp.Hmat[i][k] = small_rational(rng, 2, 1);
    for (std::size_t j = 0; j < n1; ++j) {
      sp.T0[i][j] = small_rational(rng, 2, 2);
      for (std::size_t k = 0; k < d; ++k) sp.Tk[k][i][j] = small_rational(rng, 1, 2);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    sp.l[k] = small_rational(rng, 1, 2);
    sp.u[k] = sp.l[k] + 1 + make_rational(static_cast<long>(rng.below(2)), 2);
  }
  return sp;
}

inline IntegerSystem random_integer_system(SplitMix64& rng, std::size_t m, std::size_t d, long bound) {
  IntegerSystem s;
  s.A.assign(m, IntegerVector(d));
  bool nonzero = false;
  for (auto& row : s.A)
    for (auto& v : row) {
      v = static_cast<long>(rng.below(2 * bound + 1)) - bound;
      nonzero = nonzero || v != 0;
    }
  if (!nonzero) s.A[0][0] = 1;
  return s;
}

// G(n, 1/2) with a seeded generator.
inline Graph random_graph(std::uint64_t seed, int n) {
  SplitMix64 rng(seed);
  Graph g;
  g.n = n;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (rng.below(2)) g.edges.push_back({i, j});
  g.validate();
  return g;
}

inline Graph path_graph(int n) {
  Graph g;
  g.n = n;
  for (int i = 1; i < n; ++i) g.edges.push_back({i, i + 1});
  return g;
}

inline Graph cycle_graph(int n) {
  Graph g = path_graph(n);
  if (n >= 3) g.edges.push_back({1, n});
  g.validate();
  return g;
}

inline Graph star_graph(int n) {
  Graph g;
  g.n = n;
  for (int i = 2; i <= n; ++i) g.edges.push_back({1, i});
  return g;
}

inline Graph complete_graph(int n) {
  Graph g;
  g.n = n;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) g.edges.push_back({i, j});
  return g;
}

inline Graph cherry_graph() { return make_graph(3, {{1, 2}, {1, 3}}); }

}  // namespace sslp::fixtures
