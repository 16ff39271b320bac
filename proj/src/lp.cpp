#include "sslp/lp.hpp"

#include <limits>

#include "sslp/errors.hpp"

namespace sslp {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal:
      return "optimal";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::unbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

class Tableau {
 public:
  Tableau(const RationalMatrix& A, const RationalVector& b, std::size_t n)
      : m_(A.size()), n_(n), row_sign_(A.size(), 1) {
    rows_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      rows_[i].assign(A[i].begin(), A[i].end());
      rows_[i].resize(n_, Rational(0));
      rhs_.push_back(b[i]);
      if (sgn(rhs_[i]) < 0) {
        row_sign_[i] = -1;
        for (auto& v : rows_[i]) v = -v;
        rhs_[i] = -rhs_[i];
      }
    }
    basis_.assign(m_, kNone);
  }

  // Chooses an initial basis: existing unit columns where possible,
  // artificial columns elsewhere. Returns the number of artificials.
  std::size_t add_initial_basis() {
    std::vector<bool> row_covered(m_, false);
    for (std::size_t j = 0; j < n_; ++j) {
      std::size_t hit = kNone;
      bool unit = true;
      for (std::size_t i = 0; i < m_ && unit; ++i) {
        const int s = sgn(rows_[i][j]);
        if (s == 0) continue;
        if (hit != kNone || rows_[i][j] != 1) unit = false;
        hit = i;
      }
      if (unit && hit != kNone && !row_covered[hit]) {
        row_covered[hit] = true;
        basis_[hit] = j;
      }
    }
    std::size_t artificials = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!row_covered[i]) ++artificials;
    }
    first_artificial_ = n_;
    const std::size_t width = n_ + artificials;
    for (auto& r : rows_) r.resize(width, Rational(0));
    std::size_t next = n_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (row_covered[i]) continue;
      rows_[i][next] = 1;
      basis_[i] = next++;
    }
    width_ = width;
    return artificials;
  }

  void set_costs(const RationalVector& cost) {
    cost_ = cost;
    reduced_ = cost;
    objective_ = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational& cb = cost_[basis_[i]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j < width_; ++j) {
        if (sgn(rows_[i][j]) != 0) reduced_[j] -= cb * rows_[i][j];
      }
      objective_ += cb * rhs_[i];
    }
  }

  // Runs Bland's rule on the columns below `column_limit`.
  LpStatus optimize(std::size_t column_limit) {
    for (;;) {
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < column_limit; ++j) {
        if (sgn(reduced_[j]) < 0) {
          enter = j;
          break;
        }
      }
      if (enter == kNone) return LpStatus::optimal;
      std::size_t leave = kNone;
      Rational best_ratio;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (sgn(rows_[i][enter]) <= 0) continue;
        Rational ratio = rhs_[i] / rows_[i][enter];
        if (leave == kNone || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == kNone) return LpStatus::unbounded;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const Rational inv = 1 / rows_[r][c];
    for (std::size_t j = 0; j < width_; ++j) {
      if (sgn(rows_[r][j]) != 0) rows_[r][j] *= inv;
    }
    rhs_[r] *= inv;
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < width_; ++j) {
      if (sgn(rows_[r][j]) != 0) nz.push_back(j);
    }
    auto eliminate = [&](std::vector<Rational>& row, Rational& rhs) {
      if (sgn(row[c]) == 0) return;
      const Rational f = row[c];
      for (auto j : nz) row[j] -= f * rows_[r][j];
      rhs -= f * rhs_[r];
    };
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i != r) eliminate(rows_[i], rhs_[i]);
    }
    Rational neg_obj = -objective_;
    eliminate(reduced_, neg_obj);
    objective_ = -neg_obj;
    basis_[r] = c;
  }

  // Pivots basic artificials out; drops rows that are linear combinations
  // of the others.
  void expel_artificials() {
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < first_artificial_) {
        ++i;
        continue;
      }
      std::size_t col = kNone;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (sgn(rows_[i][j]) != 0) {
          col = j;
          break;
        }
      }
      if (col != kNone) {
        pivot(i, col);
        ++i;
      } else {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
        original_row_.erase(original_row_.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
  }

  void init_row_map() {
    original_row_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) original_row_[i] = i;
  }

  std::size_t m_;
  std::size_t n_;
  std::size_t width_ = 0;
  std::size_t first_artificial_ = 0;
  std::vector<int> row_sign_;
  std::vector<std::vector<Rational>> rows_;
  RationalVector rhs_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> original_row_;
  RationalVector cost_;
  RationalVector reduced_;
  Rational objective_;
};

}  // namespace

StandardFormResult solve_standard_form(const RationalMatrix& A, const RationalVector& b, const RationalVector& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw InvalidArgumentError("solve_standard_form: rhs size mismatch");
  for (const auto& row : A) {
    if (row.size() != n) throw InvalidArgumentError("solve_standard_form: row length mismatch");
  }
  StandardFormResult result;
  Tableau t(A, b, n);
  t.init_row_map();
  const std::size_t artificials = t.add_initial_basis();
  if (artificials > 0) {
    RationalVector phase1(t.width_, Rational(0));
    for (std::size_t j = n; j < t.width_; ++j) phase1[j] = 1;
    t.set_costs(phase1);
    t.optimize(t.width_);
    if (sgn(t.objective_) > 0) {
      result.status = LpStatus::infeasible;
      return result;
    }
    t.expel_artificials();
  }
  RationalVector cost(t.width_, Rational(0));
  for (std::size_t j = 0; j < n; ++j) cost[j] = c[j];
  t.set_costs(cost);
  const LpStatus status = t.optimize(n);
  result.status = status;
  if (status != LpStatus::optimal) return result;

  result.primal.assign(n, Rational(0));
  for (std::size_t i = 0; i < t.rows_.size(); ++i) result.primal[t.basis_[i]] = t.rhs_[i];
  result.value = dot(c, result.primal);
  result.basis.assign(t.basis_.begin(), t.basis_.end());

  // Multipliers from B^T lambda = c_B on the surviving rows.
  const std::size_t k = t.rows_.size();
  RationalMatrix bt(k, RationalVector(k));
  RationalVector cb(k);
  for (std::size_t i = 0; i < k; ++i) {
    cb[i] = c[t.basis_[i]];
    for (std::size_t r = 0; r < k; ++r) bt[i][r] = A[t.original_row_[r]][t.basis_[i]];
  }
  RationalVector lambda;
  result.dual.assign(m, Rational(0));
  if (k > 0) {
    if (!solve_linear(bt, cb, lambda)) throw InternalConsistencyError("simplex: singular final basis");
    for (std::size_t r = 0; r < k; ++r) result.dual[t.original_row_[r]] = lambda[r];
  }
  return result;
}

}  // namespace sslp
