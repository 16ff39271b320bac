#pragma once

#include <cstddef>
#include <vector>

#include "sslp/rational.hpp"

namespace sslp {

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

/// Outcome of min c.y s.t. A y = b, y >= 0.
struct StandardFormResult {
  LpStatus status = LpStatus::infeasible;
  Rational value;
  RationalVector primal;
  /// Optimal multipliers of A y = b (b.lambda = value); zero on redundant rows.
  RationalVector dual;
  std::vector<std::size_t> basis;
};

/// Two-phase primal simplex in exact arithmetic. Pivoting follows Bland's
/// rule over the given column order, so results are deterministic.
StandardFormResult solve_standard_form(const RationalMatrix& A, const RationalVector& b, const RationalVector& c);

}  // namespace sslp
