#pragma once

#include <sslide/common.hpp>

namespace sslide {

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  VecX x;
  double objective = 0.0;
  int iterations = 0;
};

// Dense two-phase simplex for  min c'x  s.t.  A x = b,  x >= 0.
// Bland's rule is used for both entering and leaving choices.
LpResult solve_lp(const MatX& A, const VecX& b, const VecX& c, int max_iterations = 5000);

}  // namespace sslide
