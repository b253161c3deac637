#pragma once

#include <sslide/wrench.hpp>

#include <string>

namespace sslide {

struct RobustnessReport {
  double epsilon = 0.0;
  bool nominal_feasible = false;
  bool sufficient = false;
  bool exact = false;
  double margin = 0.0;
  bool has_max_epsilon = false;
  double max_epsilon = 0.0;
  std::string diagnostic;
};

struct MaxEpsilon {
  bool feasible = false;
  double epsilon = 0.0;  // +inf when the cone is the whole space
};

// Smallest singular value of W (0 when rank deficient).
double sigma_min(const MatX& W);
// Max-row-sum norm of the pseudoinverse of a full-row-rank W; infinite when rank deficient.
double pinv_norm(const MatX& W);

bool robust_sufficient(const MatX& W, const VecX& beta, double eps, std::string* diagnostic = nullptr);

bool robust_exact(const MatX& W, const VecX& wc, const VecX& wg, double eps);

MaxEpsilon max_epsilon(const MatX& W, const VecX& wc, const VecX& wg, double tol = 1e-4);

RobustnessReport robustness_report(const MatX& W, const VecX& wc, const VecX& wg, double eps,
                                   bool want_max, double tol = 1e-4);

}  // namespace sslide
