#include <sslide/robustness.hpp>

#include <cmath>
#include <limits>

namespace sslide {

double sigma_min(const MatX& W) {
  if (W.rows() == 0 || W.cols() < W.rows()) return 0.0;
  Eigen::JacobiSVD<MatX> svd(W);
  const VecX sv = svd.singularValues();
  const double s = sv[W.rows() - 1];
  return s > 1e-12 * sv[0] ? s : 0.0;
}

double pinv_norm(const MatX& W) {
  if (sigma_min(W) == 0.0) return std::numeric_limits<double>::infinity();
  const MatX P = W.transpose() * (W * W.transpose()).inverse();
  return P.rowwise().lpNorm<1>().maxCoeff();
}

bool robust_sufficient(const MatX& W, const VecX& beta, double eps, std::string* diagnostic) {
  if (!(eps >= 0.0)) throw DomainError("robustness", "epsilon must be nonnegative");
  if (beta.size() != W.cols()) throw DomainError("robustness", "beta length does not match W");
  if (sigma_min(W) == 0.0) {
    if (diagnostic) *diagnostic = "W is rank deficient";
    return false;
  }
  const double bound = eps * pinv_norm(W);
  for (int k = 0; k < beta.size(); ++k) {
    if (eps == 0.0 ? beta[k] < 0.0 : beta[k] <= bound) {
      if (diagnostic) *diagnostic = "beta[" + std::to_string(k) + "] below eps * ||pinv(W)||";
      return false;
    }
  }
  if (diagnostic) diagnostic->clear();
  return true;
}

bool robust_exact(const MatX& W, const VecX& wc, const VecX& wg, double eps) {
  if (!(eps >= 0.0)) throw DomainError("robustness", "epsilon must be nonnegative");
  const int dim = static_cast<int>(W.rows());
  if (eps == 0.0) return balance_lp(W, wc, wg).has_value();
  VecX d(dim);
  for (unsigned mask = 0; mask < (1u << dim); ++mask) {
    for (int i = 0; i < dim; ++i) d[i] = (mask >> i) & 1u ? eps : -eps;
    if (!balance_lp(W, wc + d, wg)) return false;
  }
  return true;
}

MaxEpsilon max_epsilon(const MatX& W, const VecX& wc, const VecX& wg, double tol) {
  if (!(tol > 0.0)) throw DomainError("robustness", "tolerance must be positive");
  MaxEpsilon out;
  if (!balance_lp(W, wc, wg)) return out;
  out.feasible = true;
  const double scale = std::max({1.0, wc.cwiseAbs().maxCoeff(), wg.cwiseAbs().maxCoeff()});
  double lo = 0.0, hi = tol;
  while (robust_exact(W, wc, wg, hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12 * scale) {
      out.epsilon = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (robust_exact(W, wc, wg, mid)) lo = mid;
    else hi = mid;
  }
  out.epsilon = lo;
  return out;
}

RobustnessReport robustness_report(const MatX& W, const VecX& wc, const VecX& wg, double eps, bool want_max,
                                   double tol) {
  RobustnessReport rep;
  rep.epsilon = eps;
  const auto bal = balance_lp(W, wc, wg);
  rep.nominal_feasible = bal.has_value();
  rep.margin = cone_margin(facet_normals(W), -wc - wg);
  if (!bal) {
    rep.diagnostic = "balance_infeasible";
    return rep;
  }
  rep.sufficient = robust_sufficient(W, bal->beta, eps, &rep.diagnostic);
  rep.exact = robust_exact(W, wc, wg, eps);
  if (want_max) {
    const MaxEpsilon me = max_epsilon(W, wc, wg, tol);
    rep.has_max_epsilon = true;
    rep.max_epsilon = me.epsilon;
  }
  return rep;
}

}  // namespace sslide
