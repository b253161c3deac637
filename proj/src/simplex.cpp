#include <sslide/simplex.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace sslide {

namespace {

struct Tableau {
  MatX t;  // rows 0..m-1 constraints, row m reduced costs; last column rhs
  std::vector<int> basis;
  int m = 0;
  int n = 0;  // structural + artificial columns

  double& rhs(int i) { return t(i, n); }
  double& cost(int j) { return t(m, j); }

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i <= m; ++i) {
      if (i == row) continue;
      const double f = t(i, col);
      if (f != 0.0) t.row(i) -= f * t.row(row);
    }
    basis[row] = col;
  }
};

// Runs Bland-rule iterations over columns [0, allowed).  Returns false when unbounded.
bool iterate(Tableau& tab, int allowed, double eps, int max_iterations, int& iterations) {
  for (;;) {
    int enter = -1;
    for (int j = 0; j < allowed; ++j) {
      if (tab.cost(j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tab.m; ++i) {
      const double a = tab.t(i, enter);
      if (a > eps) {
        const double ratio = tab.rhs(i) / a;
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && tab.basis[i] < tab.basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;
    tab.pivot(leave, enter);
    if (++iterations > max_iterations) throw SolverError("wrench", "simplex iteration cap reached");
  }
}

}  // namespace

LpResult solve_lp(const MatX& A, const VecX& b, const VecX& c, int max_iterations) {
  const int m = static_cast<int>(A.rows());
  const int nv = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != nv) throw DomainError("wrench", "LP dimensions are inconsistent");

  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double eps = 1e-11 * scale;
  const double feas_tol = 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff());

  Tableau tab;
  tab.m = m;
  tab.n = nv + m;
  tab.t = MatX::Zero(m + 1, tab.n + 1);
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    const double sgn = b[i] < 0.0 ? -1.0 : 1.0;
    tab.t.row(i).head(nv) = sgn * A.row(i);
    tab.t(i, nv + i) = 1.0;
    tab.rhs(i) = sgn * b[i];
    tab.basis[i] = nv + i;
  }
  // Phase 1: minimize the sum of artificials.
  for (int i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
  for (int i = 0; i < m; ++i) tab.cost(nv + i) = 0.0;

  LpResult res;
  iterate(tab, tab.n, eps, max_iterations, res.iterations);
  if (-tab.rhs(m) > feas_tol) {
    res.status = LpResult::Status::Infeasible;
    return res;
  }

  // Drive remaining artificials out of the basis; rows with no structural
  // pivot are redundant and are left with their artificial at zero.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < nv) continue;
    for (int j = 0; j < nv; ++j) {
      if (std::abs(tab.t(i, j)) > 1e3 * eps) {
        tab.pivot(i, j);
        break;
      }
    }
  }

  // Phase 2 on structural columns only.
  tab.t.row(m).setZero();
  tab.t.row(m).head(nv) = c.transpose();
  for (int i = 0; i < m; ++i) {
    const int bi = tab.basis[i];
    if (bi < nv && c[bi] != 0.0) tab.t.row(m) -= c[bi] * tab.t.row(i);
  }
  if (!iterate(tab, nv, eps, max_iterations, res.iterations)) {
    res.status = LpResult::Status::Unbounded;
    return res;
  }

  // Recompute basic values from the original data to limit drift.
  std::vector<int> cols;
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < nv) cols.push_back(tab.basis[i]);
  res.x = VecX::Zero(nv);
  if (!cols.empty()) {
    MatX B(m, static_cast<int>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) B.col(static_cast<int>(k)) = A.col(cols[k]);
    const VecX xb = B.colPivHouseholderQr().solve(b);
    for (std::size_t k = 0; k < cols.size(); ++k) res.x[cols[k]] = std::max(0.0, xb[static_cast<int>(k)]);
  }
  if ((A * res.x - b).cwiseAbs().maxCoeff() > 1e3 * feas_tol) {
    // Polishing failed (should not happen); fall back to tableau values.
    res.x.setZero();
    for (int i = 0; i < m; ++i)
      if (tab.basis[i] < nv) res.x[tab.basis[i]] = std::max(0.0, tab.rhs(i));
  }
  res.objective = c.dot(res.x);
  res.status = LpResult::Status::Optimal;
  return res;
}

}  // namespace sslide
