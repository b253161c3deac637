#include <sslide/simplex.hpp>
#include <sslide/wrench.hpp>

#include <cmath>
#include <limits>

namespace sslide {

Vec3 contact_wrench(const Vec2& p, const Vec2& f, double L_c) {
  if (!(L_c > 0.0)) throw DomainError("wrench", "characteristic length must be positive");
  return Vec3(cross2(p, f) / L_c, f.x(), f.y());
}

Vec6 contact_wrench(const Vec3& p, const Vec3& f, double L_c) {
  if (!(L_c > 0.0)) throw DomainError("wrench", "characteristic length must be positive");
  Vec6 w;
  w << p.cross(f) / L_c, f;
  return w;
}

Vec3 scaled_gravity(const TaskModel& task) {
  Vec3 g = task.gravity_wrench;
  g[0] /= task.characteristic_length;
  return g;
}

WrenchCone build_external_cone(const TaskModel& task, const ObjectPose& pose) {
  if (task.env_contacts.empty()) throw DomainError("wrench", "no environmental contacts");
  const Mat2 r = pose.rotation();
  const double norm = std::sqrt(1.0 + task.mu_e * task.mu_e);
  std::vector<Vec3> cols;
  WrenchCone cone;
  cone.dim = 3;
  for (std::size_t j = 0; j < task.env_contacts.size(); ++j) {
    const auto& ec = task.env_contacts[j];
    const Vec2 p = pose.to_world(ec.position);
    const Vec2 n = (r * ec.normal).normalized();
    if (ec.sliding) {
      Vec2 s = r * ec.sliding_direction;
      s -= s.dot(n) * n;
      if (s.norm() == 0.0) throw DomainError("wrench", "sliding direction is parallel to the contact normal");
      const Vec2 f = (n - task.mu_e * s.normalized()).normalized();
      cols.push_back(contact_wrench(p, f, task.characteristic_length));
      cone.columns.push_back({static_cast<int>(j), 0, true});
    } else {
      const Vec2 t = perp(n);
      for (int k = 0; k < 2; ++k) {
        const double sgn = k == 0 ? 1.0 : -1.0;
        const Vec2 f = (n + sgn * task.mu_e * t) / norm;
        cols.push_back(contact_wrench(p, f, task.characteristic_length));
        cone.columns.push_back({static_cast<int>(j), k, false});
      }
    }
  }
  cone.W.resize(3, static_cast<int>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) cone.W.col(static_cast<int>(k)) = cols[k];
  return cone;
}

WrenchCone build_spatial_cone(const std::vector<SpatialContact>& contacts, double mu_e, int n_c, double L_c) {
  if (contacts.empty()) throw DomainError("wrench", "no environmental contacts");
  if (n_c < 3) throw DomainError("wrench", "spatial cones need at least 3 edges");
  WrenchCone cone;
  cone.dim = 6;
  std::vector<Vec6> cols;
  for (std::size_t j = 0; j < contacts.size(); ++j) {
    const auto& c = contacts[j];
    const Vec3 n = c.normal.normalized();
    if (c.sliding) {
      Vec3 s = c.sliding_direction - c.sliding_direction.dot(n) * n;
      if (s.norm() == 0.0) throw DomainError("wrench", "sliding direction is parallel to the contact normal");
      cols.push_back(contact_wrench(c.position, Vec3((n - mu_e * s.normalized()).normalized()), L_c));
      cone.columns.push_back({static_cast<int>(j), 0, true});
      continue;
    }
    const Vec3 u = n.unitOrthogonal();
    const Vec3 v = n.cross(u);
    for (int k = 0; k < n_c; ++k) {
      const double a = 2.0 * M_PI * k / n_c;
      const Vec3 f = (n + mu_e * (std::cos(a) * u + std::sin(a) * v)).normalized();
      cols.push_back(contact_wrench(c.position, f, L_c));
      cone.columns.push_back({static_cast<int>(j), k, false});
    }
  }
  cone.W.resize(6, static_cast<int>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) cone.W.col(static_cast<int>(k)) = cols[k];
  return cone;
}

std::optional<BalanceSolution> balance_lp(const MatX& W, const VecX& wc, const VecX& wg) {
  if (wc.size() != W.rows() || wg.size() != W.rows())
    throw DomainError("wrench", "wrench dimensions do not match the cone");
  const VecX rhs = -wc - wg;
  const LpResult lp = solve_lp(W, rhs, VecX::Ones(W.cols()));
  if (lp.status != LpResult::Status::Optimal) return std::nullopt;
  BalanceSolution sol;
  sol.beta = lp.x;
  sol.external_wrench = W * lp.x;
  sol.objective = lp.objective;
  return sol;
}

namespace {

void add_unique(std::vector<VecX>& out, const VecX& n) {
  for (const auto& m : out)
    if ((m - n).norm() < 1e-9) return;
  out.push_back(n);
}

void combinations(int p, int k, int start, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& f) {
  if (static_cast<int>(cur.size()) == k) {
    f(cur);
    return;
  }
  for (int i = start; i < p; ++i) {
    cur.push_back(i);
    combinations(p, k, i + 1, cur, f);
    cur.pop_back();
  }
}

}  // namespace

MatX facet_normals(const MatX& W) {
  const int dim = static_cast<int>(W.rows());
  const int p = static_cast<int>(W.cols());
  std::vector<VecX> normals;

  Eigen::JacobiSVD<MatX> svd(W, Eigen::ComputeFullU);
  const VecX sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * std::max(smax, 1e-300)) ++r;
  const MatX U = svd.matrixU();
  const MatX Ur = U.leftCols(r);

  // Directions orthogonal to the span.
  for (int i = r; i < dim; ++i) {
    add_unique(normals, U.col(i));
    add_unique(normals, -U.col(i));
  }

  if (r >= 1) {
    MatX C = Ur.transpose() * W;  // r x p coordinates
    std::vector<int> live;
    for (int k = 0; k < p; ++k) {
      const double nk = C.col(k).norm();
      if (nk > 1e-12 * smax) {
        C.col(k) /= nk;
        live.push_back(k);
      }
    }
    const double tol = 1e-10;
    auto consider = [&](const VecX& cand) {
      bool all_pos = true, all_neg = true;
      for (int k : live) {
        const double v = C.col(k).dot(cand);
        if (v < -tol) all_pos = false;
        if (v > tol) all_neg = false;
      }
      if (all_pos) add_unique(normals, Ur * cand);
      else if (all_neg) add_unique(normals, -(Ur * cand));
    };
    if (r == 1) {
      consider(VecX::Ones(1));
    } else {
      std::vector<int> cur;
      const int n_live = static_cast<int>(live.size());
      combinations(n_live, r - 1, 0, cur, [&](const std::vector<int>& idx) {
        MatX M(r - 1, r);
        for (int i = 0; i < r - 1; ++i) M.row(i) = C.col(live[idx[i]]).transpose();
        Eigen::JacobiSVD<MatX> s(M, Eigen::ComputeFullV);
        const VecX msv = s.singularValues();
        if (msv[r - 2] < 1e-9) return;
        consider(s.matrixV().col(r - 1));
      });
    }
  }

  MatX out(static_cast<int>(normals.size()), dim);
  for (std::size_t i = 0; i < normals.size(); ++i) out.row(static_cast<int>(i)) = normals[i].normalized().transpose();
  return out;
}

double cone_margin(const MatX& normals, const VecX& w_e) {
  if (normals.rows() == 0) return std::numeric_limits<double>::infinity();
  return (normals * w_e).minCoeff();
}

}  // namespace sslide
