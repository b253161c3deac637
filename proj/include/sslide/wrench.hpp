#pragma once

#include <sslide/model.hpp>

#include <optional>
#include <vector>

namespace sslide {

using Vec6 = Eigen::Matrix<double, 6, 1>;

struct WrenchColumn {
  int contact = 0;
  int edge = 0;
  bool sliding = false;
};

struct WrenchCone {
  MatX W;  // dim x p
  std::vector<WrenchColumn> columns;
  int dim = 3;
};

struct BalanceSolution {
  VecX beta;
  VecX external_wrench;
  double objective = 0.0;
};

// [(p x f) / L_c ; f]
Vec3 contact_wrench(const Vec2& p, const Vec2& f, double L_c);
Vec6 contact_wrench(const Vec3& p, const Vec3& f, double L_c);

// Gravity wrench of the task with its moment scaled by L_c.
Vec3 scaled_gravity(const TaskModel& task);

WrenchCone build_external_cone(const TaskModel& task, const ObjectPose& pose);

struct SpatialContact {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  bool sliding = false;
  Vec3 sliding_direction = Vec3::Zero();
};

// Polyhedral spatial cone with n_c edges per sticking contact.
WrenchCone build_spatial_cone(const std::vector<SpatialContact>& contacts, double mu_e, int n_c, double L_c);

// min 1'beta  s.t.  W beta = -wc - wg,  beta >= 0.
std::optional<BalanceSolution> balance_lp(const MatX& W, const VecX& wc, const VecX& wg);

// Unit inward normals of the cone's facets, one per row.  Lower-dimensional
// cones also receive both signs of every direction orthogonal to their span.
// A cone equal to the whole space has no rows.
MatX facet_normals(const MatX& W);

// min over facet normals of n . w_e (+inf when there are no facets).
double cone_margin(const MatX& normals, const VecX& w_e);

}  // namespace sslide
