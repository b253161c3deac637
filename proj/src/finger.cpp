#include <sslide/finger.hpp>

#include <cmath>

namespace sslide {

const char* to_string(ContactMode m) {
  switch (m) {
    case ContactMode::Separated: return "separated";
    case ContactMode::SticksInterior: return "sticks_interior";
    case ContactMode::OnConeBoundary: return "on_cone_boundary";
    case ContactMode::OutsideCone: return "outside_cone";
  }
  return "unknown";
}

StiffnessModel StiffnessModel::constant(const Mat2& k) {
  StiffnessModel m;
  m.kind_ = Kind::Constant;
  m.k_ = k;
  return m;
}

StiffnessModel StiffnessModel::variable(MatrixField k, VecX sigma, VecX sigma_rate) {
  if (!k) throw DomainError("finger", "variable stiffness needs a matrix field");
  StiffnessModel m;
  m.kind_ = Kind::Variable;
  m.field_ = std::move(k);
  m.set_sigma(sigma, sigma_rate);
  return m;
}

StiffnessModel StiffnessModel::two_link(const Vec2& torques, const Vec2& links, double elbow) {
  if (!(links.minCoeff() > 0.0)) throw DomainError("finger", "link lengths must be positive");
  StiffnessModel m;
  m.kind_ = Kind::TwoLink;
  m.torques_ = torques;
  m.links_ = links;
  m.elbow_ = elbow >= 0.0 ? 1.0 : -1.0;
  return m;
}

void StiffnessModel::set_sigma(const VecX& sigma, const VecX& sigma_rate) {
  if (sigma_rate.size() != 0 && sigma_rate.size() != sigma.size())
    throw DomainError("finger", "sigma and sigma_rate sizes differ");
  sigma_ = sigma;
  sigma_rate_ = sigma_rate.size() ? sigma_rate : VecX::Zero(sigma.size());
}

namespace {

Mat2 jacobian_2r(double t1, double t2, const Vec2& l) {
  const double s1 = std::sin(t1), c1 = std::cos(t1);
  const double s12 = std::sin(t1 + t2), c12 = std::cos(t1 + t2);
  Mat2 j;
  j << -l[0] * s1 - l[1] * s12, -l[1] * s12,
       l[0] * c1 + l[1] * c12, l[1] * c12;
  return j;
}

void check_invertible_2r(double t2, const Vec2& l) {
  if (std::abs(l[0] * l[1] * std::sin(t2)) < 1e-12 * l[0] * l[1])
    throw SingularityError("finger", "two-link Jacobian is singular (theta2 = 0 or pi)");
}

}  // namespace

Vec2 StiffnessModel::joint_angles(const Vec2& p_f, const Vec2& p_a) const {
  const Vec2 q = p_f - p_a;
  const double l1 = links_[0], l2 = links_[1];
  const double c2 = (q.squaredNorm() - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  if (c2 < -1.0 - 1e-12 || c2 > 1.0 + 1e-12)
    throw GeometryError("finger", "fingertip outside the two-link workspace");
  const double t2 = elbow_ * std::acos(std::clamp(c2, -1.0, 1.0));
  const double t1 = std::atan2(q.y(), q.x()) - std::atan2(l2 * std::sin(t2), l1 + l2 * std::cos(t2));
  return Vec2(t1, t2);
}

Vec2 StiffnessModel::force(const Vec2& p_f, const Vec2& p_a, const Vec2& d0) const {
  switch (kind_) {
    case Kind::Constant: return -k_ * (p_f - p_a - d0);
    case Kind::Variable: return -field_(p_f, sigma_) * (p_f - p_a - d0);
    case Kind::TwoLink: {
      const Vec2 th = joint_angles(p_f, p_a);
      check_invertible_2r(th[1], links_);
      return jacobian_2r(th[0], th[1], links_).transpose().partialPivLu().solve(torques_);
    }
  }
  return Vec2::Zero();
}

Mat2 StiffnessModel::stiffness(const Vec2& p_f, const Vec2& p_a) const {
  switch (kind_) {
    case Kind::Constant: return k_;
    case Kind::Variable: return field_(p_f, sigma_);
    case Kind::TwoLink: {
      const Vec2 th = joint_angles(p_f, p_a);
      return stiffness_2r(th[0], th[1], torques_, links_);
    }
  }
  return k_;
}

Mat2 StiffnessModel::tip_jacobian(const Vec2& p_f, const Vec2& p_a, const Vec2& d0) const {
  switch (kind_) {
    case Kind::Constant: return -k_;
    case Kind::TwoLink: return -stiffness(p_f, p_a);
    case Kind::Variable: {
      const Mat2 k = field_(p_f, sigma_);
      const Vec2 d = p_f - p_a - d0;
      Mat2 jac = -k;
      for (int j = 0; j < 2; ++j) {
        Vec2 e = Vec2::Zero();
        e[j] = kFdStep;
        const Mat2 dk = (field_(p_f + e, sigma_) - field_(p_f - e, sigma_)) / (2.0 * kFdStep);
        jac.col(j) -= dk * d;
      }
      return jac;
    }
  }
  return -k_;
}

Vec2 StiffnessModel::sigma_force_rate(const Vec2& p_f, const Vec2& p_a, const Vec2& d0) const {
  if (kind_ != Kind::Variable || sigma_.size() == 0 || sigma_rate_.isZero(0.0)) return Vec2::Zero();
  const VecX up = sigma_ + kFdStep * sigma_rate_;
  const VecX dn = sigma_ - kFdStep * sigma_rate_;
  const Mat2 dk = (field_(p_f, up) - field_(p_f, dn)) / (2.0 * kFdStep);
  return -dk * (p_f - p_a - d0);
}

std::string StiffnessModel::check(const Vec2& p_f, const Vec2& p_a) const {
  const Mat2 k = stiffness(p_f, p_a);
  const double scale = std::max(k.norm(), 1e-300);
  if ((k - k.transpose()).norm() > 1e-10 * scale) return "stiffness matrix is not symmetric";
  Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (k + k.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues()[0] <= 1e-12 * scale) return "stiffness matrix is not positive definite";
  return {};
}

Vec2 contact_force(const FingerState& finger) {
  return finger.stiffness.force(finger.tip, finger.anchor, finger.rest_offset);
}

Mat2 stiffness_2r(double theta1, double theta2, const Vec2& torques, const Vec2& links,
                  const Mat2& dtau_dtheta) {
  check_invertible_2r(theta2, links);
  const Mat2 j = jacobian_2r(theta1, theta2, links);
  const Mat2 jinv = j.inverse();
  const Mat2 jinv_t = jinv.transpose();
  const Vec2 f = jinv_t * torques;

  const double s1 = std::sin(theta1), c1 = std::cos(theta1);
  const double s12 = std::sin(theta1 + theta2), c12 = std::cos(theta1 + theta2);
  const double l1 = links[0], l2 = links[1];
  Mat2 dj1, dj2;
  dj1 << -l1 * c1 - l2 * c12, -l2 * c12,
         -l1 * s1 - l2 * s12, -l2 * s12;
  dj2 << -l2 * c12, -l2 * c12,
         -l2 * s12, -l2 * s12;

  Mat2 df_dtheta;
  df_dtheta.col(0) = -jinv_t * dj1.transpose() * f;
  df_dtheta.col(1) = -jinv_t * dj2.transpose() * f;
  df_dtheta += jinv_t * dtau_dtheta;
  return -df_dtheta * jinv;
}

Vec2 stiffness_2r_eigenvalues(double theta2) {
  const double s = std::sin(theta2);
  if (!(theta2 > 0.0 && theta2 < M_PI) || std::abs(s) < 1e-12)
    throw SingularityError("finger", "closed-form eigenvalues need theta2 in (0, pi)");
  const double c = std::cos(theta2);
  const double root = std::sqrt(std::max(0.0, 1.0 + std::cos(3.0 * theta2) + c + c * c));
  const double scale = 0.5 / (s * s * s);
  return Vec2(scale * (1.0 + c - root), scale * (1.0 + c + root));
}

}  // namespace sslide
