#pragma once

#include <sslide/common.hpp>

#include <functional>
#include <string>

namespace sslide {

enum class ContactMode { Separated, SticksInterior, OnConeBoundary, OutsideCone };

const char* to_string(ContactMode m);

// Finger spring model.  Every variant is described by the force it produces
// at fingertip p_f with anchor p_a, together with the two force Jacobians
// K = df/dp_a and df/dp_f.  For a linear spring f = -K (p_f - p_a - d0) the
// second Jacobian is -K - (dK/dp_f) d.
class StiffnessModel {
 public:
  enum class Kind { Constant, Variable, TwoLink };
  using MatrixField = std::function<Mat2(const Vec2& p_f, const VecX& sigma)>;

  StiffnessModel() = default;
  static StiffnessModel constant(const Mat2& k);
  static StiffnessModel variable(MatrixField k, VecX sigma = VecX(), VecX sigma_rate = VecX());
  static StiffnessModel two_link(const Vec2& torques, const Vec2& links, double elbow = 1.0);

  Kind kind() const { return kind_; }
  const Mat2& matrix() const { return k_; }
  const Vec2& torques() const { return torques_; }
  const Vec2& links() const { return links_; }
  double elbow() const { return elbow_; }
  const VecX& sigma() const { return sigma_; }
  const VecX& sigma_rate() const { return sigma_rate_; }
  void set_sigma(const VecX& sigma, const VecX& sigma_rate);

  Vec2 force(const Vec2& p_f, const Vec2& p_a, const Vec2& d0) const;
  Mat2 stiffness(const Vec2& p_f, const Vec2& p_a) const;
  Mat2 tip_jacobian(const Vec2& p_f, const Vec2& p_a, const Vec2& d0) const;
  Vec2 sigma_force_rate(const Vec2& p_f, const Vec2& p_a, const Vec2& d0) const;

  // Joint angles of the two-link finger reaching p_f from its base p_a.
  Vec2 joint_angles(const Vec2& p_f, const Vec2& p_a) const;

  // Empty when K is symmetric positive definite at (p_f, p_a); otherwise a warning.
  std::string check(const Vec2& p_f, const Vec2& p_a) const;

  static constexpr double kFdStep = 1e-6;

 private:
  Kind kind_ = Kind::Constant;
  Mat2 k_ = Mat2::Identity();
  MatrixField field_;
  VecX sigma_, sigma_rate_;
  Vec2 torques_ = Vec2::Ones();
  Vec2 links_ = Vec2::Ones();
  double elbow_ = 1.0;
};

struct FingerState {
  Vec2 anchor = Vec2::Zero();
  Vec2 tip = Vec2::Zero();  // world frame
  Vec2 rest_offset = Vec2::Zero();
  StiffnessModel stiffness;
  double s = 0.0;  // boundary parameter of the contact

  Vec2 compression() const { return tip - rest_offset - anchor; }
};

template <int Dim>
struct ContactForceT {
  Vec<Dim> f_c = Vec<Dim>::Zero();
  Vec<Dim> f_N = Vec<Dim>::Zero();
  Vec<Dim> f_t = Vec<Dim>::Zero();
  Vec<Dim> normal = Vec<Dim>::Zero();

  double normal_magnitude() const { return f_c.dot(normal); }
};
using ContactForce = ContactForceT<2>;

Vec2 contact_force(const FingerState& finger);

template <int Dim>
ContactForceT<Dim> decompose(const Vec<Dim>& f_c, const Vec<Dim>& n) {
  if (std::abs(n.norm() - 1.0) > 1e-9) throw DomainError("finger", "decompose requires a unit normal");
  ContactForceT<Dim> cf;
  cf.f_c = f_c;
  cf.normal = n;
  cf.f_N = f_c.dot(n) * n;
  cf.f_t = f_c - cf.f_N;
  return cf;
}

template <int Dim>
ContactMode contact_mode(const ContactForceT<Dim>& cf, double mu, double tol = 1e-6) {
  if (!(tol > 0.0)) throw DomainError("finger", "contact_mode tolerance must be positive");
  if (cf.f_c.dot(cf.normal) <= 0.0) return ContactMode::Separated;
  const double ft = cf.f_t.norm();
  const double limit = mu * cf.f_N.norm();
  if (ft < limit * (1.0 - tol)) return ContactMode::SticksInterior;
  if (std::abs(ft - limit) <= tol * limit) return ContactMode::OnConeBoundary;
  return ContactMode::OutsideCone;
}

// Two-link torque-controlled finger stiffness at joint angles theta.
Mat2 stiffness_2r(double theta1, double theta2, const Vec2& torques, const Vec2& links,
                  const Mat2& dtau_dtheta = Mat2::Zero());

// Closed-form eigenvalues for unit links and unit torques, ascending.
Vec2 stiffness_2r_eigenvalues(double theta2);

}  // namespace sslide
