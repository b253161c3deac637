#pragma once

#include <sslide/finger.hpp>
#include <sslide/model.hpp>

#include <variant>

namespace sslide {

// Local description of one sliding contact.  All vectors are in the world
// frame except normal_jac, which acts on body-frame displacements.
template <int Dim>
struct SlidingInputs {
  ContactForceT<Dim> cf;
  Mat<Dim> rotation = Mat<Dim>::Identity();
  Mat<Dim> normal_jac = Mat<Dim>::Zero();
  Vec<Dim> drift = Vec<Dim>::Zero();         // c_f
  Vec<Dim> normal_drift = Vec<Dim>::Zero();  // normal rate from object rotation
  Mat<Dim> stiffness = Mat<Dim>::Identity(); // df/dp_a
  Mat<Dim> tip_jacobian = -Mat<Dim>::Identity();
  Vec<Dim> sigma_rate = Vec<Dim>::Zero();    // (df/dsigma) sigma_dot
  double mu = 0.0;
};

template <int Dim>
struct SlidingCoefficientsT {
  ContactForceT<Dim> cf;
  double mu = 0.0;
  Mat<Dim> K = Mat<Dim>::Zero();
  Vec<Dim> c_f, g_n, c_n, g_c, c_c, h, g_N, c_N, g_t, c_t, a;
  Vec<Dim> anchor_velocity;
  double lambda_den = 0.0;
  Vec<Dim> g_lambda;  // row vector stored as a column
  double c_lambda = 0.0;
};
using SlidingCoefficients = SlidingCoefficientsT<2>;

template <int Dim>
struct SlidingSolutionT {
  double lambda = 0.0;
  Vec<Dim> tip_velocity;
  Vec<Dim> force_rate;
};
using SlidingSolution = SlidingSolutionT<2>;

struct RevertsToSticking {
  double lambda = 0.0;
};

template <int Dim>
using ForwardResultT = std::variant<SlidingSolutionT<Dim>, RevertsToSticking>;
using ForwardResult = ForwardResultT<2>;

template <int Dim>
struct InverseSolutionT {
  Vec<Dim> particular;
  Eigen::Matrix<double, Dim, Dim - 1> nullspace;
};
using InverseSolution = InverseSolutionT<2>;

struct DegeneracyTolerances {
  double type1 = 1e-9;
  double type2 = 1e-9;
};

namespace detail {

template <int Dim>
Vec<Dim> normal_part(const Vec<Dim>& v, const Vec<Dim>& n) {
  return v.dot(n) * n;
}

template <int Dim>
double type2_threshold(const SlidingCoefficientsT<Dim>& c, double tol) {
  return tol * c.cf.f_c.squaredNorm() * c.K.norm();
}

}  // namespace detail

template <int Dim>
SlidingCoefficientsT<Dim> compute_coefficients(const SlidingInputs<Dim>& in, const Vec<Dim>& anchor_velocity) {
  const auto& cf = in.cf;
  const Vec<Dim>& n = cf.normal;
  if (!(cf.f_c.dot(n) > 0.0)) throw DomainError("sliding", "coefficients need a positive normal force");

  SlidingCoefficientsT<Dim> c;
  c.cf = cf;
  c.mu = in.mu;
  c.K = in.stiffness;
  c.anchor_velocity = anchor_velocity;
  c.c_f = in.drift;
  c.g_n = in.rotation * in.normal_jac * in.rotation.transpose() * cf.f_t;
  c.c_n = in.normal_drift;
  c.g_c = in.tip_jacobian * cf.f_t;
  c.h = -in.tip_jacobian * in.drift - in.sigma_rate;
  c.c_c = in.stiffness * anchor_velocity - c.h;

  const double fn = cf.f_c.dot(n);
  c.g_N = detail::normal_part<Dim>(c.g_c, n) + cf.f_c.dot(c.g_n) * n + fn * c.g_n;
  const Vec<Dim> q = cf.f_c.dot(c.c_n) * n + fn * c.c_n;
  c.c_N = detail::normal_part<Dim>(c.c_c, n) + q;
  c.g_t = c.g_c - c.g_N;
  c.c_t = c.c_c - c.c_N;

  const double mu2 = in.mu * in.mu;
  c.a = mu2 * cf.f_N - cf.f_t;
  c.lambda_den = cf.f_t.dot(c.g_t) - mu2 * cf.f_N.dot(c.g_N);
  c.g_lambda = in.stiffness.transpose() * c.a / c.lambda_den;
  c.c_lambda = (c.a.dot(c.h) - (mu2 * cf.f_N + cf.f_t).dot(q)) / c.lambda_den;
  return c;
}

template <int Dim>
Degeneracy check_degeneracy(const SlidingCoefficientsT<Dim>& c, const DegeneracyTolerances& tol = {}) {
  const double knorm = c.K.norm();
  if ((c.K.transpose() * c.a).norm() <= tol.type1 * knorm * c.a.norm() || c.a.isZero(0.0))
    return Degeneracy::TypeI;
  // Zero or sign-reversed denominators both leave the sliding rate unbounded.
  if (c.lambda_den >= -detail::type2_threshold(c, tol.type2)) return Degeneracy::TypeII;
  return Degeneracy::None;
}

template <int Dim>
ForwardResultT<Dim> forward_sliding(const SlidingCoefficientsT<Dim>& c, const Vec<Dim>& anchor_velocity,
                                    const DegeneracyTolerances& tol = {}) {
  if (std::abs(c.lambda_den) < detail::type2_threshold(c, tol.type2))
    throw DegeneracyError("sliding", Degeneracy::TypeII,
                          "lambda denominator vanishes; fingertip velocity becomes unbounded");
  const double lambda = c.g_lambda.dot(anchor_velocity) - c.c_lambda;
  if (lambda <= 0.0) return RevertsToSticking{lambda};
  SlidingSolutionT<Dim> sol;
  sol.lambda = lambda;
  sol.tip_velocity = c.c_f + lambda * c.cf.f_t;
  sol.force_rate = lambda * c.g_c + c.K * anchor_velocity - c.h;
  return sol;
}

template <int Dim>
InverseSolutionT<Dim> inverse_sliding(const SlidingCoefficientsT<Dim>& c, double lambda_star,
                                      const DegeneracyTolerances& tol = {}) {
  if (!(lambda_star >= 0.0)) throw DomainError("sliding", "desired lambda must be nonnegative");
  if (check_degeneracy(c, tol) == Degeneracy::TypeI)
    throw DegeneracyError("sliding", Degeneracy::TypeI, "anchor velocity has no effect on sliding");
  const double g2 = c.g_lambda.squaredNorm();
  InverseSolutionT<Dim> out;
  out.particular = c.g_lambda * ((lambda_star + c.c_lambda) / g2);

  // Gram-Schmidt of the coordinate axes against g_lambda.
  const Vec<Dim> g = c.g_lambda / std::sqrt(g2);
  std::vector<Vec<Dim>> basis{g};
  for (int i = 0; i < Dim && static_cast<int>(basis.size()) < Dim; ++i) {
    Vec<Dim> v = Vec<Dim>::Unit(i);
    for (const auto& b : basis) v -= v.dot(b) * b;
    if (v.norm() > 1e-8) basis.push_back(v.normalized());
  }
  for (int k = 1; k < Dim; ++k) out.nullspace.col(k - 1) = basis[k];
  return out;
}

// Planar contact point velocity while sticking.
Vec2 sticking_velocity(const ObjectPose& pose, const Vec2& p_body);

SlidingInputs<2> sliding_inputs(const TaskModel& task, const ObjectPose& pose, const FingerState& finger,
                                const ContactForce& cf);

SlidingCoefficients coefficients(const TaskModel& task, const ObjectPose& pose, const FingerState& finger,
                                 const ContactForce& cf, const Vec2& anchor_velocity);

}  // namespace sslide
