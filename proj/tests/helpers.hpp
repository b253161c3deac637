#pragma once

#include <sslide/io.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace testing {

using namespace sslide;

inline std::string task_path(const std::string& name) { return std::string(SSLIDE_TASK_DIR) + "/" + name; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec2 unit(std::mt19937_64& rng) {
  const double a = uniform(rng, -M_PI, M_PI);
  return Vec2(std::cos(a), std::sin(a));
}

// Random symmetric positive definite 2x2 with eigenvalues in [lo, hi].
inline Mat2 random_spd(std::mt19937_64& rng, double lo = 10.0, double hi = 500.0) {
  const Mat2 r = rot2(uniform(rng, -M_PI, M_PI));
  const Vec2 e(uniform(rng, lo, hi), uniform(rng, lo, hi));
  return r * e.asDiagonal() * r.transpose();
}

// Contact force with normal magnitude fn on the edge `side` of the cone around n.
inline Vec2 edge_force(const Vec2& n, double mu, double fn, int side) { return fn * (n + side * mu * perp(n)); }

// Axis-aligned or rotated square whose face through `tip` has inward normal n.
inline Boundary square_through(const Vec2& tip, const Vec2& n, double h) {
  const Vec2 d = -perp(n);
  const Vec2 a = tip - h * d, b = tip + h * d, c = b + 2.0 * h * n, e = a + 2.0 * h * n;
  return Boundary({BoundaryPiece::segment(a, b), BoundaryPiece::segment(b, c), BoundaryPiece::segment(c, e),
                   BoundaryPiece::segment(e, a)});
}

inline Vec2 fk_2r(double th1, double th2, const Vec2& links) {
  return Vec2(links[0] * std::cos(th1) + links[1] * std::cos(th1 + th2),
              links[0] * std::sin(th1) + links[1] * std::sin(th1 + th2));
}

// Two-link finger at (0, theta2) pressing on a flat face with its force on the cone edge.
struct RunawayCase {
  TaskModel task;
  FingerSetup finger;
  Vec2 anchor = Vec2::Zero();
  Vec2 anchor_velocity = Vec2::Zero();
};

inline RunawayCase runaway_case(double theta2, double mu = 1.0) {
  RunawayCase c;
  const Vec2 links = Vec2::Ones(), tau = Vec2::Ones();
  c.finger.stiffness = StiffnessModel::two_link(tau, links, 1.0);
  const Vec2 tip = fk_2r(0.0, theta2, links);
  const Vec2 f = c.finger.stiffness.force(tip, c.anchor, Vec2::Zero());
  const Vec2 n = rot2(-std::atan(mu)) * f.normalized();
  c.task.boundary = square_through(tip, n, 0.5);
  c.task.mu = mu;
  c.task.env_contacts.push_back(EnvContact{});
  c.finger.s0 = c.task.boundary.project(tip);
  // Push the force out of the cone.
  const Vec2 ft = f - f.dot(n) * n;
  const Vec2 grad = ft.normalized() - mu * n;
  const Mat2 K = c.finger.stiffness.stiffness(tip, c.anchor);
  c.anchor_velocity = 1e-3 * K.inverse() * grad;
  return c;
}

struct RandomContact {
  SlidingInputs<2> in;
  Vec2 anchor_velocity;
};

// Random sliding contact on a flat (curvature 0) or curved face of a possibly rotating object.
inline RandomContact random_contact(std::mt19937_64& rng, bool curved, bool moving) {
  RandomContact rc;
  const double mu = uniform(rng, 0.1, 1.2);
  const double angle = uniform(rng, -M_PI, M_PI);
  const Vec2 nb = unit(rng);  // body-frame normal
  const Mat2 R = rot2(angle);
  const Vec2 n = R * nb;
  const int side = rng() % 2 ? 1 : -1;
  rc.in.cf = decompose<2>(edge_force(n, mu, uniform(rng, 0.5, 20.0), side), n);
  rc.in.mu = mu;
  rc.in.rotation = R;
  if (curved) {
    const Vec2 tb = perp(nb);
    const double kappa = uniform(rng, -20.0, 20.0);
    rc.in.normal_jac = -kappa * tb * tb.transpose();
  }
  if (moving) {
    const double w = uniform(rng, -1, 1);
    rc.in.drift = Vec2(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
    rc.in.normal_drift = w * perp(n);
  }
  rc.in.stiffness = random_spd(rng);
  rc.in.tip_jacobian = -rc.in.stiffness;
  rc.anchor_velocity = Vec2(uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05));
  return rc;
}

// Cone-rate residual from first principles, given the tip and force rates.
inline double cone_rate_residual(const SlidingInputs<2>& in, const Vec2& tip_velocity, const Vec2& fdot) {
  const Vec2 f = in.cf.f_c, n = in.cf.normal;
  const Vec2 slip = tip_velocity - in.drift;
  const Vec2 ndot = in.rotation * in.normal_jac * in.rotation.transpose() * slip + in.normal_drift;
  const Vec2 fN_dot = (fdot.dot(n) + f.dot(ndot)) * n + f.dot(n) * ndot;
  const Vec2 ft_dot = fdot - fN_dot;
  const double scale = f.squaredNorm() * in.stiffness.norm() * std::max(1.0, tip_velocity.norm());
  return std::abs(in.cf.f_t.dot(ft_dot) - in.mu * in.mu * in.cf.f_N.dot(fN_dot)) / scale;
}


struct Instance {
  MatX W;
  VecX beta0, wc, wg;
};

// Pointed planar cone with p columns and a balanced fingertip wrench built from beta0 >= 0.
inline Instance random_instance(std::mt19937_64& rng, int p) {
  Instance in;
  in.W.resize(3, p);
  for (int j = 0; j < p; ++j) in.W.col(j) = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, 0.3, 1.0));
  in.beta0.resize(p);
  for (int j = 0; j < p; ++j) in.beta0[j] = uniform(rng, 0.0, 3.0);
  in.wg = Vec3(0.0, 0.0, -uniform(rng, 0.5, 2.0));
  in.wc = -in.W * in.beta0 - in.wg;
  return in;
}

// Largest disturbance bound from the facet description.
inline double facet_epsilon(const MatX& W, const VecX& we) {
  const MatX N = facet_normals(W);
  double e = std::numeric_limits<double>::infinity();
  for (int r = 0; r < N.rows(); ++r) e = std::min(e, N.row(r).dot(we) / N.row(r).lpNorm<1>());
  return e;
}

}  // namespace testing
