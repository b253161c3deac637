#include "helpers.hpp"

#include <doctest.h>

using namespace sslide;
using namespace testing;

TEST_CASE("sliding keeps the force on the cone edge") {
  std::mt19937_64 rng(11);
  int solved = 0;
  for (int k = 0; k < 4000; ++k) {
    const RandomContact rc = random_contact(rng, k % 2 == 1, k % 4 >= 2);
    const SlidingCoefficients c = compute_coefficients<2>(rc.in, rc.anchor_velocity);
    if (std::abs(c.lambda_den) < 1e-6 * c.cf.f_c.squaredNorm() * c.K.norm()) continue;
    const ForwardResult r = forward_sliding(c, rc.anchor_velocity);
    if (const auto* s = std::get_if<SlidingSolution>(&r)) {
      ++solved;
      CHECK(s->lambda > 0.0);
      // Force follows the anchor and the moving tip.
      const Vec2 fdot = c.K * rc.anchor_velocity + rc.in.tip_jacobian * s->tip_velocity;
      CHECK((s->force_rate - fdot).norm() < 1e-9 * std::max(1.0, fdot.norm()));
      CHECK(cone_rate_residual(rc.in, s->tip_velocity, s->force_rate) < 1e-8);
    }
  }
  CHECK(solved > 1000);
}

TEST_CASE("negative sliding rate reverts to sticking") {
  std::mt19937_64 rng(12);
  int reverted = 0;
  for (int k = 0; k < 500; ++k) {
    const RandomContact rc = random_contact(rng, false, false);
    const SlidingCoefficients c = compute_coefficients<2>(rc.in, rc.anchor_velocity);
    if (check_degeneracy(c) != Degeneracy::None) continue;
    const double lambda = c.g_lambda.dot(rc.anchor_velocity) - c.c_lambda;
    const ForwardResult r = forward_sliding(c, rc.anchor_velocity);
    CHECK(std::holds_alternative<RevertsToSticking>(r) == (lambda <= 0.0));
    reverted += lambda <= 0.0;
  }
  CHECK(reverted > 0);
}

TEST_CASE("constant stiffness on a flat face: denominator closed form") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 1000; ++k) {
    RandomContact rc = random_contact(rng, false, false);
    const SlidingCoefficients c = compute_coefficients<2>(rc.in, rc.anchor_velocity);
    const double oracle = c.cf.f_t.dot(c.K * c.a);
    CHECK(std::abs(c.lambda_den - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("face-aligned diagonal stiffness never degenerates") {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 1000; ++k) {
    RandomContact rc = random_contact(rng, false, false);
    const Vec2 n = rc.in.cf.normal, t = perp(n);
    const double kn = uniform(rng, 10, 500), kt = uniform(rng, 10, 500);
    rc.in.stiffness = kn * n * n.transpose() + kt * t * t.transpose();
    rc.in.tip_jacobian = -rc.in.stiffness;
    const SlidingCoefficients c = compute_coefficients<2>(rc.in, rc.anchor_velocity);
    CHECK(check_degeneracy(c) == Degeneracy::None);
  }
}

TEST_CASE("anisotropic constant stiffness can make the denominator vanish or change sign") {
  SlidingInputs<2> in;
  in.mu = 0.5;
  in.cf = decompose<2>(Vec2(1.0, 2.0), Vec2(0.0, 1.0));
  in.stiffness << 1, 2, 2, 5;
  in.tip_jacobian = -in.stiffness;
  SlidingCoefficients c = compute_coefficients<2>(in, Vec2(0.1, 0.0));
  CHECK(c.lambda_den == doctest::Approx(0.0));
  CHECK(check_degeneracy(c) == Degeneracy::TypeII);
  CHECK_THROWS_AS(forward_sliding(c, Vec2(0.1, 0.0)), DegeneracyError);
  in.stiffness << 1, 3, 3, 10;
  in.tip_jacobian = -in.stiffness;
  c = compute_coefficients<2>(in, Vec2(0.1, 0.0));
  CHECK(c.lambda_den == doctest::Approx(0.5));
  CHECK(check_degeneracy(c) == Degeneracy::TypeII);
}

TEST_CASE("type I degeneracy when the stiffness cannot change the cone rate") {
  SlidingInputs<2> in;
  in.mu = 0.5;
  in.cf = decompose<2>(Vec2(1.0, 2.0), Vec2(0.0, 1.0));
  const Vec2 a = in.mu * in.mu * in.cf.f_N - in.cf.f_t;
  const Vec2 v = perp(a).normalized();
  in.stiffness = 100.0 * v * v.transpose();
  in.tip_jacobian = -in.stiffness;
  const SlidingCoefficients c = compute_coefficients<2>(in, Vec2::Zero());
  CHECK(check_degeneracy(c) == Degeneracy::TypeI);
  CHECK_THROWS_AS(inverse_sliding(c, 1.0), DegeneracyError);
}

TEST_CASE("inverse sliding round trip and nullspace") {
  std::mt19937_64 rng(15);
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const RandomContact rc = random_contact(rng, k % 2 == 1, k % 3 == 0);
    const SlidingCoefficients c = compute_coefficients<2>(rc.in, Vec2::Zero());
    if (check_degeneracy(c) != Degeneracy::None) continue;
    for (double target : {0.1, 1.0, 5.0}) {
      const InverseSolution inv = inverse_sliding(c, target);
      const auto r = forward_sliding(c, inv.particular);
      REQUIRE(std::holds_alternative<SlidingSolution>(r));
      const auto& s = std::get<SlidingSolution>(r);
      CHECK(std::abs(s.lambda - target) <= 1e-9 * std::max(1.0, target));
      const Vec2 v = inv.particular + 0.01 * inv.nullspace.col(0);
      const auto r2 = forward_sliding(c, v);
      const auto& s2 = std::get<SlidingSolution>(r2);
      CHECK((s2.tip_velocity - s.tip_velocity).norm() <= 1e-10 * std::max(1.0, s.tip_velocity.norm()));
      CHECK((s2.force_rate - s.force_rate).norm() > 0.0);
    }
    ++checked;
  }
  CHECK(checked > 300);
  CHECK_THROWS_AS(inverse_sliding(compute_coefficients<2>(random_contact(rng, false, false).in, Vec2::Zero()), -1.0),
                  DomainError);
}

TEST_CASE("spatial contact keeps the force on the cone") {
  std::mt19937_64 rng(16);
  int solved = 0;
  for (int k = 0; k < 500; ++k) {
    SlidingInputs<3> in;
    const Vec3 n = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)).normalized();
    Vec3 t = n.unitOrthogonal();
    t = Eigen::AngleAxisd(uniform(rng, -M_PI, M_PI), n) * t;
    in.mu = uniform(rng, 0.2, 1.0);
    in.cf = decompose<3>(Vec3(uniform(rng, 1, 10) * (n + in.mu * t)), n);
    const Mat3 A = Mat3::Random();
    in.stiffness = A * A.transpose() * 100.0 + 10.0 * Mat3::Identity();
    in.tip_jacobian = -in.stiffness;
    const Mat3 P = Mat3::Identity() - n * n.transpose();
    in.normal_jac = -uniform(rng, 0, 10) * P;  // sphere-like face
    const Vec3 va(uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05));
    const auto c = compute_coefficients<3>(in, va);
    if (std::abs(c.lambda_den) < 1e-6 * c.cf.f_c.squaredNorm() * c.K.norm()) continue;
    const auto r = forward_sliding(c, va);
    if (const auto* s = std::get_if<SlidingSolutionT<3>>(&r)) {
      ++solved;
      const Vec3 ndot = in.normal_jac * s->tip_velocity;
      const Vec3 fN_dot = (s->force_rate.dot(n) + in.cf.f_c.dot(ndot)) * n + in.cf.f_c.dot(n) * ndot;
      const Vec3 ft_dot = s->force_rate - fN_dot;
      const double res = in.cf.f_t.dot(ft_dot) - in.mu * in.mu * in.cf.f_N.dot(fN_dot);
      CHECK(std::abs(res) < 1e-8 * in.cf.f_c.squaredNorm() * c.K.norm() * std::max(1.0, s->tip_velocity.norm()));
    }
  }
  CHECK(solved > 100);
}

TEST_CASE("coefficients need a pressing contact") {
  SlidingInputs<2> in;
  in.mu = 0.5;
  in.cf = decompose<2>(Vec2(0.2, -1.0), Vec2(0.0, 1.0));
  CHECK_THROWS_AS(compute_coefficients<2>(in, Vec2::Zero()), DomainError);
}
