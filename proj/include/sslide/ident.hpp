#pragma once

#include <sslide/planner.hpp>
#include <sslide/simulator.hpp>

#include <array>
#include <functional>
#include <vector>

namespace sslide {

struct IdentParams {
  double mu = 0.0;
  std::array<Mat2, 2> K{Mat2::Identity(), Mat2::Identity()};
};

struct IdentObservations {
  std::vector<double> t;
  std::vector<std::array<Vec2, 2>> tips_body;
};

struct IdentProblem {
  PlanContext ctx;                          // geometry, hand offsets, faces
  std::array<double, 2> initial_heights{};  // fingertip body heights at t = 0
  std::function<Vec2(double)> hand_path;    // known hand trajectory
  IdentObservations obs;
  IdentParams guess;
  std::array<double, 2> mu_bounds{0.0, 2.0};
  std::array<double, 2> k_bounds{1.0, 1e5};
  double dt = 1e-3;
  bool off_diagonal = false;
  int max_evaluations = 4000;
  double xtol = 1e-10;
  int jobs = 1;

  static constexpr double kPenalty = 1e6;
};

struct IdentResult {
  IdentParams params;
  double residual = 0.0;
  double initial_residual = 0.0;
  int iterations = 0;
  int improvements = 0;
  int evaluations = 0;
  bool converged = false;
};

// Simulated trace of the identification experiment for the given parameters.
Trace simulate_experiment(const IdentProblem& problem, const IdentParams& params, double sample_period,
                          double duration);

// Observations taken from a trace (rows t, tips_body).
IdentObservations observations_from(const Trace& trace);

double residual(const IdentProblem& problem, const IdentParams& params);

// Parameter vector <-> params (diagonal: mu, k1x, k1y, k2x, k2y; Cholesky: mu, L1 (3), L2 (3)).
VecX pack(const IdentParams& p, bool off_diagonal);
IdentParams unpack(const VecX& x, bool off_diagonal);

IdentResult fit(const IdentProblem& problem);

// Nelder-Mead over a box.  Exposed for testing.
struct NelderMeadResult {
  VecX x;
  double f = 0.0;
  int iterations = 0;
  int improvements = 0;
  int evaluations = 0;
  bool converged = false;
};
NelderMeadResult nelder_mead(const std::function<double(const VecX&)>& f, const VecX& x0, const VecX& step,
                             const VecX& lo, const VecX& hi, int max_evaluations, double xtol, int jobs = 1);

}  // namespace sslide
