// Acceptance checks.  One PASS/FAIL line per criterion; exit status 1 if any fails.
#include "helpers.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace sslide;
using namespace testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome mechanics_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  int solved = 0, reverted = 0;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const RandomContact rc = random_contact(rng, k % 2 == 1, k % 4 >= 2);
    const SlidingCoefficients c = compute_coefficients<2>(rc.in, rc.anchor_velocity);
    if (std::abs(c.lambda_den) < 1e-6 * c.cf.f_c.squaredNorm() * c.K.norm()) continue;
    const ForwardResult r = forward_sliding(c, rc.anchor_velocity);
    if (const auto* s = std::get_if<SlidingSolution>(&r)) {
      ++solved;
      worst = std::max(worst, cone_rate_residual(rc.in, s->tip_velocity, s->force_rate));
    } else {
      ++reverted;
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << solved << " sliding solutions, " << reverted << " revert to sticking, worst relative residual " << worst
     << ", " << secs << " s";
  return {worst < 1e-8 && solved > 1000 && secs < 5.0, os.str()};
}

Outcome denominator_closed_form() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  int type1 = 0;
  for (int k = 0; k < 10000; ++k) {
    const RandomContact rc = random_contact(rng, false, false);
    const SlidingCoefficients c = compute_coefficients<2>(rc.in, rc.anchor_velocity);
    const double oracle = c.cf.f_t.dot(c.K * c.a);
    worst = std::max(worst, std::abs(c.lambda_den - oracle) / std::max(1.0, std::abs(oracle)));
    type1 += check_degeneracy(c) == Degeneracy::TypeI;
  }
  std::ostringstream os;
  os << "worst |lambda_den - ft'Ka| " << worst << ", type I flags " << type1;
  return {worst <= 1e-10 && type1 == 0, os.str()};
}

Outcome forward_inverse() {
  std::mt19937_64 rng(103);
  int states = 0;
  double worst_lambda = 0.0, worst_tip = 0.0, min_force_change = std::numeric_limits<double>::infinity();
  while (states < 1000) {
    const RandomContact rc = random_contact(rng, states % 2 == 1, states % 3 == 0);
    const SlidingCoefficients c = compute_coefficients<2>(rc.in, Vec2::Zero());
    if (check_degeneracy(c) != Degeneracy::None) continue;
    ++states;
    for (double target : {0.1, 1.0, 5.0}) {
      const InverseSolution inv = inverse_sliding(c, target);
      const ForwardResult r = forward_sliding(c, inv.particular);
      const auto* s = std::get_if<SlidingSolution>(&r);
      if (!s) return {false, "inverse solution does not slide"};
      worst_lambda = std::max(worst_lambda, std::abs(s->lambda - target) / std::max(1.0, target));
      const Vec2 n = inv.nullspace.col(0);
      const ForwardResult r2 = forward_sliding(c, Vec2(inv.particular + 0.01 * n));
      const auto* s2 = std::get_if<SlidingSolution>(&r2);
      if (!s2) return {false, "nullspace step stops sliding"};
      const double tip_change = (s2->tip_velocity - s->tip_velocity).norm();
      worst_tip = std::max(worst_tip, tip_change / std::max(1.0, s->tip_velocity.norm()));
      min_force_change = std::min(min_force_change, (s2->force_rate - s->force_rate).norm());
    }
  }
  std::ostringstream os;
  os << states << " states, worst lambda error " << worst_lambda << ", worst tip change " << worst_tip
     << ", smallest force-rate change " << min_force_change;
  return {worst_lambda <= 1e-9 && worst_tip <= 1e-10 && min_force_change > 0.0, os.str()};
}

Outcome robustness() {
  std::mt19937_64 rng(104);
  int sufficient = 0, violations = 0;
  for (int k = 0; k < 500; ++k) {
    const Instance in = random_instance(rng, 3 + k % 3);
    const double eps = uniform(rng, 0.0, 0.2);
    const auto lp = balance_lp(in.W, in.wc, in.wg);
    if (!lp) return {false, "random instance not balanced"};
    for (const VecX& beta : {lp->beta, in.beta0}) {
      if (!robust_sufficient(in.W, beta, eps)) continue;
      ++sufficient;
      violations += !robust_exact(in.W, in.wc, in.wg, eps);
    }
  }
  // Corner test at eps covers 10^4 interior samples.
  int interior_fail = 0, corner_pass = 0;
  for (int k = 0; k < 10; ++k) {
    const Instance in = random_instance(rng, 4);
    const double eps = 0.95 * max_epsilon(in.W, in.wc, in.wg, 1e-4).epsilon;
    if (!robust_exact(in.W, in.wc, in.wg, eps)) continue;
    ++corner_pass;
    for (int t = 0; t < 1000; ++t) {
      const Vec3 d(uniform(rng, -eps, eps), uniform(rng, -eps, eps), uniform(rng, -eps, eps));
      interior_fail += !balance_lp(in.W, in.wc + d, in.wg).has_value();
    }
  }
  // Bisection against a dense grid.
  double worst_gap = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Instance in = random_instance(rng, 4);
    const double tol = 1e-4;
    const double bis = max_epsilon(in.W, in.wc, in.wg, tol).epsilon;
    double grid = 0.0;
    while (robust_exact(in.W, in.wc, in.wg, grid + tol)) grid += tol;
    worst_gap = std::max(worst_gap, std::abs(bis - grid));
  }
  std::ostringstream os;
  os << sufficient << " sufficient verdicts, " << violations << " not exact; " << corner_pass * 1000
     << " interior samples, " << interior_fail << " infeasible; worst bisection vs grid gap " << worst_gap;
  return {sufficient > 50 && violations == 0 && corner_pass == 10 && interior_fail == 0 && worst_gap <= 1e-4,
          os.str()};
}

Outcome regrasp_planning() {
  const auto t0 = Clock::now();
  const TaskFile tf = load_task(task_path("regrasp_task.json"));
  const PlanContext ctx = tf.context();
  const PlanSpec spec = plan_spec_from_json(load_json(task_path("regrasp_plan.json")));
  PlanValidation v;
  RegraspPlan plan;
  try {
    plan = plan_regrasp(ctx, spec, &v);
  } catch (const Error& e) {
    return {false, e.what()};
  }
  const double secs = seconds_since(t0);
  // Middle piece against the optimal curve: each path point's y2 vs the curve's best y2 at that y1.
  double off_curve = 0.0;
  for (const Vec2& p : plan.phase2.path) {
    const auto xi = xi_star(ctx, p.x(), p.x(), spec.step, plan.dirs, default_grid(ctx, spec.step).y2_lo,
                            default_grid(ctx, spec.step).y2_hi);
    if (xi.empty()) return {false, "path point without a feasible grasp"};
    off_curve = std::max(off_curve, std::abs(xi.front().y2 - p.y()));
  }
  // Executed middle piece against the plan.
  const double ta = plan.T1() + plan.phase2.dT21, tb = ta + plan.phase2.dT22;
  double tracking = 0.0;
  for (const TraceRow& r : v.trace.rows) {
    if (r.t < ta || r.t > tb) continue;
    tracking = std::max(tracking, (Vec2(r.tips_body[0].y(), r.tips_body[1].y()) - plan.xi_at(r.t)).norm());
  }
  const double dev = std::max(v.deviation[0], v.deviation[1]);
  std::ostringstream os;
  os << "goal deviation " << v.deviation[0] * 1e3 << " / " << v.deviation[1] * 1e3 << " mm, middle piece off curve "
     << off_curve * 1e3 << " mm, tracking " << tracking * 1e3 << " mm, " << secs << " s";
  return {dev < 1e-3 && off_curve < 1e-3 && tracking < 1e-3 && secs < 60.0, os.str()};
}

Outcome identification() {
  const auto t0 = Clock::now();
  IdentConfig cfg = load_ident_config(task_path("ident_config.json"));
  cfg.problem.obs = synthesize(cfg);
  const IdentResult r = fit(cfg.problem);
  const double secs = seconds_since(t0);
  const IdentParams& truth = *cfg.truth;
  const double mu_err = std::abs(r.params.mu - truth.mu) / truth.mu;
  double k_err = 0.0;
  std::ostringstream os;
  os.precision(4);
  os << "mu " << r.params.mu << " (" << 100 * mu_err << "%)";
  for (int i = 0; i < 2; ++i) {
    for (int d = 0; d < 2; ++d) {
      const double e = std::abs(r.params.K[i](d, d) - truth.K[i](d, d)) / truth.K[i](d, d);
      k_err = std::max(k_err, e);
      os << ", K" << i + 1 << (d == 0 ? "x " : "y ") << r.params.K[i](d, d) << " (" << 100 * e << "%)";
    }
  }
  for (int i = 0; i < 2; ++i) {
    const double fit_ratio = r.params.K[i](1, 1) / r.params.K[i](0, 0);
    const double true_ratio = truth.K[i](1, 1) / truth.K[i](0, 0);
    os << ", K" << i + 1 << " ky/kx error " << 100 * std::abs(fit_ratio - true_ratio) / true_ratio << "%";
  }
  os << ", residual " << r.residual << " m, " << r.evaluations << " evaluations, " << secs << " s";
  return {mu_err <= 0.01 && k_err <= 0.02 && r.residual < 1e-3 && secs < 120.0, os.str()};
}

Outcome two_link_stiffness() {
  double worst = 0.0;
  int pd_lo = -1, pd_hi = -1;
  bool contiguous = true;
  for (int deg = 1; deg < 180; ++deg) {
    const double t2 = deg * M_PI / 180.0;
    const Vec2 e = Eigen::SelfAdjointEigenSolver<Mat2>(stiffness_2r(0.0, t2, Vec2::Ones(), Vec2::Ones())).eigenvalues();
    worst = std::max(worst, (e - stiffness_2r_eigenvalues(t2)).norm() / std::max(1.0, e.norm()));
    if (e[0] > 1e-12 * e.cwiseAbs().maxCoeff()) {
      if (pd_lo < 0) pd_lo = deg;
      else if (pd_hi != deg - 1) contiguous = false;
      pd_hi = deg;
    }
  }
  const RunawayCase c = runaway_case(2.6);
  SimOptions o;
  o.duration = 1.0;
  o.compute_margin = false;
  const Vec2 a0 = c.anchor, v = c.anchor_velocity;
  AnchorTrajectory traj = [a0, v](double t) {
    AnchorSample s;
    s.anchors = {a0 + v * t};
    return s;
  };
  std::string flag = "none";
  try {
    simulate(c.task, {c.finger}, traj, stationary_object(), o);
  } catch (const DegeneracyError& e) {
    flag = e.type() == Degeneracy::TypeII ? "type II" : "type I";
  }
  std::ostringstream os;
  os << "worst eigenvalue error " << worst << ", positive definite for " << pd_lo << ".." << pd_hi
     << " deg, runaway flag " << flag;
  return {worst < 1e-8 && contiguous && pd_lo == 1 && pd_hi == 89 && flag == "type II", os.str()};
}

Outcome convergence() {
  const TaskFile tf = load_task(task_path("regrasp_task.json"));
  const PlanContext ctx = tf.context();
  const PlanSpec spec = plan_spec_from_json(load_json(task_path("regrasp_plan.json")));
  const RegraspPlan plan = plan_regrasp(ctx, spec);
  const PlanValidation a = validate_plan(ctx, plan, 1e-3), b = validate_plan(ctx, plan, 5e-4);
  double gap = 0.0;
  for (int i = 0; i < 2; ++i)
    gap = std::max(gap, (a.trace.rows.back().tips_body[i] - b.trace.rows.back().tips_body[i]).norm());
  bool same = a.trace.events.size() == b.trace.events.size();
  for (std::size_t k = 0; same && k < a.trace.events.size(); ++k)
    same = a.trace.events[k].finger == b.trace.events[k].finger && a.trace.events[k].to == b.trace.events[k].to;
  std::ostringstream os;
  os << "final fingertip gap " << gap * 1e3 << " mm, " << a.trace.events.size() << " mode events, "
     << (same ? "same" : "different") << " sequence";
  return {gap < 1e-4 && same, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mechanics identity", mechanics_identity},
      {"denominator closed form", denominator_closed_form},
      {"forward/inverse round trip", forward_inverse},
      {"robustness implication and exactness", robustness},
      {"regrasp planning", regrasp_planning},
      {"identification", identification},
      {"two-link stiffness", two_link_stiffness},
      {"simulator convergence", convergence},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s (%s)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
