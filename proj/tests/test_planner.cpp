#include "helpers.hpp"

#include <doctest.h>

using namespace sslide;
using namespace testing;

namespace {

struct Regrasp {
  TaskFile tf = load_task(task_path("regrasp_task.json"));
  PlanContext ctx = tf.context();
  PlanSpec spec = plan_spec_from_json(load_json(task_path("regrasp_plan.json")));
  SlideDirs dirs{-1, -1};
};

}  // namespace

TEST_CASE("hand placement puts both forces on their cone edges") {
  const Regrasp p;
  for (double y1 : {0.06, 0.1, 0.15}) {
    for (double y2 : {0.05, 0.1, 0.16}) {
      const HandSolution hs = hand_from_heights(p.ctx, y1, y2, p.dirs);
      for (int i = 0; i < 2; ++i) {
        const ContactEdge c = contact_edge(p.ctx, i, i == 0 ? y1 : y2, p.dirs[i]);
        const Vec2 f = -p.ctx.hand.stiffness[i] * (c.tip - p.ctx.hand.anchor(i, hs.p_h));
        CHECK((f - hs.forces[i]).norm() < 1e-12);
        CHECK(std::abs(perp(c.edge).dot(f)) < 1e-10 * std::max(1.0, f.norm()));
        if (hs.pushing) {
          const ContactForce cf = decompose<2>(f, c.normal);
          CHECK(cf.f_t.norm() == doctest::Approx(p.ctx.task.mu * cf.f_N.norm()));
          // Friction resists the slide.
          CHECK((cf.f_t.dot(c.slide) > 0.0) == (c.edge.dot(c.slide) > 0.0));
        }
      }
    }
  }
  HandModel bad = p.ctx.hand;
  bad.stiffness.pop_back();
  CHECK_THROWS_AS(hand_from_contacts(p.ctx.task, bad, {}), DomainError);
}

TEST_CASE("contact map cells agree with the facet description and are labelled by connectivity") {
  const Regrasp p;
  GridSpec g = default_grid(p.ctx, 4e-3);
  const FCMap map = fcmap(p.ctx, g, p.dirs);
  REQUIRE(map.cells.size() == map.y1.size() * map.y2.size());
  int feasible = 0;
  for (std::size_t i = 0; i < map.y1.size(); ++i) {
    for (std::size_t j = 0; j < map.y2.size(); ++j) {
      const FCPoint& c = map.at(i, j);
      const int label = map.labels[i * map.y2.size() + j];
      CHECK((label > 0) == c.feasible);
      if (!c.feasible) continue;
      ++feasible;
      CHECK(c.margin >= -1e-9);
      // Feasible right and up neighbours share the label.
      if (i + 1 < map.y1.size() && map.at(i + 1, j).feasible) CHECK(map.labels[(i + 1) * map.y2.size() + j] == label);
      if (j + 1 < map.y2.size() && map.at(i, j + 1).feasible) CHECK(map.labels[i * map.y2.size() + j + 1] == label);
    }
    for (std::size_t j = 0; j < map.y2.size(); ++j) {
      const FCPoint& c = map.at(i, j);
      if (std::isfinite(c.margin) && std::abs(c.margin) > 1e-7) CHECK((c.margin > 0.0) == c.feasible);
    }
  }
  CHECK(feasible > 50);
  CHECK(map.connected(p.spec.S, p.spec.G));
}

TEST_CASE("optimal curve matches a dense scan") {
  const Regrasp p;
  const GridSpec g = default_grid(p.ctx, 1e-3);
  const std::vector<XiPoint> xi = xi_star(p.ctx, 0.06, 0.16, 0.02, p.dirs, g.y2_lo, g.y2_hi);
  REQUIRE(xi.size() == 6);
  const WrenchCone cone = build_external_cone(p.ctx.task, p.ctx.pose);
  const MatX normals = facet_normals(cone.W);
  for (const XiPoint& x : xi) {
    double dense = -std::numeric_limits<double>::infinity();
    for (double b = g.y2_lo; b <= g.y2_hi; b += 1e-5) {
      const FCPoint q = evaluate_point(p.ctx, x.y1, b, p.dirs, cone.W, normals);
      if (q.feasible) dense = std::max(dense, q.margin);
    }
    CHECK(x.margin >= dense - 1e-6 * std::abs(dense));
    const FCPoint at = evaluate_point(p.ctx, x.y1, x.y2, p.dirs);
    CHECK(at.feasible);
    CHECK(at.margin == doctest::Approx(x.margin));
  }
}

TEST_CASE("cubic boundary conditions") {
  const Vec2 p0(0.1, -0.2), p1(0.3, 0.4), v0(0.02, -0.01), v1(-0.05, 0.07);
  const double T = 2.5;
  const Cubic2 a = Cubic2::rest_to_rest(p0, p1, T);
  CHECK(a.eval(0).isApprox(p0));
  CHECK(a.eval(T).isApprox(p1));
  CHECK(a.deriv(0).norm() == 0.0);
  CHECK(a.deriv(T).norm() < 1e-14);
  const Cubic2 b = Cubic2::rest_to_velocity(p0, p1, v1, T);
  CHECK(b.eval(T).isApprox(p1));
  CHECK(b.deriv(T).isApprox(v1));
  CHECK(b.deriv(0).norm() == 0.0);
  const Cubic2 c = Cubic2::velocity_to_rest(p0, v0, p1, T);
  CHECK(c.eval(0).isApprox(p0));
  CHECK(c.deriv(0).isApprox(v0));
  CHECK(c.eval(T).isApprox(p1));
  CHECK(c.deriv(T).norm() < 1e-14);
  CHECK_THROWS_AS(Cubic2::rest_to_rest(p0, p1, 0.0), DomainError);
}

TEST_CASE("phase 2 profile is continuous and slides monotonically") {
  std::vector<XiPoint> xi;
  for (int k = 0; k <= 100; ++k) {
    const double y1 = 0.2 + 0.006 * k;
    xi.push_back({y1, 0.15 + 0.5 * (y1 - 0.2) + 0.02 * std::sin(10 * y1), 1.0});
  }
  const Vec2 S(0.85, 0.6), G(0.15, 0.1);
  const double total = 15.0;
  const Phase2Plan ph = phase2_plan(S, G, xi, total, 0.5);
  CHECK(ph.duration() == doctest::Approx(total));
  CHECK(ph.dT21 >= 0.1 - 1e-12);
  CHECK(ph.dT22 >= 0.1 - 1e-12);
  CHECK(ph.dT23 >= 0.1 - 1e-12);
  CHECK(ph.xi(0.0).isApprox(S));
  CHECK(ph.xi(total).isApprox(G));
  CHECK(ph.xi(ph.dT21).isApprox(ph.Sp));
  CHECK((ph.xi(ph.dT21 + ph.dT22) - ph.Gp).norm() < 1e-9);
  CHECK(ph.objective == doctest::Approx(ph.L2 - 0.5 * ph.V_max));
  Vec2 prev = S;
  double peak = 0.0;
  for (int k = 1; k <= 3000; ++k) {
    const Vec2 x = ph.xi(total * k / 3000.0);
    CHECK(x.x() <= prev.x() + 1e-12);
    CHECK(x.y() <= prev.y() + 1e-12);
    peak = std::max(peak, ph.xi_dot(total * k / 3000.0).cwiseAbs().sum());
    prev = x;
  }
  CHECK(peak <= ph.V_max * (1 + 1e-6));
  CHECK(peak >= ph.V_max * 0.99);
  // Velocity is continuous where the cubics meet the middle piece.
  CHECK((ph.piece1.deriv(ph.dT21) - ph.v_s).norm() < 1e-12);
  CHECK((ph.piece3.deriv(0.0) - ph.v_g).norm() < 1e-12);
}

TEST_CASE("phase 2 rejects unreachable goals") {
  std::vector<XiPoint> xi;
  for (int k = 0; k <= 20; ++k) xi.push_back({0.1 + 0.04 * k, 2.0, 1.0});
  CHECK_THROWS_AS(phase2_plan(Vec2(0.0, 0.0), Vec2(1.0, 1.0), xi, 10.0, 0.5), PlanningError);
  CHECK_THROWS_AS(phase2_plan(Vec2(0.0, 0.0), Vec2(1.0, 0.0), xi, 10.0, 0.5), PlanningError);
  CHECK_THROWS_AS(phase2_plan(Vec2(0.0, 0.0), Vec2(1.0, 1.0), xi, 0.2, 0.5), PlanningError);
}

TEST_CASE("regrasp end to end") {
  const Regrasp p;
  PlanValidation v;
  const RegraspPlan plan = plan_regrasp(p.ctx, p.spec, &v);
  REQUIRE(plan.has_phase2);
  CHECK(plan.T2() == doctest::Approx(p.spec.T2));
  CHECK(std::max(v.deviation[0], v.deviation[1]) < 1e-3);
  const double t0 = plan.T1() + plan.phase2.dT21, t1 = t0 + plan.phase2.dT22;
  int checked = 0;
  for (const TraceRow& r : v.trace.rows) {
    if (r.t < plan.T1()) {
      for (int i = 0; i < 2; ++i) CHECK(r.tips_body[i].y() == doctest::Approx(p.spec.S[i]).epsilon(1e-9));
    }
    if (r.t < t0 || r.t > t1) continue;
    const Vec2 y(r.tips_body[0].y(), r.tips_body[1].y());
    CHECK((y - plan.xi_at(r.t)).norm() < 1e-3);
    CHECK(r.margin > 0.0);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("plan requests are validated") {
  Regrasp p;
  p.spec.T2 = p.spec.T1;
  CHECK_THROWS_AS(plan_regrasp(p.ctx, p.spec), DomainError);
  p.spec.T2 = 20.0;
  p.spec.initial_hand_offset = Vec2(0.0, 0.2);
  CHECK_THROWS_AS(plan_regrasp(p.ctx, p.spec), DomainError);
}
