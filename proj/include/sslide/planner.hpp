#pragma once

#include <sslide/model.hpp>
#include <sslide/simulator.hpp>
#include <sslide/wrench.hpp>

#include <array>
#include <optional>
#include <vector>

namespace sslide {

struct HandModel {
  Vec2 position = Vec2::Zero();
  double rotation = 0.0;
  std::vector<Vec2> anchor_offsets;  // hand frame
  std::vector<Mat2> stiffness;       // constant per finger

  Vec2 anchor(int i, const Vec2& p_h) const { return p_h + rot2(rotation) * anchor_offsets[i]; }
  std::vector<Vec2> anchors(const Vec2& p_h) const;
};

// Everything the two-finger planner needs about the task.
struct PlanContext {
  TaskModel task;
  HandModel hand;
  std::array<int, 2> faces{0, 0};  // boundary piece each finger slides on
  ObjectPose pose;                 // stationary object

  double s_at_height(int finger, double y) const { return task.boundary.locate_height(faces[finger], y); }
  std::array<double, 2> face_range(int finger) const;
};

// Sliding direction of a fingertip along its face, as the sign of body y motion.
using SlideDirs = std::array<int, 2>;

struct ContactEdge {
  Vec2 tip;        // world
  Vec2 normal;     // world, into the object
  Vec2 slide;      // unit tangent in the sliding direction
  Vec2 edge;       // unit force direction on the cone edge
};

ContactEdge contact_edge(const PlanContext& ctx, int finger, double y, int dir);

struct HandSolution {
  Vec2 p_h = Vec2::Zero();
  std::array<Vec2, 2> tips;
  std::array<Vec2, 2> forces;
  bool pushing = false;  // both forces point along their cone edges with positive normal part
};

HandSolution hand_from_contacts(const TaskModel& task, const HandModel& hand, const std::array<ContactEdge, 2>& c);
HandSolution hand_from_heights(const PlanContext& ctx, double y1, double y2, const SlideDirs& dirs);

struct FCPoint {
  double y1 = 0.0, y2 = 0.0;
  bool feasible = false;
  double margin = -std::numeric_limits<double>::infinity();
  Vec2 p_h = Vec2::Zero();
  std::array<Vec2, 2> forces{Vec2::Zero(), Vec2::Zero()};
};

FCPoint evaluate_point(const PlanContext& ctx, double y1, double y2, const SlideDirs& dirs, const MatX& W,
                       const MatX& normals);
FCPoint evaluate_point(const PlanContext& ctx, double y1, double y2, const SlideDirs& dirs);

struct GridSpec {
  double y1_lo = 0.0, y1_hi = 0.0, y2_lo = 0.0, y2_hi = 0.0;
  double step = 1e-3;
};

// Grid aligned to integer multiples of the step inside the faces' height ranges.
GridSpec default_grid(const PlanContext& ctx, double step);

struct FCMap {
  std::vector<double> y1, y2;
  std::vector<FCPoint> cells;  // row-major: index = i1 * y2.size() + i2
  std::vector<int> labels;     // 0 for infeasible cells, components numbered from 1

  const FCPoint& at(std::size_t i1, std::size_t i2) const { return cells[i1 * y2.size() + i2]; }
  std::optional<std::pair<std::size_t, std::size_t>> nearest(double y1, double y2) const;
  int label_at(double y1, double y2) const;
  bool connected(const Vec2& a, const Vec2& b) const;
};

FCMap fcmap(const PlanContext& ctx, const GridSpec& grid, const SlideDirs& dirs);

struct XiPoint {
  double y1 = 0.0, y2 = 0.0, margin = 0.0;
};

// For each y1 in [y1_lo, y1_hi] on the step grid, the y2 maximizing the margin.
std::vector<XiPoint> xi_star(const PlanContext& ctx, double y1_lo, double y1_hi, double step, const SlideDirs& dirs,
                             double y2_lo, double y2_hi);

struct Cubic2 {
  std::array<Vec2, 4> c{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  double duration = 0.0;

  Vec2 eval(double tau) const;
  Vec2 deriv(double tau) const;
  // Rest-to-rest cubic; or start at rest and end with velocity v1.
  static Cubic2 rest_to_rest(const Vec2& p0, const Vec2& p1, double T);
  static Cubic2 rest_to_velocity(const Vec2& p0, const Vec2& p1, const Vec2& v1, double T);
  static Cubic2 velocity_to_rest(const Vec2& p0, const Vec2& v0, const Vec2& p1, double T);
};

Cubic2 phase1_plan(const Vec2& p_h0, const Vec2& p_hS, double T1);
// Optional force relaxation after the regrasp: the Phase-1 cubic run in reverse.
Cubic2 phase3_plan(const Vec2& p_hG, const Vec2& p_h_relaxed, double T3);

struct Phase2Plan {
  Vec2 S, Sp, Gp, G;
  Vec2 v_s, v_g;
  double v2 = 0.0, L2 = 0.0, kappa = 0.0, V_max = 0.0, objective = 0.0;
  double dT21 = 0.0, dT22 = 0.0, dT23 = 0.0;
  std::vector<Vec2> path;  // middle piece: S' ... G' along the optimal curve
  std::vector<double> path_s;  // cumulative arclength
  Cubic2 piece1, piece3;

  double duration() const { return dT21 + dT22 + dT23; }
  Vec2 xi(double tau) const;      // tau in [0, duration]
  Vec2 xi_dot(double tau) const;
};

Phase2Plan phase2_plan(const Vec2& S, const Vec2& G, const std::vector<XiPoint>& xi, double total, double kappa,
                       double min_duration = 0.1);

struct PlanSpec {
  Vec2 S = Vec2::Zero(), G = Vec2::Zero();
  double T1 = 5.0, T2 = 20.0, kappa = 0.5;
  double step = 1e-3;
  std::optional<Vec2> initial_hand;
  Vec2 initial_hand_offset = Vec2::Zero();
  double validate_dt = 1e-3;
  double tolerance = 1e-3;
};

struct RegraspPlan {
  PlanSpec spec;
  SlideDirs dirs{-1, -1};
  Vec2 p_h0 = Vec2::Zero(), p_hS = Vec2::Zero();
  Cubic2 phase1;
  bool has_phase2 = false;
  Phase2Plan phase2;
  std::vector<XiPoint> xi;

  double T1() const { return spec.T1; }
  double T2() const { return has_phase2 ? spec.T1 + phase2.duration() : spec.T1; }
  Vec2 xi_at(double t) const;
};

// Hand position of the plan at time t (held constant after the end).
Vec2 plan_hand(const PlanContext& ctx, const RegraspPlan& plan, double t);
AnchorTrajectory plan_anchor_trajectory(const PlanContext& ctx, const RegraspPlan& plan);
std::vector<FingerSetup> plan_fingers(const PlanContext& ctx, const RegraspPlan& plan);

struct PlanValidation {
  std::array<double, 2> deviation{0.0, 0.0};
  Trace trace;
};

PlanValidation validate_plan(const PlanContext& ctx, const RegraspPlan& plan, double dt, double sample_period = 0.01);

RegraspPlan plan_regrasp(const PlanContext& ctx, const PlanSpec& spec, PlanValidation* validation = nullptr);

}  // namespace sslide
