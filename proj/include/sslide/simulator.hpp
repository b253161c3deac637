#pragma once

#include <sslide/finger.hpp>
#include <sslide/model.hpp>
#include <sslide/sliding.hpp>

#include <functional>
#include <limits>
#include <vector>

namespace sslide {

enum class FingerMode { Sticking, Sliding, Separated };

const char* to_string(FingerMode m);

struct FingerSetup {
  StiffnessModel stiffness;
  Vec2 rest_offset = Vec2::Zero();
  double s0 = 0.0;  // initial contact parameter
};

struct AnchorSample {
  Vec2 hand = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
  std::vector<Vec2> anchors;
};

using AnchorTrajectory = std::function<AnchorSample(double t)>;
using ObjectMotion = std::function<ObjectPose(double t)>;

ObjectMotion stationary_object(const ObjectPose& pose = ObjectPose());

struct SimState {
  double t = 0.0;
  ObjectPose pose;
  Vec2 hand = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
  std::vector<FingerState> fingers;
  std::vector<FingerMode> modes;
  std::vector<ContactForce> forces;
  std::vector<int> slide_dir;  // +1 or -1 along the boundary parameter while sliding
};

struct ModeEvent {
  double t = 0.0;
  int finger = 0;
  FingerMode from = FingerMode::Sticking;
  FingerMode to = FingerMode::Sticking;
};

struct TraceRow {
  double t = 0.0;
  Vec2 hand;
  std::vector<Vec2> anchors;
  std::vector<Vec2> tips_body;
  std::vector<Vec2> forces;
  std::vector<FingerMode> modes;
  double margin = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
  std::vector<ModeEvent> events;
  SimState final_state;
};

struct SimOptions {
  double dt = 1e-3;
  double duration = 1.0;
  double sample_period = 1e-2;
  double ctol = 1e-6;
  double event_tol = 1e-9;
  bool compute_margin = true;
  DegeneracyTolerances degeneracy;
};

SimState initial_state(const TaskModel& task, const std::vector<FingerSetup>& fingers, const AnchorSample& anchors,
                       const ObjectPose& pose, const SimOptions& opts = {});

// Advances every finger to the given anchors and object pose at time state.t + dt.
SimState advance(const TaskModel& task, const SimState& state, const AnchorSample& target, const ObjectPose& pose,
                 double dt, const SimOptions& opts, std::vector<ModeEvent>* events = nullptr);

// Velocity form: anchors move with anchor_velocities and the object with the twist carried by `twist`.
SimState step(const TaskModel& task, const SimState& state, const std::vector<Vec2>& anchor_velocities,
              const ObjectPose& twist, double dt, const SimOptions& opts = {},
              std::vector<ModeEvent>* events = nullptr);

Trace simulate(const TaskModel& task, const std::vector<FingerSetup>& fingers, const AnchorTrajectory& anchors,
               const ObjectMotion& object, const SimOptions& opts);

// Wrench-cone margin of the external wrench that balances the given finger forces.
double balance_margin(const TaskModel& task, const ObjectPose& pose, const std::vector<Vec2>& tips_world,
                      const std::vector<Vec2>& forces);

}  // namespace sslide
