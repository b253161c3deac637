#include <sslide/simulator.hpp>
#include <sslide/wrench.hpp>

#include <cmath>
#include <sstream>

namespace sslide {

const char* to_string(FingerMode m) {
  switch (m) {
    case FingerMode::Sticking: return "sticking";
    case FingerMode::Sliding: return "sliding";
    case FingerMode::Separated: return "separated";
  }
  return "unknown";
}

ObjectMotion stationary_object(const ObjectPose& pose) {
  ObjectPose p = pose;
  p.linear_velocity.setZero();
  p.angular_velocity = 0.0;
  return [p](double) { return p; };
}

namespace {

struct Contact {
  Vec2 tip;
  Vec2 tangent;  // world, increasing s
  ContactForce cf;
};

Contact contact_at(const TaskModel& task, const FingerState& finger, double s, const Vec2& anchor,
                   const ObjectPose& pose) {
  const SurfacePoint sp = task.boundary.query(s);
  const Mat2 r = pose.rotation();
  Contact c;
  c.tip = pose.position + r * sp.position;
  c.tangent = r * sp.tangent;
  c.cf = decompose<2>(finger.stiffness.force(c.tip, anchor, finger.rest_offset), r * sp.normal);
  return c;
}

// ||f_t|| - mu f_N; positive outside the cone.
double cone_excess(const ContactForce& cf, double mu) { return cf.f_t.norm() - mu * cf.f_c.dot(cf.normal); }

ObjectPose lerp_pose(const ObjectPose& a, const ObjectPose& b, double tau) {
  ObjectPose p = b;
  p.position = a.position + tau * (b.position - a.position);
  p.angle = a.angle + tau * (b.angle - a.angle);
  return p;
}

// Smallest tau in [0, 1] with g(tau) > 0, given g(1) > 0.
template <typename F>
double first_crossing(F&& g, double tol) {
  if (g(0.0) > 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  return hi;
}

std::string where(double t, int finger) {
  std::ostringstream os;
  os << " (finger " << finger + 1 << ", t = " << t << " s)";
  return os.str();
}

class FingerAdvance {
 public:
  FingerAdvance(const TaskModel& task, const SimState& st, int i, const Vec2& a1, const ObjectPose& pose1, double dt,
                const SimOptions& opts)
      : task_(task), st_(st), i_(i), finger_(st.fingers[i]), a0_(st.fingers[i].anchor), a1_(a1),
        pose0_(st.pose), pose1_(pose1), dt_(dt), opts_(opts) {}

  Vec2 anchor(double tau) const { return a0_ + tau * (a1_ - a0_); }
  ObjectPose pose(double tau) const { return lerp_pose(pose0_, pose1_, tau); }
  Vec2 anchor_velocity() const { return (a1_ - a0_) / dt_; }
  Contact at(double s, double tau) const { return contact_at(task_, finger_, s, anchor(tau), pose(tau)); }

  double psi(double s, int dir) const {
    const Contact c = at(s, 1.0);
    return dir * c.cf.f_c.dot(c.tangent) - task_.mu * c.cf.f_c.dot(c.cf.normal);
  }

  SlidingCoefficients coeffs(double s, double tau) const {
    FingerState f = finger_;
    const Contact c = at(s, tau);
    f.s = s;
    f.tip = c.tip;
    f.anchor = anchor(tau);
    return coefficients(task_, pose(tau), f, c.cf, anchor_velocity());
  }

  void require_stable(const SlidingCoefficients& c, double t) const {
    const double thr = opts_.degeneracy.type2 * c.cf.f_c.squaredNorm() * c.K.norm();
    if (c.lambda_den >= -thr)
      throw DegeneracyError("simulator", Degeneracy::TypeII,
                            "quasistatic assumption is violated: sliding rate is unbounded" + where(t, i_));
  }

  // New boundary parameter of a sliding finger at the end of the step.
  double project(double s, int dir, double s_guess) const {
    const double L = task_.boundary.length();
    auto inside = [&](double x) { return x >= 0.0 && x <= L; };
    double lo = s;
    double hi = s_guess;
    if ((hi - s) * dir <= 0.0) hi = s + dir * 1e-12;
    double step = std::abs(hi - s);
    int guard = 0;
    while (psi(hi, dir) > 0.0) {
      lo = hi;
      step *= 2.0;
      hi = s + dir * step;
      if (!inside(hi)) {
        hi = dir > 0 ? L : 0.0;
        if (psi(hi, dir) > 0.0)
          throw GeometryError("simulator", "fingertip leaves the boundary parameter range" + where(st_.t, i_));
        break;
      }
      if (++guard > 200) throw SolverError("simulator", "could not bracket the sliding projection" + where(st_.t, i_));
    }
    // Safeguarded Newton on psi between lo (psi > 0) and hi (psi <= 0).
    double x = std::clamp(s_guess, std::min(lo, hi), std::max(lo, hi));
    const double h = 1e-9;
    const double fscale = std::max(1e-300, at(s, 1.0).cf.f_c.norm());
    for (int it = 0; it < 100; ++it) {
      const double fx = psi(x, dir);
      if (std::abs(fx) <= 1e-14 * fscale) return x;
      if (fx > 0.0) lo = x;
      else hi = x;
      const double d = (psi(x + h, dir) - psi(x - h, dir)) / (2.0 * h);
      double xn = d != 0.0 ? x - fx / d : 0.5 * (lo + hi);
      if (!(xn > std::min(lo, hi) && xn < std::max(lo, hi))) xn = 0.5 * (lo + hi);
      if (std::abs(xn - x) < 1e-15) return xn;
      x = xn;
      if (std::abs(hi - lo) < 1e-15) return x;
    }
    return x;
  }

  const TaskModel& task_;
  const SimState& st_;
  int i_;
  const FingerState& finger_;
  Vec2 a0_, a1_;
  ObjectPose pose0_, pose1_;
  double dt_;
  const SimOptions& opts_;
};

}  // namespace

SimState initial_state(const TaskModel& task, const std::vector<FingerSetup>& fingers, const AnchorSample& anchors,
                       const ObjectPose& pose, const SimOptions& opts) {
  if (anchors.anchors.size() != fingers.size())
    throw DomainError("simulator", "anchor trajectory and finger count differ");
  SimState st;
  st.pose = pose;
  st.hand = anchors.hand;
  for (std::size_t i = 0; i < fingers.size(); ++i) {
    FingerState f;
    f.stiffness = fingers[i].stiffness;
    f.rest_offset = fingers[i].rest_offset;
    f.anchor = anchors.anchors[i];
    f.s = fingers[i].s0;
    const Contact c = contact_at(task, f, f.s, f.anchor, pose);
    f.tip = c.tip;
    FingerMode mode = FingerMode::Sticking;
    if (c.cf.f_c.dot(c.cf.normal) <= 0.0) {
      mode = FingerMode::Separated;
    } else if (cone_excess(c.cf, task.mu) > opts.ctol * task.mu * c.cf.f_c.dot(c.cf.normal)) {
      throw DomainError("simulator", "initial contact force of finger " + std::to_string(i + 1) +
                                         " lies outside the friction cone");
    }
    st.fingers.push_back(f);
    st.modes.push_back(mode);
    st.forces.push_back(mode == FingerMode::Separated ? ContactForce{} : c.cf);
    st.slide_dir.push_back(0);
  }
  return st;
}

SimState advance(const TaskModel& task, const SimState& state, const AnchorSample& target, const ObjectPose& pose1,
                 double dt, const SimOptions& opts, std::vector<ModeEvent>* events) {
  if (!(dt > 0.0)) throw DomainError("simulator", "dt must be positive");
  if (target.anchors.size() != state.fingers.size())
    throw DomainError("simulator", "anchor trajectory and finger count differ");
  SimState next = state;
  next.t = state.t + dt;
  next.pose = pose1;
  next.hand = target.hand;
  auto record = [&](double t, int i, FingerMode from, FingerMode to) {
    if (events) events->push_back({t, i, from, to});
  };

  for (std::size_t k = 0; k < state.fingers.size(); ++k) {
    const int i = static_cast<int>(k);
    FingerAdvance fa(task, state, i, target.anchors[k], pose1, dt, opts);
    FingerState& f = next.fingers[k];
    f.anchor = target.anchors[k];
    const double s0 = state.fingers[k].s;

    if (state.modes[k] == FingerMode::Separated) {
      next.forces[k] = ContactForce{};
      f.tip = pose1.to_world(task.boundary.query(s0).position);
      continue;
    }

    auto separate = [&](double tau) {
      record(state.t + tau * dt, i, state.modes[k], FingerMode::Separated);
      next.modes[k] = FingerMode::Separated;
      next.forces[k] = ContactForce{};
      next.slide_dir[k] = 0;
    };

    if (state.modes[k] == FingerMode::Sticking) {
      const Contact c1 = fa.at(s0, 1.0);
      f.s = s0;
      f.tip = c1.tip;
      const double fn1 = c1.cf.f_c.dot(c1.cf.normal);
      if (fn1 <= 0.0) {
        separate(first_crossing([&](double tau) { return -fa.at(s0, tau).cf.f_c.dot(fa.at(s0, tau).cf.normal); },
                                opts.event_tol / dt));
        continue;
      }
      auto trigger = [&](double tau) {
        const Contact c = fa.at(s0, tau);
        return cone_excess(c.cf, task.mu) - opts.ctol * task.mu * c.cf.f_c.dot(c.cf.normal);
      };
      if (trigger(1.0) <= 0.0) {
        next.forces[k] = c1.cf;
        continue;
      }
      const double tau = first_crossing(trigger, opts.event_tol / dt);
      const Contact ce = fa.at(s0, tau);
      const int dir = ce.cf.f_c.dot(ce.tangent) >= 0.0 ? 1 : -1;
      fa.require_stable(fa.coeffs(s0, tau), state.t + tau * dt);
      record(state.t + tau * dt, i, FingerMode::Sticking, FingerMode::Sliding);
      const double s1 = fa.project(s0, dir, s0);
      const Contact c2 = fa.at(s1, 1.0);
      f.s = s1;
      f.tip = c2.tip;
      next.modes[k] = FingerMode::Sliding;
      next.slide_dir[k] = dir;
      next.forces[k] = c2.cf;
      if (c2.cf.f_c.dot(c2.cf.normal) <= 0.0) separate(1.0);
      continue;
    }

    // Sliding.
    const int dir = state.slide_dir[k];
    const double fscale = std::max(1e-300, state.forces[k].f_c.norm());
    if (fa.psi(s0, dir) <= 1e-12 * fscale) {
      // Force re-enters the cone: stick where the multiplier crosses zero.
      auto lam = [&](double tau) {
        const SlidingCoefficients c = fa.coeffs(s0, tau);
        return -(c.g_lambda.dot(fa.anchor_velocity()) - c.c_lambda);
      };
      const double tau = lam(1.0) > 0.0 ? first_crossing(lam, opts.event_tol / dt) : 1.0;
      record(state.t + tau * dt, i, FingerMode::Sliding, FingerMode::Sticking);
      const Contact c1 = fa.at(s0, 1.0);
      f.s = s0;
      f.tip = c1.tip;
      next.modes[k] = FingerMode::Sticking;
      next.slide_dir[k] = 0;
      next.forces[k] = c1.cf;
      if (c1.cf.f_c.dot(c1.cf.normal) <= 0.0) separate(1.0);
      continue;
    }
    const SlidingCoefficients c0 = fa.coeffs(s0, 0.0);
    fa.require_stable(c0, state.t);
    const double lambda = std::max(0.0, c0.g_lambda.dot(fa.anchor_velocity()) - c0.c_lambda);
    const Vec2 rel = pose1.rotation().transpose() * (lambda * c0.cf.f_t);
    const double ds = rel.dot(task.boundary.query(s0).tangent) * dt;
    const double s1 = fa.project(s0, dir, s0 + ds);
    const Contact c2 = fa.at(s1, 1.0);
    f.s = s1;
    f.tip = c2.tip;
    next.forces[k] = c2.cf;
    if (c2.cf.f_c.dot(c2.cf.normal) <= 0.0) separate(1.0);
  }
  return next;
}

SimState step(const TaskModel& task, const SimState& state, const std::vector<Vec2>& anchor_velocities,
              const ObjectPose& twist, double dt, const SimOptions& opts, std::vector<ModeEvent>* events) {
  if (anchor_velocities.size() != state.fingers.size())
    throw DomainError("simulator", "one anchor velocity per finger is required");
  AnchorSample target;
  target.hand = state.hand;
  for (std::size_t i = 0; i < state.fingers.size(); ++i)
    target.anchors.push_back(state.fingers[i].anchor + dt * anchor_velocities[i]);
  ObjectPose pose1 = state.pose;
  pose1.linear_velocity = twist.linear_velocity;
  pose1.angular_velocity = twist.angular_velocity;
  pose1.position += dt * twist.linear_velocity;
  pose1.angle += dt * twist.angular_velocity;
  return advance(task, state, target, pose1, dt, opts, events);
}

double balance_margin(const TaskModel& task, const ObjectPose& pose, const std::vector<Vec2>& tips_world,
                      const std::vector<Vec2>& forces) {
  const WrenchCone cone = build_external_cone(task, pose);
  Vec3 wc = Vec3::Zero();
  for (std::size_t i = 0; i < forces.size(); ++i)
    wc += contact_wrench(tips_world[i], forces[i], task.characteristic_length);
  return cone_margin(facet_normals(cone.W), -wc - scaled_gravity(task));
}

namespace {

TraceRow make_row(const TaskModel& task, const SimState& st, const MatX* normals) {
  TraceRow row;
  row.t = st.t;
  row.hand = st.hand;
  row.modes = st.modes;
  Vec3 wc = Vec3::Zero();
  for (std::size_t i = 0; i < st.fingers.size(); ++i) {
    row.anchors.push_back(st.fingers[i].anchor);
    row.tips_body.push_back(task.boundary.query(st.fingers[i].s).position);
    row.forces.push_back(st.forces[i].f_c);
    wc += contact_wrench(st.fingers[i].tip, st.forces[i].f_c, task.characteristic_length);
  }
  row.margin = normals ? cone_margin(*normals, -wc - scaled_gravity(task)) : std::nan("");
  return row;
}

}  // namespace

Trace simulate(const TaskModel& task, const std::vector<FingerSetup>& fingers, const AnchorTrajectory& anchors,
               const ObjectMotion& object, const SimOptions& opts) {
  if (!(opts.dt > 0.0) || !(opts.duration > 0.0) || !(opts.sample_period > 0.0))
    throw DomainError("simulator", "dt, duration and sample period must be positive");
  const double ratio = opts.sample_period / opts.dt;
  const long per_sample = std::lround(ratio);
  if (per_sample < 1 || std::abs(ratio - per_sample) > 1e-9 * ratio)
    throw DomainError("simulator", "dt must divide the sampling period");
  const long samples = static_cast<long>(std::ceil(opts.duration / opts.sample_period - 1e-9));

  task.validate();
  Trace trace;
  SimState st = initial_state(task, fingers, anchors(0.0), object(0.0), opts);
  ObjectPose pose = object(0.0);
  MatX normals;
  bool normals_valid = false;
  for (long k = 1; k <= samples; ++k) {
    for (long j = 1; j <= per_sample; ++j) {
      const double t1 = ((k - 1) * per_sample + j) * opts.dt;
      const ObjectPose pose1 = object(t1);
      st = advance(task, st, anchors(t1), pose1, opts.dt, opts, &trace.events);
      st.t = t1;
      if (pose1.position != pose.position || pose1.angle != pose.angle) normals_valid = false;
      pose = pose1;
    }
    if (opts.compute_margin && !normals_valid) {
      normals = facet_normals(build_external_cone(task, st.pose).W);
      normals_valid = true;
    }
    trace.rows.push_back(make_row(task, st, opts.compute_margin ? &normals : nullptr));
  }
  trace.final_state = st;
  return trace;
}

}  // namespace sslide
