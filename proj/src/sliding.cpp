#include <sslide/sliding.hpp>

namespace sslide {

Vec2 sticking_velocity(const ObjectPose& pose, const Vec2& p_body) {
  return pose.linear_velocity + pose.angular_velocity * perp(pose.rotation() * p_body);
}

SlidingInputs<2> sliding_inputs(const TaskModel& task, const ObjectPose& pose, const FingerState& finger,
                                const ContactForce& cf) {
  const SurfacePoint sp = surface_query(task, finger.s);
  SlidingInputs<2> in;
  in.cf = cf;
  in.mu = task.mu;
  in.rotation = pose.rotation();
  in.normal_jac = sp.normal_jac;
  in.drift = sticking_velocity(pose, sp.position);
  in.normal_drift = pose.angular_velocity * perp(cf.normal);
  in.stiffness = finger.stiffness.stiffness(finger.tip, finger.anchor);
  in.tip_jacobian = finger.stiffness.tip_jacobian(finger.tip, finger.anchor, finger.rest_offset);
  in.sigma_rate = finger.stiffness.sigma_force_rate(finger.tip, finger.anchor, finger.rest_offset);
  return in;
}

SlidingCoefficients coefficients(const TaskModel& task, const ObjectPose& pose, const FingerState& finger,
                                 const ContactForce& cf, const Vec2& anchor_velocity) {
  return compute_coefficients<2>(sliding_inputs(task, pose, finger, cf), anchor_velocity);
}

}  // namespace sslide
