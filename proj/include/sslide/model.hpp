#pragma once

#include <sslide/common.hpp>

#include <vector>

namespace sslide {

struct ObjectPose {
  Vec2 position = Vec2::Zero();
  double angle = 0.0;
  Vec2 linear_velocity = Vec2::Zero();
  double angular_velocity = 0.0;

  Mat2 rotation() const { return rot2(angle); }
  Vec2 to_world(const Vec2& p_body) const { return position + rotation() * p_body; }
  Vec2 to_body(const Vec2& p_world) const { return rotation().transpose() * (p_world - position); }
  bool stationary() const { return linear_velocity.isZero(0.0) && angular_velocity == 0.0; }
};

struct BoundaryPiece {
  enum class Kind { Segment, Arc };
  Kind kind = Kind::Segment;
  // Segment.
  Vec2 start = Vec2::Zero();
  Vec2 end = Vec2::Zero();
  // Arc: angles measured at the center; end_angle < start_angle runs clockwise.
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  double start_angle = 0.0;
  double end_angle = 0.0;
  // Interior lies to the left of the direction of travel.
  bool interior_left = true;

  static BoundaryPiece segment(const Vec2& a, const Vec2& b);
  static BoundaryPiece arc(const Vec2& c, double r, double a0, double a1);

  double length() const;
  Vec2 start_point() const;
  Vec2 end_point() const;
  Vec2 point_at(double u) const;    // u is arclength from the start
  Vec2 tangent_at(double u) const;  // unit, direction of travel
};

struct SurfacePoint {
  Vec2 position;
  Vec2 normal;      // unit, pointing into the object
  Vec2 tangent;     // unit, increasing s
  Mat2 normal_jac;  // d n / d p restricted to the surface
  int piece = 0;
};

class Boundary {
 public:
  Boundary() = default;
  explicit Boundary(std::vector<BoundaryPiece> pieces, double tol = 1e-9);

  const std::vector<BoundaryPiece>& pieces() const { return pieces_; }
  double length() const { return offsets_.empty() ? 0.0 : offsets_.back(); }
  double piece_start(int i) const { return offsets_[i]; }
  double piece_end(int i) const { return offsets_[i + 1]; }
  int piece_index(double s) const;

  SurfacePoint query(double s) const;
  // Closest boundary parameter to a point (exact per piece).
  double project(const Vec2& p) const;
  // Distance from a point to the boundary curve.
  double distance(const Vec2& p) const;
  // Parameter on piece i where the body y coordinate equals y.
  double locate_height(int piece, double y) const;

 private:
  std::vector<BoundaryPiece> pieces_;
  std::vector<double> offsets_;
};

struct EnvContact {
  Vec2 position = Vec2::Zero();  // body frame
  Vec2 normal = Vec2(0.0, 1.0);  // body frame, into the object
  bool sliding = false;
  Vec2 sliding_direction = Vec2::Zero();  // object motion relative to the environment
};

struct TaskModel {
  Boundary boundary;
  std::vector<EnvContact> env_contacts;
  double mu = 0.0;
  double mu_e = 0.0;
  Vec3 gravity_wrench = Vec3::Zero();  // [tau_z (N m), f_x, f_y], unscaled
  double characteristic_length = 1.0;
  int cone_edges = 8;

  void validate() const;
};

SurfacePoint surface_query(const TaskModel& task, double s);

Vec2 body_to_world_velocity(const ObjectPose& pose, const Vec2& p_body, const Vec2& v_body);

}  // namespace sslide
