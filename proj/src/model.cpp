#include <sslide/model.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sslide {

const char* to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::None: return "none";
    case Degeneracy::TypeI: return "type_I";
    case Degeneracy::TypeII: return "type_II";
  }
  return "unknown";
}

BoundaryPiece BoundaryPiece::segment(const Vec2& a, const Vec2& b) {
  BoundaryPiece p;
  p.kind = Kind::Segment;
  p.start = a;
  p.end = b;
  return p;
}

BoundaryPiece BoundaryPiece::arc(const Vec2& c, double r, double a0, double a1) {
  BoundaryPiece p;
  p.kind = Kind::Arc;
  p.center = c;
  p.radius = r;
  p.start_angle = a0;
  p.end_angle = a1;
  return p;
}

double BoundaryPiece::length() const {
  if (kind == Kind::Segment) return (end - start).norm();
  return radius * std::abs(end_angle - start_angle);
}

Vec2 BoundaryPiece::start_point() const { return point_at(0.0); }
Vec2 BoundaryPiece::end_point() const { return point_at(length()); }

Vec2 BoundaryPiece::point_at(double u) const {
  if (kind == Kind::Segment) {
    const double len = length();
    return len > 0.0 ? Vec2(start + (end - start) * (u / len)) : start;
  }
  const double dir = end_angle >= start_angle ? 1.0 : -1.0;
  const double a = start_angle + dir * u / radius;
  return center + radius * Vec2(std::cos(a), std::sin(a));
}

Vec2 BoundaryPiece::tangent_at(double u) const {
  if (kind == Kind::Segment) return (end - start).normalized();
  const double dir = end_angle >= start_angle ? 1.0 : -1.0;
  const double a = start_angle + dir * u / radius;
  return dir * Vec2(-std::sin(a), std::cos(a));
}

Boundary::Boundary(std::vector<BoundaryPiece> pieces, double tol) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw DomainError("model", "boundary has no pieces");
  offsets_.assign(1, 0.0);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (p.kind == BoundaryPiece::Kind::Arc && !(p.radius > 0.0))
      throw DomainError("model", "arc radius must be positive (piece " + std::to_string(i) + ")");
    if (!(p.length() > 0.0))
      throw DomainError("model", "boundary piece " + std::to_string(i) + " has zero length");
    const auto& next = pieces_[(i + 1) % pieces_.size()];
    if ((p.end_point() - next.start_point()).norm() > tol)
      throw DomainError("model", "boundary pieces " + std::to_string(i) + " and " +
                                     std::to_string((i + 1) % pieces_.size()) + " do not share an endpoint");
    offsets_.push_back(offsets_.back() + p.length());
  }
}

int Boundary::piece_index(double s) const {
  const double slack = 1e-12 * std::max(1.0, length());
  if (!(s >= -slack && s <= length() + slack))
    throw DomainError("model", "boundary parameter " + std::to_string(s) + " outside [0, " +
                                   std::to_string(length()) + "]");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), s);
  int i = static_cast<int>(it - offsets_.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(pieces_.size()) - 1);
}

SurfacePoint Boundary::query(double s) const {
  const int i = piece_index(s);
  const auto& piece = pieces_[i];
  const double u = std::clamp(s - offsets_[i], 0.0, piece.length());
  SurfacePoint sp;
  sp.piece = i;
  sp.position = piece.point_at(u);
  sp.tangent = piece.tangent_at(u);
  const double side = piece.interior_left ? 1.0 : -1.0;
  sp.normal = side * perp(sp.tangent);
  if (piece.kind == BoundaryPiece::Kind::Segment) {
    sp.normal_jac.setZero();
  } else {
    const double turn = (piece.end_angle >= piece.start_angle ? 1.0 : -1.0) / piece.radius;
    sp.normal_jac = -side * turn * sp.tangent * sp.tangent.transpose();
  }
  return sp;
}

namespace {

double closest_on_piece(const BoundaryPiece& p, const Vec2& q) {
  if (p.kind == BoundaryPiece::Kind::Segment) {
    const Vec2 d = p.end - p.start;
    const double t = std::clamp((q - p.start).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return t * d.norm();
  }
  const double len = p.length();
  const double dir = p.end_angle >= p.start_angle ? 1.0 : -1.0;
  const Vec2 r = q - p.center;
  double a = std::atan2(r.y(), r.x());
  // Bring the angle into the piece's span measured from start_angle.
  double rel = dir * (a - p.start_angle);
  rel = std::fmod(rel, 2.0 * M_PI);
  if (rel < 0.0) rel += 2.0 * M_PI;
  const double span = std::abs(p.end_angle - p.start_angle);
  if (rel <= span) return rel * p.radius;
  // Outside the span: pick the nearer endpoint.
  return (q - p.start_point()).norm() <= (q - p.end_point()).norm() ? 0.0 : len;
}

}  // namespace

double Boundary::project(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double u = closest_on_piece(pieces_[i], p);
    const double d = (pieces_[i].point_at(u) - p).norm();
    if (d < best) {
      best = d;
      best_s = offsets_[i] + u;
    }
  }
  return best_s;
}

double Boundary::distance(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces_)
    best = std::min(best, (piece.point_at(closest_on_piece(piece, p)) - p).norm());
  return best;
}

double Boundary::locate_height(int piece, double y) const {
  if (piece < 0 || piece >= static_cast<int>(pieces_.size()))
    throw DomainError("model", "face piece index out of range");
  const auto& p = pieces_[piece];
  double lo = 0.0, hi = p.length();
  double flo = p.point_at(lo).y() - y, fhi = p.point_at(hi).y() - y;
  if (flo == 0.0) return offsets_[piece];
  if (fhi == 0.0) return offsets_[piece] + hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw DomainError("model", "height " + std::to_string(y) + " not spanned by piece " + std::to_string(piece));
  for (int it = 0; it < 200 && hi - lo > 1e-15 * p.length(); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = p.point_at(mid).y() - y;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return offsets_[piece] + 0.5 * (lo + hi);
}

void TaskModel::validate() const {
  if (!(mu >= 0.0)) throw DomainError("model", "mu must be nonnegative");
  if (!(mu_e >= 0.0)) throw DomainError("model", "mu_e must be nonnegative");
  if (!(characteristic_length > 0.0)) throw DomainError("model", "characteristic_length must be positive");
  if (env_contacts.empty()) throw DomainError("model", "at least one environmental contact is required");
  if (boundary.pieces().empty()) throw DomainError("model", "boundary is empty");
  if (cone_edges < 3) throw DomainError("model", "cone_edges must be at least 3");
}

SurfacePoint surface_query(const TaskModel& task, double s) { return task.boundary.query(s); }

Vec2 body_to_world_velocity(const ObjectPose& pose, const Vec2& p_body, const Vec2& v_body) {
  const Mat2 r = pose.rotation();
  return pose.linear_velocity + pose.angular_velocity * perp(r * p_body) + r * v_body;
}

}  // namespace sslide
