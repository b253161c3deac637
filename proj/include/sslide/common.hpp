#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sslide {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;
template <int Dim>
using Mat = Eigen::Matrix<double, Dim, Dim>;

// Base for all library errors.  The message is prefixed with the module name.
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

// Violated precondition or out-of-range argument.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Jacobian or linear system is singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Fingertip left the boundary or a geometric construction failed.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Planner could not find a feasible plan or validation failed.
class PlanningError : public Error {
 public:
  using Error::Error;
};

// Numerical solver failure (iteration cap and similar).
class SolverError : public Error {
 public:
  using Error::Error;
};

enum class Degeneracy { None, TypeI, TypeII };

const char* to_string(Degeneracy d);

class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& module, Degeneracy type, const std::string& what)
      : Error(module, what), type_(type) {}
  Degeneracy type() const { return type_; }

 private:
  Degeneracy type_;
};

// Planar helpers.
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }
inline Mat2 rot2(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

}  // namespace sslide
