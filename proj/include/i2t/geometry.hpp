#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "i2t/rng.hpp"

namespace i2t {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm_sq() const { return dot(*this); }
  double norm() const { return std::sqrt(norm_sq()); }
  Vec3 normalized() const {
    double n = norm();
    return n > 0.0 ? *this / n : Vec3{0, 0, 0};
  }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Row-major 3x3 matrix; only what rigid poses need.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  static Mat3 from_columns(const Vec3& cx, const Vec3& cy, const Vec3& cz) {
    return {{cx.x, cy.x, cz.x, cx.y, cy.y, cz.y, cx.z, cy.z, cz.z}};
  }
  static Mat3 axis_angle(const Vec3& axis, double angle);

  double operator()(int r, int c) const { return m[3 * r + c]; }
  double& operator()(int r, int c) { return m[3 * r + c]; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  // transpose(this) * v, used for inverse rotations without forming the transpose.
  Vec3 tmul(const Vec3& v) const {
    return {m[0] * v.x + m[3] * v.y + m[6] * v.z, m[1] * v.x + m[4] * v.y + m[7] * v.z,
            m[2] * v.x + m[5] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3& o) const;
  Mat3 transposed() const {
    return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
  }
  double det() const;
};

// Rigid pose: orthonormal rotation (det +1) plus translation in meters.
struct RigidTransform {
  Mat3 rotation = Mat3::identity();
  Vec3 translation{};

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 rotate(const Vec3& v) const { return rotation * v; }
  // Inverse pose applied to a point: R^T (p - t).
  Vec3 apply_inverse(const Vec3& p) const { return rotation.tmul(p - translation); }
  Vec3 rotate_inverse(const Vec3& v) const { return rotation.tmul(v); }

  RigidTransform inverse() const {
    Mat3 rt = rotation.transposed();
    return {rt, -(rt * translation)};
  }
  // (a * b)(p) = a(b(p))
  RigidTransform operator*(const RigidTransform& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }
  // Orthonormality with det +1 within tol.
  bool is_rigid(double tol = 1e-9) const;
};

enum class PrimitiveKind { Sphere, Box, Cylinder, Cone, TriangularPrism };

// One geometric primitive with a local pose. All size parameters are in
// meters and strictly positive. Construct through the factories, which
// validate.
//
// Parameter layout:
//   Sphere:          radius
//   Box:             half-extents hx, hy, hz
//   Cylinder:        radius, half-height (axis z)
//   Cone:            base radius, height (base at z=0, apex at z=+h)
//   TriangularPrism: edge (equilateral cross-section in xy), half-length (z)
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Sphere;
  std::array<double, 3> params{1, 0, 0};
  RigidTransform local_pose;

  static Primitive sphere(double radius, const RigidTransform& pose = {});
  static Primitive box(double hx, double hy, double hz, const RigidTransform& pose = {});
  static Primitive cylinder(double radius, double half_height, const RigidTransform& pose = {});
  static Primitive cone(double radius, double height, const RigidTransform& pose = {});
  static Primitive triangular_prism(double edge, double half_length,
                                    const RigidTransform& pose = {});

  // Exact signed distance in the primitive's own frame.
  double sdf_local(const Vec3& p) const;
  // Exact nearest point on the primitive's boundary, own frame.
  Vec3 nearest_local(const Vec3& p) const;
  double surface_area() const;
};

// Named union of posed primitives. The composite SDF is the min over parts.
struct ObjectModel {
  std::string name;
  std::vector<Primitive> parts;
  RigidTransform base_pose;
};

// Signed distance to the composite: negative inside, positive outside.
double sdf(const ObjectModel& object, const Vec3& p);

struct NearestResult {
  Vec3 point;       // on the union surface, |sdf| < 1e-6
  double distance;  // |p - point|
};
NearestResult nearest_surface_point(const ObjectModel& object, const Vec3& p);

// Outward unit normal from the central-difference SDF gradient (step 1e-6 m).
// Throws ValidationError("ambiguous normal") when the gradient degenerates.
Vec3 surface_normal(const ObjectModel& object, const Vec3& q);

// Sphere tracing along origin + t*dir, t in (0, t_max]. dir must be unit
// length. At most 256 steps; a ray that does not converge is a miss.
std::optional<double> raycast(const ObjectModel& object, const Vec3& origin, const Vec3& dir,
                              double t_max);

struct SurfaceSample {
  Vec3 point;
  Vec3 normal;
};
// Approximately area-uniform sample of the union surface: parts weighted by
// full surface area, then analytic per-part sampling with rejection of points
// buried inside another part.
SurfaceSample sample_surface_point(const ObjectModel& object, Rng& rng);

}  // namespace i2t
