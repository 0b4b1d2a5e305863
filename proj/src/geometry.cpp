#include "i2t/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "i2t/errors.hpp"

namespace i2t {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSurfaceEps = 1e-6;   // sphere-tracing hit threshold
constexpr double kNormalStep = 1e-6;   // central-difference step for normals

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

Vec2 seg_nearest(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double t = (p - a).dot(ab) / ab.dot(ab);
  t = std::clamp(t, 0.0, 1.0);
  return a + ab * t;
}

double cross2(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// Equilateral triangle cross-section of a prism with edge e, centered at the
// centroid, one vertex up the +y axis.
std::array<Vec2, 3> prism_triangle(double edge) {
  const double r = edge / std::sqrt(3.0);  // circumradius
  return {Vec2{0.0, r}, Vec2{-edge / 2.0, -r / 2.0}, Vec2{edge / 2.0, -r / 2.0}};
}

bool tri_inside(const Vec2& p, const std::array<Vec2, 3>& v) {
  double s0 = cross2(v[1] - v[0], p - v[0]);
  double s1 = cross2(v[2] - v[1], p - v[1]);
  double s2 = cross2(v[0] - v[2], p - v[2]);
  bool any_neg = s0 < 0 || s1 < 0 || s2 < 0;
  bool any_pos = s0 > 0 || s1 > 0 || s2 > 0;
  return !(any_neg && any_pos);
}

Vec2 tri_nearest_boundary(const Vec2& p, const std::array<Vec2, 3>& v) {
  Vec2 best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    Vec2 q = seg_nearest(p, v[i], v[(i + 1) % 3]);
    double d = (p - q).norm();
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

double tri_signed_distance(const Vec2& p, const std::array<Vec2, 3>& v) {
  double d = (p - tri_nearest_boundary(p, v)).norm();
  return tri_inside(p, v) ? -d : d;
}

// Radial decomposition for solids of revolution about z.
struct RadialFrame {
  double rho;
  Vec2 dir;  // unit radial direction in xy, (1,0) on the axis
};

RadialFrame radial(const Vec3& p) {
  double rho = std::hypot(p.x, p.y);
  if (rho > 1e-300) return {rho, {p.x / rho, p.y / rho}};
  return {0.0, {1.0, 0.0}};
}

}  // namespace

Mat3 Mat3::axis_angle(const Vec3& axis, double angle) {
  Vec3 a = axis.normalized();
  double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return {{t * a.x * a.x + c, t * a.x * a.y - s * a.z, t * a.x * a.z + s * a.y,
           t * a.x * a.y + s * a.z, t * a.y * a.y + c, t * a.y * a.z - s * a.x,
           t * a.x * a.z - s * a.y, t * a.y * a.z + s * a.x, t * a.z * a.z + c}};
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) + (*this)(i, 2) * o(2, j);
  return r;
}

double Mat3::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

bool RigidTransform::is_rigid(double tol) const {
  if (!translation.finite()) return false;
  Mat3 rtr = rotation.transposed() * rotation;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double want = i == j ? 1.0 : 0.0;
      if (std::abs(rtr(i, j) - want) > tol) return false;
    }
  return std::abs(rotation.det() - 1.0) <= tol;
}

namespace {

void require_positive(std::initializer_list<double> vals, const char* what) {
  for (double v : vals)
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be > 0");
}

void require_rigid(const RigidTransform& pose) {
  if (!pose.is_rigid()) throw ValidationError("primitive pose is not a rigid transform");
}

}  // namespace

Primitive Primitive::sphere(double radius, const RigidTransform& pose) {
  require_positive({radius}, "sphere radius");
  require_rigid(pose);
  return {PrimitiveKind::Sphere, {radius, 0, 0}, pose};
}

Primitive Primitive::box(double hx, double hy, double hz, const RigidTransform& pose) {
  require_positive({hx, hy, hz}, "box half-extent");
  require_rigid(pose);
  return {PrimitiveKind::Box, {hx, hy, hz}, pose};
}

Primitive Primitive::cylinder(double radius, double half_height, const RigidTransform& pose) {
  require_positive({radius, half_height}, "cylinder size");
  require_rigid(pose);
  return {PrimitiveKind::Cylinder, {radius, half_height, 0}, pose};
}

Primitive Primitive::cone(double radius, double height, const RigidTransform& pose) {
  require_positive({radius, height}, "cone size");
  require_rigid(pose);
  return {PrimitiveKind::Cone, {radius, height, 0}, pose};
}

Primitive Primitive::triangular_prism(double edge, double half_length,
                                      const RigidTransform& pose) {
  require_positive({edge, half_length}, "prism size");
  require_rigid(pose);
  return {PrimitiveKind::TriangularPrism, {edge, half_length, 0}, pose};
}

double Primitive::sdf_local(const Vec3& p) const {
  switch (kind) {
    case PrimitiveKind::Sphere:
      return p.norm() - params[0];
    case PrimitiveKind::Box: {
      Vec3 q{std::abs(p.x) - params[0], std::abs(p.y) - params[1], std::abs(p.z) - params[2]};
      Vec3 qp{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
      return qp.norm() + std::min(std::max({q.x, q.y, q.z}), 0.0);
    }
    case PrimitiveKind::Cylinder: {
      RadialFrame rf = radial(p);
      double dx = rf.rho - params[0];
      double dz = std::abs(p.z) - params[1];
      double ox = std::max(dx, 0.0), oz = std::max(dz, 0.0);
      return std::min(std::max(dx, dz), 0.0) + std::hypot(ox, oz);
    }
    case PrimitiveKind::Cone: {
      // Exact distance of the revolved triangle (0,0)-(r,0)-(0,h) in the
      // (rho, z) half-plane; only the base and slant edges are surface.
      RadialFrame rf = radial(p);
      const double r = params[0], h = params[1];
      Vec2 q{rf.rho, p.z};
      Vec2 a = seg_nearest(q, {0.0, 0.0}, {r, 0.0});
      Vec2 b = seg_nearest(q, {r, 0.0}, {0.0, h});
      double d = std::min((q - a).norm(), (q - b).norm());
      bool inside = p.z >= 0.0 && rf.rho / r + p.z / h <= 1.0;
      return inside ? -d : d;
    }
    case PrimitiveKind::TriangularPrism: {
      double d2 = tri_signed_distance({p.x, p.y}, prism_triangle(params[0]));
      double dz = std::abs(p.z) - params[1];
      double ox = std::max(d2, 0.0), oz = std::max(dz, 0.0);
      return std::min(std::max(d2, dz), 0.0) + std::hypot(ox, oz);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Vec3 Primitive::nearest_local(const Vec3& p) const {
  switch (kind) {
    case PrimitiveKind::Sphere: {
      double n = p.norm();
      if (n < 1e-300) return {params[0], 0.0, 0.0};
      return p * (params[0] / n);
    }
    case PrimitiveKind::Box: {
      const Vec3 h{params[0], params[1], params[2]};
      bool inside = std::abs(p.x) <= h.x && std::abs(p.y) <= h.y && std::abs(p.z) <= h.z;
      if (!inside)
        return {std::clamp(p.x, -h.x, h.x), std::clamp(p.y, -h.y, h.y),
                std::clamp(p.z, -h.z, h.z)};
      // Snap to the closest face from inside.
      double mx = h.x - std::abs(p.x), my = h.y - std::abs(p.y), mz = h.z - std::abs(p.z);
      Vec3 q = p;
      if (mx <= my && mx <= mz)
        q.x = p.x >= 0 ? h.x : -h.x;
      else if (my <= mz)
        q.y = p.y >= 0 ? h.y : -h.y;
      else
        q.z = p.z >= 0 ? h.z : -h.z;
      return q;
    }
    case PrimitiveKind::Cylinder: {
      RadialFrame rf = radial(p);
      const double r = params[0], hh = params[1];
      Vec2 q{rf.rho, p.z};
      Vec2 side{r, std::clamp(p.z, -hh, hh)};
      Vec2 top{std::clamp(rf.rho, 0.0, r), hh};
      Vec2 bot{std::clamp(rf.rho, 0.0, r), -hh};
      Vec2 best = side;
      for (const Vec2& c : {top, bot})
        if ((q - c).norm() < (q - best).norm()) best = c;
      return {rf.dir.x * best.x, rf.dir.y * best.x, best.y};
    }
    case PrimitiveKind::Cone: {
      RadialFrame rf = radial(p);
      const double r = params[0], h = params[1];
      Vec2 q{rf.rho, p.z};
      Vec2 a = seg_nearest(q, {0.0, 0.0}, {r, 0.0});
      Vec2 b = seg_nearest(q, {r, 0.0}, {0.0, h});
      Vec2 best = (q - a).norm() <= (q - b).norm() ? a : b;
      return {rf.dir.x * best.x, rf.dir.y * best.x, best.y};
    }
    case PrimitiveKind::TriangularPrism: {
      const auto tri = prism_triangle(params[0]);
      const double hl = params[1];
      Vec2 p2{p.x, p.y};
      Vec2 on_edge = tri_nearest_boundary(p2, tri);
      bool in_tri = tri_inside(p2, tri);
      Vec2 cap_xy = in_tri ? p2 : on_edge;
      double cap_z = p.z >= 0 ? hl : -hl;
      Vec3 side{on_edge.x, on_edge.y, std::clamp(p.z, -hl, hl)};
      Vec3 cap{cap_xy.x, cap_xy.y, cap_z};
      return (p - side).norm() <= (p - cap).norm() ? side : cap;
    }
  }
  return {};
}

double Primitive::surface_area() const {
  switch (kind) {
    case PrimitiveKind::Sphere:
      return 4.0 * kPi * params[0] * params[0];
    case PrimitiveKind::Box:
      return 8.0 * (params[0] * params[1] + params[1] * params[2] + params[0] * params[2]);
    case PrimitiveKind::Cylinder:
      return 2.0 * kPi * params[0] * (2.0 * params[1]) + 2.0 * kPi * params[0] * params[0];
    case PrimitiveKind::Cone: {
      double slant = std::hypot(params[0], params[1]);
      return kPi * params[0] * params[0] + kPi * params[0] * slant;
    }
    case PrimitiveKind::TriangularPrism: {
      double e = params[0];
      double caps = 2.0 * (std::sqrt(3.0) / 4.0) * e * e;
      return caps + 3.0 * e * 2.0 * params[1];
    }
  }
  return 0.0;
}

double sdf(const ObjectModel& object, const Vec3& p) {
  Vec3 pb = object.base_pose.apply_inverse(p);
  double best = std::numeric_limits<double>::infinity();
  for (const Primitive& part : object.parts) {
    double d = part.sdf_local(part.local_pose.apply_inverse(pb));
    if (d < best) best = d;
  }
  return best;
}

namespace {

Vec3 sdf_gradient(const ObjectModel& object, const Vec3& q, double h) {
  auto f = [&](double dx, double dy, double dz) { return sdf(object, {q.x + dx, q.y + dy, q.z + dz}); };
  return {(f(h, 0, 0) - f(-h, 0, 0)) / (2 * h), (f(0, h, 0) - f(0, -h, 0)) / (2 * h),
          (f(0, 0, h) - f(0, 0, -h)) / (2 * h)};
}

// Newton-style projection onto the zero level set.
Vec3 project_to_surface(const ObjectModel& object, Vec3 q, int iters = 4) {
  for (int i = 0; i < iters; ++i) {
    double d = sdf(object, q);
    if (std::abs(d) < 1e-12) break;
    Vec3 g = sdf_gradient(object, q, kNormalStep);
    double gn = g.norm();
    if (gn < 1e-9) break;
    q = q - g * (d / (gn * gn));
  }
  return q;
}

// Local descent of |q - p| constrained to the union surface.
Vec3 slide_to_nearest(const ObjectModel& object, const Vec3& p, Vec3 q) {
  q = project_to_surface(object, q);
  double best = (q - p).norm();
  double step = 2e-3;
  for (int it = 0; it < 80 && step > 1e-8; ++it) {
    Vec3 g = sdf_gradient(object, q, kNormalStep);
    double gn = g.norm();
    if (gn < 1e-9) break;
    g = g / gn;
    Vec3 v = q - p;
    Vec3 vt = v - g * v.dot(g);
    double vtn = vt.norm();
    if (vtn < 1e-10) break;
    Vec3 cand = project_to_surface(object, q - vt * (std::min(step, vtn) / vtn), 2);
    double cd = (cand - p).norm();
    if (cd < best - 1e-13) {
      q = cand;
      best = cd;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return project_to_surface(object, q);
}

// First boundary crossing of the union along p + t*dir, by marching then
// bisection. Returns nullopt when no sign change is found within t_limit.
std::optional<Vec3> march_to_boundary(const ObjectModel& object, const Vec3& p, const Vec3& dir,
                                      double t_limit) {
  const double step = 5e-4;
  double prev_t = 0.0;
  double prev_d = sdf(object, p);
  for (double t = step; t <= t_limit; t += step) {
    double d = sdf(object, p + dir * t);
    if ((prev_d < 0.0) != (d < 0.0)) {
      double lo = prev_t, hi = t;
      for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        if ((sdf(object, p + dir * mid) < 0.0) == (prev_d < 0.0))
          lo = mid;
        else
          hi = mid;
      }
      return p + dir * (0.5 * (lo + hi));
    }
    prev_t = t;
    prev_d = d;
  }
  return std::nullopt;
}

const std::vector<Vec3>& probe_directions() {
  static const std::vector<Vec3> dirs = [] {
    std::vector<Vec3> v;
    for (int x = -1; x <= 1; ++x)
      for (int y = -1; y <= 1; ++y)
        for (int z = -1; z <= 1; ++z) {
          if (x == 0 && y == 0 && z == 0) continue;
          v.push_back(Vec3{double(x), double(y), double(z)}.normalized());
        }
    return v;
  }();
  return dirs;
}

}  // namespace

NearestResult nearest_surface_point(const ObjectModel& object, const Vec3& p) {
  if (object.parts.empty()) throw ValidationError("object has no parts");
  Vec3 pb = object.base_pose.apply_inverse(p);

  std::vector<Vec3> part_candidates;
  part_candidates.reserve(object.parts.size());
  for (const Primitive& part : object.parts) {
    Vec3 pl = part.local_pose.apply_inverse(pb);
    Vec3 ql = part.nearest_local(pl);
    part_candidates.push_back(object.base_pose.apply(part.local_pose.apply(ql)));
  }

  auto closer = [&](const Vec3& a, const Vec3& b) { return (a - p).norm() < (b - p).norm(); };

  if (sdf(object, p) >= 0.0) {
    // Outside the union the closest per-part point is on the union surface:
    // if it were buried in another part, that part would be strictly closer.
    Vec3 q = *std::min_element(part_candidates.begin(), part_candidates.end(), closer);
    return {q, (q - p).norm()};
  }

  // Interior point. Per-part candidates may be buried inside a sibling part,
  // so polish every seed with a constrained slide and add ray probes to cover
  // overlap pockets.
  std::vector<Vec3> seeds = part_candidates;
  for (const Vec3& dir : probe_directions())
    if (auto hit = march_to_boundary(object, p, dir, 0.5)) seeds.push_back(*hit);

  Vec3 best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (const Vec3& seed : seeds) {
    Vec3 q = slide_to_nearest(object, p, seed);
    if (std::abs(sdf(object, q)) > 1e-6) continue;
    double d = (q - p).norm();
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  if (!std::isfinite(best_d)) {
    // Degenerate fallback: keep the best raw candidate.
    best = *std::min_element(part_candidates.begin(), part_candidates.end(), closer);
    best_d = (best - p).norm();
  }
  return {best, best_d};
}

Vec3 surface_normal(const ObjectModel& object, const Vec3& q) {
  Vec3 g = sdf_gradient(object, q, kNormalStep);
  double n = g.norm();
  if (n < 1e-9) throw ValidationError("ambiguous normal");
  return g / n;
}

std::optional<double> raycast(const ObjectModel& object, const Vec3& origin, const Vec3& dir,
                              double t_max) {
  if (!(t_max > 0.0)) throw ValidationError("raycast t_max must be > 0");
  double t = 0.0;
  for (int step = 0; step < 256; ++step) {
    double d = sdf(object, origin + dir * t);
    if (std::abs(d) < kSurfaceEps && t > 0.0) {
      // Polish: keep stepping while it stays a forward step within range.
      for (int i = 0; i < 8 && d > 1e-12 && t + d <= t_max; ++i) {
        t += d;
        d = sdf(object, origin + dir * t);
      }
      return t;
    }
    t += std::max(d, 1e-7);
    if (t > t_max) return std::nullopt;
  }
  return std::nullopt;
}

namespace {

Vec3 sample_on_primitive(const Primitive& prim, Rng& rng) {
  switch (prim.kind) {
    case PrimitiveKind::Sphere: {
      double z = rng.uniform(-1.0, 1.0);
      double phi = rng.uniform(0.0, 2.0 * kPi);
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      return Vec3{rho * std::cos(phi), rho * std::sin(phi), z} * prim.params[0];
    }
    case PrimitiveKind::Box: {
      const double hx = prim.params[0], hy = prim.params[1], hz = prim.params[2];
      const double ayz = hy * hz, axz = hx * hz, axy = hx * hy;  // quarter-face areas
      double pick = rng.uniform(0.0, ayz + axz + axy);
      double u = rng.uniform(-1.0, 1.0), v = rng.uniform(-1.0, 1.0);
      double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
      if (pick < ayz) return {side * hx, u * hy, v * hz};
      if (pick < ayz + axz) return {u * hx, side * hy, v * hz};
      return {u * hx, v * hy, side * hz};
    }
    case PrimitiveKind::Cylinder: {
      const double r = prim.params[0], hh = prim.params[1];
      double a_side = 2.0 * kPi * r * 2.0 * hh;
      double a_cap = kPi * r * r;
      double pick = rng.uniform(0.0, a_side + 2.0 * a_cap);
      double phi = rng.uniform(0.0, 2.0 * kPi);
      if (pick < a_side) {
        double z = rng.uniform(-hh, hh);
        return {r * std::cos(phi), r * std::sin(phi), z};
      }
      double rho = r * std::sqrt(rng.uniform());
      double z = pick < a_side + a_cap ? hh : -hh;
      return {rho * std::cos(phi), rho * std::sin(phi), z};
    }
    case PrimitiveKind::Cone: {
      const double r = prim.params[0], h = prim.params[1];
      double a_base = kPi * r * r;
      double a_slant = kPi * r * std::hypot(r, h);
      double pick = rng.uniform(0.0, a_base + a_slant);
      double phi = rng.uniform(0.0, 2.0 * kPi);
      if (pick < a_base) {
        double rho = r * std::sqrt(rng.uniform());
        return {rho * std::cos(phi), rho * std::sin(phi), 0.0};
      }
      // Slant area density per unit z falls linearly toward the apex.
      double z = h * (1.0 - std::sqrt(rng.uniform()));
      double rho = r * (1.0 - z / h);
      return {rho * std::cos(phi), rho * std::sin(phi), z};
    }
    case PrimitiveKind::TriangularPrism: {
      const double e = prim.params[0], hl = prim.params[1];
      const auto tri = prism_triangle(e);
      double a_cap = (std::sqrt(3.0) / 4.0) * e * e;
      double a_side = e * 2.0 * hl;
      double pick = rng.uniform(0.0, 2.0 * a_cap + 3.0 * a_side);
      if (pick < 2.0 * a_cap) {
        double u = rng.uniform(), v = rng.uniform();
        if (u + v > 1.0) {
          u = 1.0 - u;
          v = 1.0 - v;
        }
        Vec2 p2 = tri[0] + (tri[1] - tri[0]) * u + (tri[2] - tri[0]) * v;
        double z = pick < a_cap ? hl : -hl;
        return {p2.x, p2.y, z};
      }
      int edge = static_cast<int>((pick - 2.0 * a_cap) / a_side);
      edge = std::min(edge, 2);
      Vec2 a = tri[edge], b = tri[(edge + 1) % 3];
      double u = rng.uniform();
      Vec2 p2 = a + (b - a) * u;
      return {p2.x, p2.y, rng.uniform(-hl, hl)};
    }
  }
  return {};
}

}  // namespace

SurfaceSample sample_surface_point(const ObjectModel& object, Rng& rng) {
  if (object.parts.empty()) throw ValidationError("object has no parts");
  std::vector<double> cumulative;
  cumulative.reserve(object.parts.size());
  double total = 0.0;
  for (const Primitive& part : object.parts) {
    total += part.surface_area();
    cumulative.push_back(total);
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    double pick = rng.uniform(0.0, total);
    std::size_t idx = std::lower_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin();
    if (idx >= object.parts.size()) idx = object.parts.size() - 1;
    const Primitive& part = object.parts[idx];
    Vec3 ql = sample_on_primitive(part, rng);
    Vec3 q = object.base_pose.apply(part.local_pose.apply(ql));
    if (sdf(object, q) < -1e-9) continue;  // buried inside a sibling part
    Vec3 n;
    try {
      n = surface_normal(object, q);
    } catch (const ValidationError&) {
      continue;  // seam point with a degenerate gradient
    }
    return {q, n};
  }
  throw ValidationError("surface sampling failed to find a union-surface point");
}

}  // namespace i2t
