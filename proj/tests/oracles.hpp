// Test-side reference implementations, written independently of the library
// code paths they check: surface point clouds come from textbook parametric
// samplers driven by std:: distributions, and ray/normal references are
// closed-form.
#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "i2t/geometry.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// Area-weighted random point on the boundary of one primitive, local frame.
inline i2t::Vec3 primitive_surface_point(const i2t::Primitive& prim, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  using K = i2t::PrimitiveKind;
  switch (prim.kind) {
    case K::Sphere: {
      std::normal_distribution<double> gauss(0.0, 1.0);
      double x = gauss(gen), y = gauss(gen), z = gauss(gen);
      double n = std::sqrt(x * x + y * y + z * z);
      if (n < 1e-12) return {prim.params[0], 0, 0};
      return i2t::Vec3{x, y, z} * (prim.params[0] / n);
    }
    case K::Box: {
      double hx = prim.params[0], hy = prim.params[1], hz = prim.params[2];
      double a[3] = {hy * hz, hx * hz, hx * hy};
      double pick = uni(gen) * (a[0] + a[1] + a[2]);
      int axis = pick < a[0] ? 0 : (pick < a[0] + a[1] ? 1 : 2);
      double sign = uni(gen) < 0.5 ? -1.0 : 1.0;
      double u = (2.0 * uni(gen) - 1.0), v = (2.0 * uni(gen) - 1.0);
      if (axis == 0) return {sign * hx, u * hy, v * hz};
      if (axis == 1) return {u * hx, sign * hy, v * hz};
      return {u * hx, v * hy, sign * hz};
    }
    case K::Cylinder: {
      double r = prim.params[0], hh = prim.params[1];
      double side = 2.0 * kPi * r * 2.0 * hh, cap = kPi * r * r;
      double pick = uni(gen) * (side + 2.0 * cap);
      double phi = 2.0 * kPi * uni(gen);
      if (pick < side) return {r * std::cos(phi), r * std::sin(phi), hh * (2.0 * uni(gen) - 1.0)};
      double rho = r * std::sqrt(uni(gen));
      return {rho * std::cos(phi), rho * std::sin(phi), pick < side + cap ? hh : -hh};
    }
    case K::Cone: {
      double r = prim.params[0], h = prim.params[1];
      double base = kPi * r * r, slant = kPi * r * std::sqrt(r * r + h * h);
      double pick = uni(gen) * (base + slant);
      double phi = 2.0 * kPi * uni(gen);
      if (pick < base) {
        double rho = r * std::sqrt(uni(gen));
        return {rho * std::cos(phi), rho * std::sin(phi), 0.0};
      }
      double z = h * (1.0 - std::sqrt(uni(gen)));
      double rho = r * (1.0 - z / h);
      return {rho * std::cos(phi), rho * std::sin(phi), z};
    }
    case K::TriangularPrism: {
      double e = prim.params[0], hl = prim.params[1];
      double cr = e / std::sqrt(3.0);
      i2t::Vec3 v0{0, cr, 0}, v1{-e / 2, -cr / 2, 0}, v2{e / 2, -cr / 2, 0};
      double cap = std::sqrt(3.0) / 4.0 * e * e, side = e * 2.0 * hl;
      double pick = uni(gen) * (2.0 * cap + 3.0 * side);
      if (pick < 2.0 * cap) {
        double u = uni(gen), v = uni(gen);
        if (u + v > 1.0) {
          u = 1.0 - u;
          v = 1.0 - v;
        }
        i2t::Vec3 p = v0 + (v1 - v0) * u + (v2 - v0) * v;
        p.z = pick < cap ? hl : -hl;
        return p;
      }
      int edge = std::min(2, int((pick - 2.0 * cap) / side));
      i2t::Vec3 a = edge == 0 ? v0 : (edge == 1 ? v1 : v2);
      i2t::Vec3 b = edge == 0 ? v1 : (edge == 1 ? v2 : v0);
      i2t::Vec3 p = a + (b - a) * uni(gen);
      p.z = hl * (2.0 * uni(gen) - 1.0);
      return p;
    }
  }
  return {};
}

// Dense cloud of points on the union surface of a composite, world frame.
// Buried per-part points are rejected through the library sdf, which the
// sdf unit tests pin independently.
inline std::vector<i2t::Vec3> surface_cloud(const i2t::ObjectModel& object, std::size_t count,
                                            std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> cum;
  double total = 0.0;
  for (const auto& part : object.parts) {
    total += part.surface_area();
    cum.push_back(total);
  }
  std::vector<i2t::Vec3> cloud;
  cloud.reserve(count);
  while (cloud.size() < count) {
    double pick = uni(gen) * total;
    std::size_t idx = 0;
    while (idx + 1 < cum.size() && pick >= cum[idx]) ++idx;
    const auto& part = object.parts[idx];
    i2t::Vec3 q = object.base_pose.apply(part.local_pose.apply(primitive_surface_point(part, gen)));
    if (i2t::sdf(object, q) < -1e-9) continue;
    cloud.push_back(q);
  }
  return cloud;
}

inline double nearest_distance(const std::vector<i2t::Vec3>& cloud, const i2t::Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : cloud) best = std::min(best, (s - p).norm());
  return best;
}

// Closed-form first hit of a ray against a finite z-axis cylinder (side and
// caps), local frame.
inline std::optional<double> ray_cylinder(const i2t::Vec3& o, const i2t::Vec3& d, double r,
                                          double hh, double t_max) {
  std::optional<double> best;
  auto consider = [&](double t) {
    if (t > 1e-12 && t <= t_max && (!best || t < *best)) best = t;
  };
  double a = d.x * d.x + d.y * d.y;
  double b = 2.0 * (o.x * d.x + o.y * d.y);
  double c = o.x * o.x + o.y * o.y - r * r;
  if (a > 1e-300) {
    double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)})
        if (std::abs(o.z + t * d.z) <= hh) consider(t);
    }
  }
  if (std::abs(d.z) > 1e-300) {
    for (double zc : {hh, -hh}) {
      double t = (zc - o.z) / d.z;
      double x = o.x + t * d.x, y = o.y + t * d.y;
      if (x * x + y * y <= r * r) consider(t);
    }
  }
  return best;
}

// Outward flank normal of a cone (base radius r at z=0, apex at z=h) at a
// point with azimuth phi.
inline i2t::Vec3 cone_flank_normal(double r, double h, double phi) {
  double len = std::sqrt(r * r + h * h);
  return {h * std::cos(phi) / len, h * std::sin(phi) / len, r / len};
}

}  // namespace oracle
