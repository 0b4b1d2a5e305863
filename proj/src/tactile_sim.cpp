#include "i2t/tactile_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "i2t/errors.hpp"
#include "i2t/rng.hpp"

namespace i2t {

IndentationField indentation_from_heightfield(const PatchGrid& h, double penetration,
                                              double miss_depth, double pixel_pitch) {
  if (!(penetration > 0.0)) throw ValidationError("penetration must be > 0");
  if (!(pixel_pitch > 0.0)) throw ValidationError("pixel_pitch must be > 0");
  IndentationField field;
  field.pixel_pitch = pixel_pitch;
  double h_min = std::numeric_limits<double>::infinity();
  for (double d : h)
    if (d < miss_depth) h_min = std::min(h_min, d);
  if (!std::isfinite(h_min)) return field;  // nothing in range, gel untouched
  double plane = h_min + penetration;
  for (int k = 0; k < kPatchPixels; ++k)
    field.delta[k] = h[k] < miss_depth ? std::clamp(plane - h[k], 0.0, kDeltaMaxMm) : 0.0;
  return field;
}

TactileSignal simulate_tactile(const IndentationField& field, const SensorLayout& layout,
                               std::optional<std::uint64_t> noise_seed) {
  if (!(layout.kernel_sigma > 0.0)) throw ValidationError("kernel_sigma must be > 0");
  if (!(layout.noise_std >= 0.0)) throw ValidationError("noise_std must be >= 0");
  const double pitch = field.pixel_pitch;
  const double half_side = kPatchSize * pitch / 2.0;
  const double area = pitch * pitch;
  const double sigma = layout.kernel_sigma;
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);

  TactileSignal out;
  out.space = SignalSpace::raw;
  for (int s = 0; s < 5; ++s) {
    const SensorSite& site = layout.sites[s];
    double zx = 0.0, zy = 0.0, zz = 0.0;
    for (int i = 0; i < kPatchSize; ++i) {
      double py = (i + 0.5) * pitch - half_side;
      for (int j = 0; j < kPatchSize; ++j) {
        double d = field.delta[i * kPatchSize + j];
        if (d == 0.0) continue;
        double px = (j + 0.5) * pitch - half_side;
        double rx = px - site.x, ry = py - site.y;
        double k = std::exp(-(rx * rx + ry * ry) * inv_two_sigma_sq) * area;
        zz += d * k;
        zx += d * (rx / sigma) * k;
        zy += d * (ry / sigma) * k;
      }
    }
    out.values[3 * s + 0] = layout.gain_t * zx;
    out.values[3 * s + 1] = layout.gain_t * zy;
    out.values[3 * s + 2] = layout.gain_z * zz;
  }
  if (noise_seed) {
    Rng rng(*noise_seed);
    for (double& v : out.values) v += rng.normal() * layout.noise_std;
  }
  return out;
}

namespace {

constexpr double kPadSideMm = 20.0;

struct P2 {
  double x, y;
};

bool in_rect(P2 p, double x0, double x1, double y0, double y1) {
  return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
}

bool stamp_contains(StampShape shape, P2 p) {
  switch (shape) {
    case StampShape::Circle:
      return p.x * p.x + p.y * p.y <= 25.0;
    case StampShape::T:
      return in_rect(p, -5, 5, 2, 5) || in_rect(p, -1.5, 1.5, -5, 2);
    case StampShape::Cross:
      return in_rect(p, -5, 5, -1.5, 1.5) || in_rect(p, -1.5, 1.5, -5, 5);
    case StampShape::Angle:
      return in_rect(p, -5, -2, -5, 5) || in_rect(p, -5, 5, -5, -2);
    case StampShape::Triangle: {
      const double w = 5.0 * std::sqrt(3.0) / 2.0;
      P2 v0{0, 5}, v1{-w, -2.5}, v2{w, -2.5};
      auto side = [&](P2 a, P2 b) { return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x); };
      double s0 = side(v0, v1), s1 = side(v1, v2), s2 = side(v2, v0);
      return (s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0);
    }
  }
  return false;
}

std::vector<P2> stamp_hull(StampShape shape) {
  const double w = 5.0 * std::sqrt(3.0) / 2.0;
  switch (shape) {
    case StampShape::Circle:
      return {};  // handled analytically
    case StampShape::T:
      return {{-5, 5}, {5, 5}, {5, 2}, {1.5, 2}, {1.5, -5}, {-1.5, -5}, {-1.5, 2}, {-5, 2}};
    case StampShape::Cross:
      return {{5, 1.5},  {1.5, 1.5},  {1.5, 5},  {-1.5, 5},  {-1.5, 1.5},  {-5, 1.5},
              {-5, -1.5}, {-1.5, -1.5}, {-1.5, -5}, {1.5, -5}, {1.5, -1.5}, {5, -1.5}};
    case StampShape::Angle:
      return {{-5, 5}, {-2, 5}, {-2, -2}, {5, -2}, {5, -5}, {-5, -5}};
    case StampShape::Triangle:
      return {{0, 5}, {-w, -2.5}, {w, -2.5}};
  }
  return {};
}

}  // namespace

PatchGrid stamp_heightfield(StampShape shape, double dx, double dy, double rotation) {
  const double half = kPadSideMm / 2.0;
  const double c = std::cos(rotation), s = std::sin(rotation);
  if (shape == StampShape::Circle) {
    if (std::abs(dx) + 5.0 > half || std::abs(dy) + 5.0 > half)
      throw ValidationError("stamp out of pad");
  } else {
    for (P2 v : stamp_hull(shape)) {
      double wx = c * v.x - s * v.y + dx;
      double wy = s * v.x + c * v.y + dy;
      if (std::abs(wx) > half || std::abs(wy) > half) throw ValidationError("stamp out of pad");
    }
  }
  const double pitch = kPadSideMm / kPatchSize;
  PatchGrid grid;
  for (int i = 0; i < kPatchSize; ++i) {
    double py = (i + 0.5) * pitch - half;
    for (int j = 0; j < kPatchSize; ++j) {
      double px = (j + 0.5) * pitch - half;
      // Into the stamp frame: undo offset, then undo rotation.
      double ux = px - dx, uy = py - dy;
      P2 p{c * ux + s * uy, -s * ux + c * uy};
      grid[i * kPatchSize + j] =
          stamp_contains(shape, p) ? kStampContactDepthMm : kStampMissDepthMm;
    }
  }
  return grid;
}

}  // namespace i2t
