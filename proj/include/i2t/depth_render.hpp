#pragma once

#include <array>

#include "i2t/geometry.hpp"

namespace i2t {

inline constexpr int kPatchSize = 48;
inline constexpr int kPatchPixels = kPatchSize * kPatchSize;

// Sensor-aligned touch frame: pad center at the pose origin, +z pointing
// inward along the touch direction, pad square in the local xy-plane.
struct SensorFrame {
  RigidTransform pose;
  double pad_side = 0.02;  // meters
  double standoff = 0.01;  // meters, depth range of one render
};

// Row-major 48x48 grid, index i * kPatchSize + j.
using PatchGrid = std::array<double, kPatchPixels>;

struct DepthPatch {
  PatchGrid values{};  // in [0,1], 0 = nothing within standoff
  SensorFrame frame;
};

// Center of pixel (i, j) in the sensor frame's xy-plane (z = 0). Row i moves
// along +y, column j along +x.
Vec3 pixel_center_local(const SensorFrame& frame, int i, int j);

// Pose with origin at `origin`, local +z along `inward`, and the in-plane
// basis spun by `roll` about +z. Deterministic for fixed inputs.
RigidTransform pose_facing(const Vec3& origin, const Vec3& inward, double roll);

// Raw orthographic depths: per pixel, the ray-hit distance along local +z,
// or standoff on a miss.
PatchGrid heightfield(const ObjectModel& object, const SensorFrame& frame);

// Processed patch: (standoff - depth) / standoff, so near surface reads high.
DepthPatch render_depth_patch(const ObjectModel& object, const SensorFrame& frame);

}  // namespace i2t
