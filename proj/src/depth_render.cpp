#include "i2t/depth_render.hpp"

#include <cmath>

#include "i2t/errors.hpp"

namespace i2t {

namespace {

void validate(const SensorFrame& frame) {
  if (!(frame.pad_side > 0.0)) throw ValidationError("pad_side must be > 0");
  if (!(frame.standoff > 0.0)) throw ValidationError("standoff must be > 0");
  if (!frame.pose.is_rigid(1e-9)) throw ValidationError("sensor pose is not rigid");
}

}  // namespace

Vec3 pixel_center_local(const SensorFrame& frame, int i, int j) {
  double pitch = frame.pad_side / kPatchSize;
  return {(j + 0.5) * pitch - frame.pad_side / 2.0, (i + 0.5) * pitch - frame.pad_side / 2.0,
          0.0};
}

RigidTransform pose_facing(const Vec3& origin, const Vec3& inward, double roll) {
  Vec3 z = inward.normalized();
  if (z.norm() < 0.5) throw ValidationError("degenerate touch direction");
  Vec3 ref = std::abs(z.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 x0 = (ref - z * ref.dot(z)).normalized();
  Vec3 x = x0 * std::cos(roll) + z.cross(x0) * std::sin(roll);
  Vec3 y = z.cross(x);
  return {Mat3::from_columns(x, y, z), origin};
}

PatchGrid heightfield(const ObjectModel& object, const SensorFrame& frame) {
  validate(frame);
  Vec3 dir = frame.pose.rotate({0, 0, 1});
  PatchGrid grid{};
  for (int i = 0; i < kPatchSize; ++i)
    for (int j = 0; j < kPatchSize; ++j) {
      Vec3 origin = frame.pose.apply(pixel_center_local(frame, i, j));
      auto t = raycast(object, origin, dir, frame.standoff);
      grid[i * kPatchSize + j] = t.value_or(frame.standoff);
    }
  return grid;
}

DepthPatch render_depth_patch(const ObjectModel& object, const SensorFrame& frame) {
  PatchGrid raw = heightfield(object, frame);
  DepthPatch patch;
  patch.frame = frame;
  for (int k = 0; k < kPatchPixels; ++k)
    patch.values[k] = (frame.standoff - raw[k]) / frame.standoff;
  return patch;
}

}  // namespace i2t
