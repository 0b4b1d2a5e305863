#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "i2t/depth_render.hpp"
#include "i2t/errors.hpp"

using namespace i2t;

namespace {

// Large box whose top face sits at the given depth along sensor +z (identity
// sensor pose).
ObjectModel slab_at(double depth) {
  ObjectModel obj;
  obj.name = "slab";
  obj.parts.push_back(Primitive::box(0.5, 0.5, 0.5, {Mat3::identity(), {0, 0, depth + 0.5}}));
  return obj;
}

ObjectModel sphere_at_depth(double apex_depth, double radius) {
  ObjectModel obj;
  obj.name = "ball";
  obj.parts.push_back(
      Primitive::sphere(radius, {Mat3::identity(), {0, 0, apex_depth + radius}}));
  return obj;
}

}  // namespace

TEST_CASE("pixel grid covers the pad symmetrically") {
  SensorFrame frame;
  double pitch = frame.pad_side / kPatchSize;
  Vec3 first = pixel_center_local(frame, 0, 0);
  CHECK(first.x == doctest::Approx(-frame.pad_side / 2 + pitch / 2).epsilon(1e-12));
  CHECK(first.y == doctest::Approx(-frame.pad_side / 2 + pitch / 2).epsilon(1e-12));
  for (int i = 0; i < kPatchSize; i += 7)
    for (int j = 0; j < kPatchSize; j += 7) {
      Vec3 a = pixel_center_local(frame, i, j);
      Vec3 b = pixel_center_local(frame, kPatchSize - 1 - i, kPatchSize - 1 - j);
      CHECK((a + b).norm() < 1e-15);
    }
}

TEST_CASE("pose_facing builds a rigid frame with +z along the touch direction") {
  Vec3 origin{0.01, -0.02, 0.05};
  Vec3 inward = Vec3{0.3, -0.5, -1.0}.normalized();
  RigidTransform pose = pose_facing(origin, inward, 0.0);
  CHECK(pose.is_rigid());
  CHECK((pose.rotate({0, 0, 1}) - inward).norm() < 1e-12);
  CHECK((pose.apply({0, 0, 0}) - origin).norm() < 1e-12);
  // Roll spins the in-plane axes but leaves +z alone.
  RigidTransform rolled = pose_facing(origin, inward, 1.2);
  CHECK((rolled.rotate({0, 0, 1}) - inward).norm() < 1e-12);
  CHECK((rolled.rotate({1, 0, 0}) - pose.rotate({1, 0, 0})).norm() > 0.1);
}

TEST_CASE("frame parameters are validated") {
  ObjectModel obj = slab_at(0.005);
  SensorFrame bad;
  bad.pad_side = 0.0;
  CHECK_THROWS_AS(heightfield(obj, bad), ValidationError);
  SensorFrame bad2;
  bad2.standoff = -1.0;
  CHECK_THROWS_AS(heightfield(obj, bad2), ValidationError);
}

TEST_CASE("flat slab at half the standoff reads 0.5 everywhere") {
  SensorFrame frame;
  DepthPatch patch = render_depth_patch(slab_at(0.005), frame);
  PatchGrid raw = heightfield(slab_at(0.005), frame);
  for (int k = 0; k < kPatchPixels; ++k) {
    CHECK(patch.values[k] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(raw[k] == doctest::Approx(0.005).epsilon(1e-9));
  }
}

TEST_CASE("empty and out-of-range scenes read zero") {
  SensorFrame frame;
  ObjectModel empty{"empty", {}, {}};
  DepthPatch patch = render_depth_patch(empty, frame);
  PatchGrid raw = heightfield(empty, frame);
  for (int k = 0; k < kPatchPixels; ++k) {
    CHECK(patch.values[k] == 0.0);
    CHECK(raw[k] == frame.standoff);
  }
  DepthPatch far_patch = render_depth_patch(slab_at(0.02), frame);  // beyond standoff
  for (int k = 0; k < kPatchPixels; ++k) CHECK(far_patch.values[k] == 0.0);
}

TEST_CASE("sphere under the pad matches the closed-form height field") {
  const double radius = 0.01, apex_depth = 0.004;
  SensorFrame frame;
  ObjectModel obj = sphere_at_depth(apex_depth, radius);
  DepthPatch patch = render_depth_patch(obj, frame);
  int compared = 0;
  for (int i = 0; i < kPatchSize; ++i)
    for (int j = 0; j < kPatchSize; ++j) {
      Vec3 c = pixel_center_local(frame, i, j);
      double rho = std::hypot(c.x, c.y);
      if (std::abs(rho - radius) < 1e-6) continue;  // silhouette-tangent ray
      double want = 0.0;
      if (rho < radius) {
        double t = apex_depth + radius - std::sqrt(radius * radius - rho * rho);
        if (std::abs(t - frame.standoff) < 1e-5) continue;  // range-boundary ring
        if (t <= frame.standoff) want = (frame.standoff - t) / frame.standoff;
      }
      CHECK(std::abs(patch.values[i * kPatchSize + j] - want) < 1e-4);
      ++compared;
    }
  CHECK(compared > 2200);
}

TEST_CASE("processed patch is the normalized height field") {
  SensorFrame frame;
  ObjectModel obj = sphere_at_depth(0.004, 0.01);
  PatchGrid raw = heightfield(obj, frame);
  DepthPatch patch = render_depth_patch(obj, frame);
  for (int k = 0; k < kPatchPixels; ++k)
    CHECK(patch.values[k] == (frame.standoff - raw[k]) / frame.standoff);
}

TEST_CASE("moving the object toward the pad never lowers a pixel") {
  // The object stays clear of the pad plane; rays only look forward.
  SensorFrame frame;
  DepthPatch before = render_depth_patch(sphere_at_depth(0.004, 0.01), frame);
  DepthPatch after = render_depth_patch(sphere_at_depth(0.003, 0.01), frame);
  for (int k = 0; k < kPatchPixels; ++k) CHECK(after.values[k] >= before.values[k]);
}

TEST_CASE("rendering is bit-deterministic") {
  SensorFrame frame;
  frame.pose = pose_facing({0.002, 0.001, -0.003}, Vec3{0.1, 0.2, 1.0}.normalized(), 0.7);
  ObjectModel obj = sphere_at_depth(0.004, 0.01);
  DepthPatch a = render_depth_patch(obj, frame);
  DepthPatch b = render_depth_patch(obj, frame);
  for (int k = 0; k < kPatchPixels; ++k) CHECK(a.values[k] == b.values[k]);
}
