#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "i2t/depth_render.hpp"

namespace i2t {

// Tactile-side quantities are in millimeters; the conversion from the
// meter-based render happens where heightfields cross into this module.
inline constexpr double kDeltaMaxMm = 3.5;          // gel saturation depth
inline constexpr double kStampContactDepthMm = 5.0; // stamp face plane
inline constexpr double kStampMissDepthMm = 10.0;   // no-contact sentinel

struct SensorSite {
  double x = 0.0, y = 0.0;  // mm, pad plane
};

// Five magnetometer sites: pad center plus the four (+-5, +-5) corners.
struct SensorLayout {
  std::array<SensorSite, 5> sites{
      SensorSite{0, 0}, SensorSite{5, 5}, SensorSite{-5, 5}, SensorSite{-5, -5},
      SensorSite{5, -5}};
  double kernel_sigma = 3.0;  // mm
  double gain_z = 1.0;
  double gain_t = 1.0;
  double noise_std = 0.01;  // raw signal units
};

// Per-pixel gel penetration depths in mm, same row-major 48x48 grid as the
// depth patch.
struct IndentationField {
  PatchGrid delta{};   // each entry in [0, kDeltaMaxMm]
  double pixel_pitch;  // mm
};

enum class SignalSpace { raw, standardized };

// 15 readings ordered (site0.x, site0.y, site0.z, ..., site4.x, site4.y,
// site4.z).
struct TactileSignal {
  std::array<double, 15> values{};
  SignalSpace space = SignalSpace::raw;
};

// Press a rigid surface (per-pixel depths h, mm) into the gel until the
// closest hit pixel is `penetration` mm deep: delta = clamp(h_min +
// penetration - h, 0, kDeltaMaxMm). Pixels at or beyond miss_depth never
// touch the gel. An all-miss heightfield gives an all-zero field.
IndentationField indentation_from_heightfield(const PatchGrid& h, double penetration,
                                              double miss_depth, double pixel_pitch);

// Gaussian-kernel forward model. Per site j at p_j with K(x) =
// exp(-|x-p_j|^2 / (2 sigma^2)) * pixel_area:
//   z_j      = gain_z * sum delta(x) K(x)
//   x_j, y_j = gain_t * sum delta(x) ((x - p_j) / sigma) K(x)
// Zero-mean Gaussian noise of std layout.noise_std is added iff noise_seed
// is given; fixed seeds reproduce bit-identically.
TactileSignal simulate_tactile(const IndentationField& field, const SensorLayout& layout,
                               std::optional<std::uint64_t> noise_seed = std::nullopt);

enum class StampShape { T, Circle, Angle, Triangle, Cross };

// Heightfield of a flat stamp face (all widths <= 10 mm) pressed square onto
// the pad: covered pixels read kStampContactDepthMm, the rest
// kStampMissDepthMm. The stamp cross-section is rotated by `rotation` and
// shifted by (dx, dy) mm; a stamp poking past the pad edge is an error.
PatchGrid stamp_heightfield(StampShape shape, double dx, double dy, double rotation);

}  // namespace i2t
