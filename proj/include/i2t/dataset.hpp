#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "i2t/depth_render.hpp"
#include "i2t/tactile_sim.hpp"

namespace i2t {

// One simulated touch: where the pad went, what it saw, what it felt.
struct TouchSample {
  std::uint32_t object_id = 0;
  SensorFrame frame;
  double penetration = 0.0;  // mm
  PatchGrid patch{};         // processed depth values in [0,1]
  TactileSignal signal_raw;
  Vec3 contact_point;  // world, on the object surface
};

struct Standardizer {
  std::array<double, 15> mean{};
  std::array<double, 15> std{};
};

struct Dataset {
  std::uint32_t version = 1;
  std::string object_set;  // human-readable description
  std::uint64_t seed = 0;
  double pad_side = 0.02;
  double standoff = 0.01;
  SensorLayout layout;
  Standardizer standardizer;
  std::vector<std::uint8_t> split;  // per sample: 1 = train, 0 = validation
  std::vector<TouchSample> samples;
};

struct CollectParams {
  double pad_side = 0.02;          // m
  double standoff = 0.01;          // m
  double approach_fraction = 0.5;  // pad center offset from contact, in standoffs
  double penetration_min = 0.5;    // mm
  double penetration_max = 2.0;    // mm
  SensorLayout layout;
};

// One random touch of the object: sample a surface point, face the pad at it
// (+z = -normal) with a random roll, render, press by a random penetration,
// and read the tactile response. Noise-free by default so the pair is the
// clean forward model.
TouchSample collect_sample(const ObjectModel& object, std::uint32_t object_id, Rng& rng,
                           const CollectParams& params = {});

// n samples over the objects, round-robin by index; sample k uses the rng
// stream derived from (seed, k), so results do not depend on worker count.
std::vector<TouchSample> generate_samples(const std::vector<ObjectModel>& objects, std::size_t n,
                                          std::uint64_t seed, int workers,
                                          const CollectParams& params = {});

// Seed-deterministic shuffle split; entry 1 = train. round(n * fraction)
// samples land in train.
std::vector<std::uint8_t> split_assignment(std::size_t n, double train_fraction,
                                           std::uint64_t seed);

// Per-dimension mean/std over the given signals (population std). A
// dimension with std <= 1e-9 is an error ("degenerate dimension").
Standardizer fit_standardizer(const std::vector<TactileSignal>& signals);
TactileSignal apply(const Standardizer& s, const TactileSignal& raw);
TactileSignal unapply(const Standardizer& s, const TactileSignal& standardized);

// File pair under `dir`: manifest.json + samples.bin (magic "I2T1"). See the
// format note in dataset.cpp. Distinct errors for bad magic, bad version,
// truncation, and a manifest/payload count mismatch.
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace i2t
