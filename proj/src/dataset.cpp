#include "i2t/dataset.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "i2t/errors.hpp"
#include "i2t/parallel.hpp"

namespace i2t {

TouchSample collect_sample(const ObjectModel& object, std::uint32_t object_id, Rng& rng,
                           const CollectParams& params) {
  SurfaceSample surf = sample_surface_point(object, rng);
  double roll = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  double penetration = rng.uniform(params.penetration_min, params.penetration_max);

  TouchSample sample;
  sample.object_id = object_id;
  sample.penetration = penetration;
  sample.contact_point = surf.point;
  Vec3 pad_center = surf.point + surf.normal * (params.approach_fraction * params.standoff);
  sample.frame.pose = pose_facing(pad_center, -surf.normal, roll);
  sample.frame.pad_side = params.pad_side;
  sample.frame.standoff = params.standoff;

  PatchGrid raw = heightfield(object, sample.frame);
  for (int k = 0; k < kPatchPixels; ++k)
    sample.patch[k] = (params.standoff - raw[k]) / params.standoff;

  PatchGrid raw_mm;
  for (int k = 0; k < kPatchPixels; ++k) raw_mm[k] = raw[k] * 1000.0;
  double pitch_mm = params.pad_side * 1000.0 / kPatchSize;
  IndentationField field =
      indentation_from_heightfield(raw_mm, penetration, params.standoff * 1000.0, pitch_mm);
  sample.signal_raw = simulate_tactile(field, params.layout);
  return sample;
}

std::vector<TouchSample> generate_samples(const std::vector<ObjectModel>& objects, std::size_t n,
                                          std::uint64_t seed, int workers,
                                          const CollectParams& params) {
  if (objects.empty()) throw ValidationError("generate_samples: no objects");
  std::vector<TouchSample> samples(n);
  parallel_for(n, workers < 1 ? 1u : unsigned(workers), [&](std::size_t k) {
    Rng rng(Rng::derive(seed, k));
    samples[k] = collect_sample(objects[k % objects.size()], std::uint32_t(k % objects.size()),
                                rng, params);
  });
  return samples;
}

std::vector<std::uint8_t> split_assignment(std::size_t n, double train_fraction,
                                           std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ValidationError("train_fraction must be in (0, 1)");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::size_t train_count = std::size_t(std::llround(double(n) * train_fraction));
  std::vector<std::uint8_t> assign(n, 0);
  for (std::size_t i = 0; i < train_count && i < n; ++i) assign[order[i]] = 1;
  return assign;
}

Standardizer fit_standardizer(const std::vector<TactileSignal>& signals) {
  if (signals.size() < 2) throw ValidationError("fit_standardizer: need at least 2 signals");
  Standardizer s;
  for (const TactileSignal& sig : signals)
    for (int k = 0; k < 15; ++k) s.mean[k] += sig.values[k];
  for (int k = 0; k < 15; ++k) s.mean[k] /= double(signals.size());
  for (const TactileSignal& sig : signals)
    for (int k = 0; k < 15; ++k) {
      double d = sig.values[k] - s.mean[k];
      s.std[k] += d * d;
    }
  for (int k = 0; k < 15; ++k) {
    s.std[k] = std::sqrt(s.std[k] / double(signals.size()));
    if (!(s.std[k] > 1e-9)) throw ValidationError("degenerate dimension");
  }
  return s;
}

TactileSignal apply(const Standardizer& s, const TactileSignal& raw) {
  if (raw.space != SignalSpace::raw)
    throw ValidationError("apply: signal is already standardized");
  TactileSignal out;
  out.space = SignalSpace::standardized;
  for (int k = 0; k < 15; ++k) out.values[k] = (raw.values[k] - s.mean[k]) / s.std[k];
  return out;
}

TactileSignal unapply(const Standardizer& s, const TactileSignal& standardized) {
  if (standardized.space != SignalSpace::standardized)
    throw ValidationError("unapply: signal is not standardized");
  TactileSignal out;
  out.space = SignalSpace::raw;
  for (int k = 0; k < 15; ++k) out.values[k] = standardized.values[k] * s.std[k] + s.mean[k];
  return out;
}

// samples.bin: magic "I2T1", u32 version, u32 count, then per record
//   u32 object_id
//   12 x f32 pose, row-major 3x4 (rotation rows, translation last column)
//   f32 penetration (mm)
//   2304 x f32 processed patch, row-major
//   15 x f32 raw signal
//   3 x f32 contact point
// all little-endian. Pad geometry and sensor layout live in manifest.json.
namespace {

constexpr char kMagic[4] = {'I', '2', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                        (unsigned char)((v >> 16) & 0xff), (unsigned char)((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("dataset payload truncated");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

void write_f32(std::ostream& out, double v) {
  float f = float(v);
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  write_u32(out, bits);
}

double read_f32(std::istream& in) {
  std::uint32_t bits = read_u32(in);
  float f;
  std::memcpy(&f, &bits, 4);
  return double(f);
}

nlohmann::json layout_to_json(const SensorLayout& l) {
  nlohmann::json sites = nlohmann::json::array();
  for (const SensorSite& s : l.sites) sites.push_back({s.x, s.y});
  return {{"sites", sites},
          {"kernel_sigma", l.kernel_sigma},
          {"gain_z", l.gain_z},
          {"gain_t", l.gain_t},
          {"noise_std", l.noise_std}};
}

SensorLayout layout_from_json(const nlohmann::json& j) {
  SensorLayout l;
  auto sites = j.at("sites");
  if (sites.size() != 5) throw IoError("manifest: expected 5 sensor sites");
  for (int i = 0; i < 5; ++i) l.sites[i] = {sites[i][0].get<double>(), sites[i][1].get<double>()};
  l.kernel_sigma = j.at("kernel_sigma").get<double>();
  l.gain_z = j.at("gain_z").get<double>();
  l.gain_t = j.at("gain_t").get<double>();
  l.noise_std = j.at("noise_std").get<double>();
  return l;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& dir) {
  if (ds.split.size() != ds.samples.size())
    throw ValidationError("save_dataset: split size does not match samples");
  std::filesystem::create_directories(dir);

  nlohmann::json manifest;
  manifest["version"] = ds.version;
  manifest["object_set"] = ds.object_set;
  manifest["sample_count"] = ds.samples.size();
  manifest["seed"] = ds.seed;
  manifest["pad_side"] = ds.pad_side;
  manifest["standoff"] = ds.standoff;
  manifest["sensor_layout"] = layout_to_json(ds.layout);
  manifest["standardizer"] = {{"mean", ds.standardizer.mean}, {"std", ds.standardizer.std}};
  manifest["split"] = ds.split;
  {
    std::ofstream out(std::filesystem::path(dir) / "manifest.json");
    if (!out) throw IoError("cannot write manifest.json in " + dir);
    out << manifest.dump(2) << "\n";
  }

  std::ofstream out(std::filesystem::path(dir) / "samples.bin", std::ios::binary);
  if (!out) throw IoError("cannot write samples.bin in " + dir);
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, std::uint32_t(ds.samples.size()));
  for (const TouchSample& s : ds.samples) {
    write_u32(out, s.object_id);
    const Mat3& r = s.frame.pose.rotation;
    const Vec3& t = s.frame.pose.translation;
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) write_f32(out, r(row, col));
      write_f32(out, row == 0 ? t.x : row == 1 ? t.y : t.z);
    }
    write_f32(out, s.penetration);
    for (double v : s.patch) write_f32(out, v);
    for (double v : s.signal_raw.values) write_f32(out, v);
    write_f32(out, s.contact_point.x);
    write_f32(out, s.contact_point.y);
    write_f32(out, s.contact_point.z);
  }
  if (!out) throw IoError("failed writing samples.bin in " + dir);
}

Dataset load_dataset(const std::string& dir) {
  Dataset ds;
  nlohmann::json manifest;
  {
    std::ifstream in(std::filesystem::path(dir) / "manifest.json");
    if (!in) throw IoError("cannot open manifest.json in " + dir);
    try {
      in >> manifest;
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("manifest.json is not valid JSON: ") + e.what());
    }
  }
  try {
    ds.version = manifest.at("version").get<std::uint32_t>();
    ds.object_set = manifest.at("object_set").get<std::string>();
    ds.seed = manifest.at("seed").get<std::uint64_t>();
    ds.pad_side = manifest.at("pad_side").get<double>();
    ds.standoff = manifest.at("standoff").get<double>();
    ds.layout = layout_from_json(manifest.at("sensor_layout"));
    auto mean = manifest.at("standardizer").at("mean");
    auto sdev = manifest.at("standardizer").at("std");
    for (int k = 0; k < 15; ++k) {
      ds.standardizer.mean[k] = mean.at(k).get<double>();
      ds.standardizer.std[k] = sdev.at(k).get<double>();
    }
    ds.split = manifest.at("split").get<std::vector<std::uint8_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("manifest.json is missing fields: ") + e.what());
  }
  std::size_t manifest_count = manifest.at("sample_count").get<std::size_t>();

  std::ifstream in(std::filesystem::path(dir) / "samples.bin", std::ios::binary);
  if (!in) throw IoError("cannot open samples.bin in " + dir);
  char magic[4];
  if (!in.read(magic, 4)) throw IoError("dataset payload truncated");
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError("bad dataset magic");
  if (read_u32(in) != kVersion) throw IoError("unsupported dataset version");
  std::uint32_t count = read_u32(in);
  if (count != manifest_count) throw IoError("manifest/payload count mismatch");
  if (ds.split.size() != count) throw IoError("manifest split length does not match count");

  ds.samples.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    TouchSample& s = ds.samples[i];
    s.object_id = read_u32(in);
    Mat3 r;
    Vec3 t;
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) r(row, col) = read_f32(in);
      double v = read_f32(in);
      (row == 0 ? t.x : row == 1 ? t.y : t.z) = v;
    }
    s.frame.pose = {r, t};
    s.frame.pad_side = ds.pad_side;
    s.frame.standoff = ds.standoff;
    s.penetration = read_f32(in);
    for (double& v : s.patch) v = read_f32(in);
    for (double& v : s.signal_raw.values) v = read_f32(in);
    s.signal_raw.space = SignalSpace::raw;
    s.contact_point.x = read_f32(in);
    s.contact_point.y = read_f32(in);
    s.contact_point.z = read_f32(in);
  }
  char extra;
  if (in.read(&extra, 1)) throw IoError("dataset payload has trailing bytes");
  return ds;
}

}  // namespace i2t
