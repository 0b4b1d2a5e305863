#include "i2t/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "i2t/errors.hpp"
#include "i2t/rng.hpp"

namespace i2t {

namespace {

double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sq += d * d;
  }
  return sq;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed,
                    int max_iter) {
  const std::size_t n = points.size();
  if (k < 1) throw ValidationError("kmeans needs k >= 1");
  if (std::size_t(k) > n) throw ValidationError("kmeans needs at least k points");
  if (max_iter < 1) throw ValidationError("kmeans needs at least one iteration");
  const std::size_t dim = points[0].size();
  for (const auto& p : points)
    if (p.size() != dim) throw ValidationError("kmeans points differ in dimension");

  // Seeded init on k distinct point indices.
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < std::size_t(k); ++i)
    std::swap(pick[i], pick[i + rng.below(n - i)]);

  KMeansResult result;
  result.means.resize(std::size_t(k));
  for (int c = 0; c < k; ++c) result.means[std::size_t(c)] = points[pick[std::size_t(c)]];
  result.assignment.assign(n, -1);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment pass; ties go to the lowest cluster index.
    std::vector<int> next(n);
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_sq = sq_distance(points[i], result.means[0]);
      for (int c = 1; c < k; ++c) {
        double sq = sq_distance(points[i], result.means[std::size_t(c)]);
        if (sq < best_sq) {
          best_sq = sq;
          best = c;
        }
      }
      next[i] = best;
      inertia += best_sq;
    }
    result.inertia_history.push_back(inertia);
    bool fixpoint = (next == result.assignment);
    result.assignment = std::move(next);
    if (fixpoint) {
      result.converged = true;
      break;
    }

    // Mean update.
    std::vector<std::vector<double>> sums(std::size_t(k), std::vector<double>(dim, 0.0));
    std::vector<int> counts(std::size_t(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t c = std::size_t(result.assignment[i]);
      counts[c] += 1;
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i][d];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[std::size_t(c)] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d)
        result.means[std::size_t(c)][d] = sums[std::size_t(c)][d] / counts[std::size_t(c)];
    }

    // Reseed each empty cluster to the farthest unused point.
    std::vector<bool> used(n, false);
    for (int c = 0; c < k; ++c) {
      if (counts[std::size_t(c)] != 0) continue;
      std::size_t far = n;
      double far_sq = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        double sq = sq_distance(points[i], result.means[std::size_t(result.assignment[i])]);
        if (sq > far_sq) {
          far_sq = sq;
          far = i;
        }
      }
      result.means[std::size_t(c)] = points[far];
      used[far] = true;
    }
  }

  result.inertia = result.inertia_history.back();
  return result;
}

ClusterReport cluster_report(const Dataset& ds, int k, std::uint64_t seed) {
  if (ds.samples.empty()) throw ValidationError("cluster_report needs a non-empty dataset");
  std::vector<std::vector<double>> points(ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    points[i].assign(ds.samples[i].patch.begin(), ds.samples[i].patch.end());

  KMeansResult km = kmeans(points, k, seed);

  ClusterReport report;
  report.assignment = km.assignment;
  report.inertia = km.inertia;
  report.clusters.resize(std::size_t(k));
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    ClusterSummary& cs = report.clusters[std::size_t(km.assignment[i])];
    cs.size += 1;
    for (int p = 0; p < kPatchPixels; ++p) cs.mean_patch[p] += ds.samples[i].patch[p];
    for (int v = 0; v < 15; ++v) cs.mean_signal[std::size_t(v)] += ds.samples[i].signal_raw.values[std::size_t(v)];
  }
  for (ClusterSummary& cs : report.clusters) {
    if (cs.size == 0) continue;
    for (double& v : cs.mean_patch) v /= cs.size;
    for (double& v : cs.mean_signal) v /= cs.size;
  }
  return report;
}

void write_pgm(const PatchGrid& patch, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open pgm file for writing: " + path);
  out << "P5\n" << kPatchSize << " " << kPatchSize << "\n255\n";
  for (double v : patch) {
    double clamped = std::min(1.0, std::max(0.0, v));
    unsigned char byte = (unsigned char)std::lround(clamped * 255.0);
    out.write(reinterpret_cast<const char*>(&byte), 1);
  }
  if (!out) throw IoError("failed writing pgm file: " + path);
}

}  // namespace i2t
