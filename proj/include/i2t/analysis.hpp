#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "i2t/dataset.hpp"

namespace i2t {

struct KMeansResult {
  std::vector<int> assignment;             // per point, 0..k-1
  std::vector<std::vector<double>> means;  // k centroids
  double inertia = 0.0;                    // sum of squared distances, final
  std::vector<double> inertia_history;     // one entry per Lloyd iteration
  bool converged = false;                  // assignment fixpoint before max_iter
};

// Lloyd's algorithm from a seeded k-distinct-point initialization. Nearest
// ties go to the lowest cluster index; a cluster that empties is reseeded to
// the point farthest from its assigned mean.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed,
                    int max_iter = 100);

struct ClusterSummary {
  PatchGrid mean_patch{};
  std::array<double, 15> mean_signal{};  // raw
  int size = 0;
};

struct ClusterReport {
  std::vector<ClusterSummary> clusters;
  std::vector<int> assignment;
  double inertia = 0.0;
};

// Cluster the processed depth patches and pair each cluster with the
// arithmetic means of its member patches and raw signals.
ClusterReport cluster_report(const Dataset& ds, int k = 5, std::uint64_t seed = 0);

// 8-bit binary graymap of a patch; values clamped to [0, 1].
void write_pgm(const PatchGrid& patch, const std::string& path);

}  // namespace i2t
