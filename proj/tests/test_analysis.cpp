#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "i2t/analysis.hpp"
#include "i2t/errors.hpp"

using namespace i2t;

namespace {

using Points = std::vector<std::vector<double>>;

// Best 2-cluster inertia by enumerating every nonempty bipartition.
double exhaustive_two_means(const Points& points) {
  const std::size_t n = points.size();
  const std::size_t dim = points[0].size();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<double> mean_a(dim, 0.0), mean_b(dim, 0.0);
    int na = 0, nb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool in_a = mask & (1u << i);
      for (std::size_t d = 0; d < dim; ++d) (in_a ? mean_a : mean_b)[d] += points[i][d];
      (in_a ? na : nb) += 1;
    }
    for (std::size_t d = 0; d < dim; ++d) {
      mean_a[d] /= na;
      mean_b[d] /= nb;
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double>& m = (mask & (1u << i)) ? mean_a : mean_b;
      for (std::size_t d = 0; d < dim; ++d) {
        double diff = points[i][d] - m[d];
        inertia += diff * diff;
      }
    }
    best = std::min(best, inertia);
  }
  return best;
}

Dataset micro_dataset(std::size_t n, std::uint64_t seed) {
  std::vector<ObjectModel> objects;
  ObjectModel box;
  box.name = "box";
  box.parts.push_back(Primitive::box(0.02, 0.025, 0.03));
  objects.push_back(box);
  ObjectModel sphere;
  sphere.name = "sphere";
  sphere.parts.push_back(Primitive::sphere(0.018));
  objects.push_back(sphere);
  Dataset ds;
  ds.samples = generate_samples(objects, n, seed, 1);
  ds.split = split_assignment(n, 0.75, seed);
  return ds;
}

}  // namespace

TEST_CASE("k = 1 reduces to the centroid") {
  Points pts{{1.0, 2.0}, {3.0, -2.0}, {-1.0, 6.0}, {5.0, 2.0}};
  KMeansResult r = kmeans(pts, 1, 9);
  REQUIRE(r.means.size() == 1);
  CHECK(r.means[0][0] == doctest::Approx(2.0));
  CHECK(r.means[0][1] == doctest::Approx(2.0));
  double expect = 0.0;
  for (const auto& p : pts)
    expect += (p[0] - 2.0) * (p[0] - 2.0) + (p[1] - 2.0) * (p[1] - 2.0);
  CHECK(r.inertia == doctest::Approx(expect));
  CHECK(r.converged);
  for (int a : r.assignment) CHECK(a == 0);
}

TEST_CASE("two tight pairs split at their centroids") {
  Points pts{{0.0, 0.01}, {0.0, -0.01}, {10.0, 5.01}, {10.0, 4.99}};
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    KMeansResult r = kmeans(pts, 2, seed);
    CHECK(r.converged);
    CHECK(r.assignment[0] == r.assignment[1]);
    CHECK(r.assignment[2] == r.assignment[3]);
    CHECK(r.assignment[0] != r.assignment[2]);
    int low = r.assignment[0];
    CHECK(r.means[std::size_t(low)][0] == doctest::Approx(0.0));
    CHECK(r.means[std::size_t(low)][1] == doctest::Approx(0.0));
    CHECK(r.means[std::size_t(1 - low)][0] == doctest::Approx(10.0));
    CHECK(r.means[std::size_t(1 - low)][1] == doctest::Approx(5.0));
  }
}

TEST_CASE("five points, k = 2: inertia matches the exhaustive best partition") {
  Points pts{{0.0}, {0.1}, {0.2}, {10.0}, {10.1}};
  double best = exhaustive_two_means(pts);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    KMeansResult r = kmeans(pts, 2, seed);
    CHECK(r.inertia == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("duplicate-point inits recover via empty-cluster reseeding") {
  Points pts{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {5.0, 5.0}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    KMeansResult r = kmeans(pts, 2, seed);
    CHECK(r.inertia == doctest::Approx(0.0));
    CHECK(r.assignment[0] == r.assignment[1]);
    CHECK(r.assignment[1] == r.assignment[2]);
    CHECK(r.assignment[0] != r.assignment[3]);
  }
}

TEST_CASE("lloyd iterations never increase inertia") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  Points pts(60, std::vector<double>(4));
  for (auto& p : pts)
    for (double& v : p) v = coord(gen);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    KMeansResult r = kmeans(pts, 4, seed);
    REQUIRE(!r.inertia_history.empty());
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
      CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] + 1e-12);
    if (r.converged) {
      // Fixpoint: every point already sits with its nearest mean.
      for (std::size_t i = 0; i < pts.size(); ++i) {
        double own = 0.0, best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < r.means.size(); ++c) {
          double sq = 0.0;
          for (std::size_t d = 0; d < 4; ++d) {
            double diff = pts[i][d] - r.means[c][d];
            sq += diff * diff;
          }
          if (std::size_t(r.assignment[i]) == c) own = sq;
          best = std::min(best, sq);
        }
        CHECK(own <= best + 1e-12);
      }
    }
  }
}

TEST_CASE("kmeans input validation") {
  Points pts{{0.0}, {1.0}};
  CHECK_THROWS_AS(kmeans(pts, 3, 0), ValidationError);
  CHECK_THROWS_AS(kmeans(pts, 0, 0), ValidationError);
  CHECK_THROWS_AS(kmeans({{0.0}, {1.0, 2.0}}, 1, 0), ValidationError);
  CHECK_THROWS_AS(kmeans({}, 1, 0), ValidationError);
}

TEST_CASE("cluster_report pairs patches with signals") {
  Dataset ds = micro_dataset(24, 15);
  ClusterReport report = cluster_report(ds, 3, 2);
  REQUIRE(report.clusters.size() == 3);
  REQUIRE(report.assignment.size() == 24);

  int total = 0;
  for (const ClusterSummary& c : report.clusters) total += c.size;
  CHECK(total == 24);

  // k = 1 gives the global means, recomputed by hand.
  ClusterReport global = cluster_report(ds, 1, 2);
  REQUIRE(global.clusters.size() == 1);
  CHECK(global.clusters[0].size == 24);
  PatchGrid mean_patch{};
  std::array<double, 15> mean_signal{};
  for (const TouchSample& s : ds.samples) {
    for (int p = 0; p < kPatchPixels; ++p) mean_patch[p] += s.patch[p] / 24.0;
    for (std::size_t v = 0; v < 15; ++v) mean_signal[v] += s.signal_raw.values[v] / 24.0;
  }
  for (int p = 0; p < kPatchPixels; p += 97)
    CHECK(global.clusters[0].mean_patch[p] == doctest::Approx(mean_patch[p]).epsilon(1e-9));
  for (std::size_t v = 0; v < 15; ++v)
    CHECK(global.clusters[0].mean_signal[v] == doctest::Approx(mean_signal[v]).epsilon(1e-9));

  // Deterministic per seed.
  ClusterReport again = cluster_report(ds, 3, 2);
  CHECK(again.assignment == report.assignment);
  CHECK(again.inertia == report.inertia);

  Dataset empty;
  CHECK_THROWS_AS(cluster_report(empty, 2, 0), ValidationError);
}

TEST_CASE("pgm writer emits a valid 8-bit graymap") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "i2t_analysis_test";
  fs::create_directories(dir);
  fs::path file = dir / "patch.pgm";

  PatchGrid patch{};
  patch[0] = 0.0;
  patch[1] = 1.0;
  patch[2] = 0.5;
  patch[3] = -2.0;  // clamps to 0
  patch[4] = 7.0;   // clamps to 255
  write_pgm(patch, file.string());

  std::ifstream in(file, std::ios::binary);
  REQUIRE(bool(in));
  std::string magic, dims1, dims2, maxval;
  in >> magic >> dims1 >> dims2 >> maxval;
  CHECK(magic == "P5");
  CHECK(dims1 == "48");
  CHECK(dims2 == "48");
  CHECK(maxval == "255");
  in.get();  // single whitespace after the header
  std::vector<unsigned char> bytes(kPatchPixels);
  in.read(reinterpret_cast<char*>(bytes.data()), kPatchPixels);
  REQUIRE(bool(in));
  CHECK(bytes[0] == 0);
  CHECK(bytes[1] == 255);
  CHECK(bytes[2] == 128);
  CHECK(bytes[3] == 0);
  CHECK(bytes[4] == 255);
  CHECK(in.peek() == EOF);

  CHECK_THROWS_AS(write_pgm(patch, (dir / "no_dir" / "x.pgm").string()), IoError);
  fs::remove_all(dir);
}
