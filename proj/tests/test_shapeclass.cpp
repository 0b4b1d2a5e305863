#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "doctest.h"
#include "i2t/errors.hpp"
#include "i2t/shapeclass.hpp"

using namespace i2t;

TEST_CASE("stamp dataset layout and determinism") {
  StampDataset ds = generate_stamp_dataset(20, 11);
  REQUIRE(ds.signals.size() == 20);
  REQUIRE(ds.labels.size() == 20);
  REQUIRE(ds.split.size() == 20);

  std::array<int, 5> per_class{};
  for (int label : ds.labels) {
    REQUIRE(label >= 0);
    REQUIRE(label < 5);
    per_class[std::size_t(label)] += 1;
  }
  for (int c : per_class) CHECK(c == 4);

  int train = 0;
  for (auto v : ds.split) train += v;
  CHECK(train == 16);

  for (const TactileSignal& s : ds.signals) {
    CHECK(s.space == SignalSpace::raw);
    for (double v : s.values) CHECK(std::isfinite(v));
  }
  for (double v : ds.standardizer.std) CHECK(v > 0.0);

  // Bit-exact reruns; a different seed moves the data.
  StampDataset again = generate_stamp_dataset(20, 11);
  for (std::size_t k = 0; k < 20; ++k)
    CHECK(again.signals[k].values == ds.signals[k].values);
  CHECK(again.split == ds.split);
  StampDataset other = generate_stamp_dataset(20, 12);
  CHECK(other.signals[0].values != ds.signals[0].values);

  StampDataset tiny = generate_stamp_dataset(5, 1);
  std::set<int> seen(tiny.labels.begin(), tiny.labels.end());
  CHECK(seen.size() == 5);

  CHECK_THROWS_AS(generate_stamp_dataset(21, 1), ValidationError);
  CHECK_THROWS_AS(generate_stamp_dataset(0, 1), ValidationError);
}

TEST_CASE("stamp signals carry shape structure plus noise") {
  StampDataset ds = generate_stamp_dataset(40, 3);
  // Noise makes two same-class samples differ.
  std::size_t first_t = 0, second_t = 5;
  REQUIRE(ds.labels[first_t] == ds.labels[second_t]);
  CHECK(ds.signals[first_t].values != ds.signals[second_t].values);

  // Every press indents the gel, so summed z-channels dominate the noise.
  for (const TactileSignal& s : ds.signals) {
    double z_sum = s.values[2] + s.values[5] + s.values[8] + s.values[11] + s.values[14];
    CHECK(z_sum > 1.0);
  }
}

TEST_CASE("classifier separates the five stamps") {
  StampDataset ds = generate_stamp_dataset(400, 7);
  StampTrainHyper hyper;
  hyper.epochs = 40;
  hyper.seed = 1;
  auto [net, report] = train_classifier(ds, hyper);

  CHECK(net.in_dim() == 15);
  CHECK(net.out_dim() == 5);
  REQUIRE(net.layers.size() == 3);
  CHECK(net.layers[0].w.rows() == 500);
  CHECK(net.layers[1].w.rows() == 10);

  // Confusion rows sum to the per-class test counts; total = trace / sum.
  int total = 0, trace = 0;
  for (int c = 0; c < 5; ++c) {
    int row = 0;
    for (int p = 0; p < 5; ++p) row += report.confusion[std::size_t(c)][std::size_t(p)];
    CHECK(row == report.test_counts[std::size_t(c)]);
    total += row;
    trace += report.confusion[std::size_t(c)][std::size_t(c)];
  }
  CHECK(total == 80);
  CHECK(report.total_accuracy == doctest::Approx(double(trace) / double(total)));
  for (double a : report.per_class_accuracy) {
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }
  CHECK(report.total_accuracy >= 0.8);

  // classify() reproduces the reported held-out accuracy.
  int correct = 0, count = 0;
  for (std::size_t k = 0; k < ds.signals.size(); ++k) {
    if (ds.split[k]) continue;
    correct += classify(net, ds.standardizer, ds.signals[k]) == ds.labels[k];
    ++count;
  }
  CHECK(double(correct) / double(count) == doctest::Approx(report.total_accuracy));

  // Determinism end to end.
  auto [net2, report2] = train_classifier(ds, hyper);
  CHECK(report2.total_accuracy == report.total_accuracy);
  CHECK(net2.layers[0].w == net.layers[0].w);
}

TEST_CASE("zero-epoch classifier sits at chance") {
  StampDataset ds = generate_stamp_dataset(400, 7);
  StampTrainHyper hyper;
  hyper.epochs = 0;
  hyper.seed = 2;
  auto [net, report] = train_classifier(ds, hyper);
  (void)net;
  CHECK(report.total_accuracy > 0.02);
  CHECK(report.total_accuracy < 0.45);
}

TEST_CASE("an empty test class is rejected") {
  StampDataset ds = generate_stamp_dataset(10, 5);
  std::fill(ds.split.begin(), ds.split.end(), std::uint8_t(1));
  ds.split[0] = 0;  // only one label left in the test split
  CHECK_THROWS_AS(train_classifier(ds), ValidationError);
}
