#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "i2t/dataset.hpp"
#include "i2t/nn.hpp"

namespace i2t {

inline constexpr int kStampClasses = 5;
inline constexpr double kStampPressDepthMm = 3.5;

// Class label order follows StampShape: T, circle, angle, triangle, cross.
const char* stamp_shape_name(StampShape shape);

struct StampDataset {
  std::vector<TactileSignal> signals;  // raw
  std::vector<int> labels;             // 0..4
  std::vector<std::uint8_t> split;     // 1 = train (80/20)
  Standardizer standardizer;           // fit on the train split
};

// n labeled presses, n/5 per class: each stamp is dropped at a uniform
// offset in [-4, 4]^2 mm with a uniform rotation (redrawn if it pokes past
// the pad), pressed 3.5 mm deep, and read with sensor noise. Sample k uses
// the stream derived from (seed, k).
StampDataset generate_stamp_dataset(std::size_t n, std::uint64_t seed);

struct StampTrainHyper {
  int epochs = 80;
  int batch = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

struct StampReport {
  std::array<double, kStampClasses> per_class_accuracy{};
  double total_accuracy = 0.0;
  std::array<std::array<int, kStampClasses>, kStampClasses> confusion{};  // [true][predicted]
  std::array<int, kStampClasses> test_counts{};
};

// Cross-entropy training of a 15 -> 500 (relu) -> 10 -> 5 logits classifier
// on the train split; accuracies and confusion come from the held-out split.
std::pair<nn::DenseNet, StampReport> train_classifier(const StampDataset& ds,
                                                      const StampTrainHyper& hyper = {});

// Standardize and take the logit argmax (ties to the lowest class).
int classify(const nn::DenseNet& net, const Standardizer& s, const TactileSignal& raw);

}  // namespace i2t
