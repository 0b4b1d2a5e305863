#include "i2t/shapeclass.hpp"

#include <algorithm>
#include <cmath>

#include "i2t/errors.hpp"

namespace i2t {

const char* stamp_shape_name(StampShape shape) {
  switch (shape) {
    case StampShape::T: return "T";
    case StampShape::Circle: return "circle";
    case StampShape::Angle: return "angle";
    case StampShape::Triangle: return "triangle";
    case StampShape::Cross: return "cross";
  }
  return "?";
}

StampDataset generate_stamp_dataset(std::size_t n, std::uint64_t seed) {
  if (n == 0 || n % kStampClasses != 0)
    throw ValidationError("stamp dataset size must be a positive multiple of 5");

  const double pitch_mm = 20.0 / kPatchSize;
  StampDataset ds;
  ds.signals.resize(n);
  ds.labels.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    int label = int(k % kStampClasses);
    ds.labels[k] = label;
    Rng rng(Rng::derive(seed, k));
    PatchGrid h{};
    for (;;) {
      double dx = rng.uniform(-4.0, 4.0);
      double dy = rng.uniform(-4.0, 4.0);
      double rot = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
      try {
        h = stamp_heightfield(StampShape(label), dx, dy, rot);
        break;
      } catch (const ValidationError&) {
        // Poked past the pad; redraw the placement.
      }
    }
    IndentationField field =
        indentation_from_heightfield(h, kStampPressDepthMm, kStampMissDepthMm, pitch_mm);
    ds.signals[k] = simulate_tactile(field, SensorLayout{}, rng.next_u64());
  }

  ds.split = split_assignment(n, 0.8, Rng::derive(seed, n));
  std::vector<TactileSignal> train;
  for (std::size_t k = 0; k < n; ++k)
    if (ds.split[k]) train.push_back(ds.signals[k]);
  ds.standardizer = fit_standardizer(train);
  return ds;
}

namespace {

int argmax_class(const nn::Vector& logits) {
  int best = 0;
  for (int c = 1; c < int(logits.size()); ++c)
    if (logits[c] > logits[best]) best = c;
  return best;
}

}  // namespace

int classify(const nn::DenseNet& net, const Standardizer& s, const TactileSignal& raw) {
  TactileSignal z = apply(s, raw);
  nn::Vector x(15);
  for (int k = 0; k < 15; ++k) x[k] = z.values[k];
  return argmax_class(nn::forward1(net, x));
}

std::pair<nn::DenseNet, StampReport> train_classifier(const StampDataset& ds,
                                                      const StampTrainHyper& hyper) {
  if (hyper.epochs < 0 || hyper.batch < 1) throw ValidationError("bad training hyperparameters");
  if (ds.signals.size() != ds.labels.size() || ds.signals.size() != ds.split.size())
    throw ValidationError("stamp dataset fields disagree in length");

  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t k = 0; k < ds.split.size(); ++k)
    (ds.split[k] ? train_idx : test_idx).push_back(k);
  if (train_idx.empty()) throw ValidationError("empty train split");
  std::array<int, kStampClasses> test_counts{};
  for (std::size_t k : test_idx) test_counts[std::size_t(ds.labels[k])] += 1;
  for (int c = 0; c < kStampClasses; ++c)
    if (test_counts[std::size_t(c)] == 0) throw ValidationError("empty class in test split");

  nn::Matrix x_train(15, train_idx.size());
  std::vector<int> y_train(train_idx.size());
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    TactileSignal z = apply(ds.standardizer, ds.signals[train_idx[i]]);
    for (int k = 0; k < 15; ++k) x_train(k, i) = z.values[k];
    y_train[i] = ds.labels[train_idx[i]];
  }

  Rng init_rng(hyper.seed);
  nn::DenseNet net = nn::make_net(
      {15, 500, 10, kStampClasses},
      {nn::Activation::relu, nn::Activation::identity, nn::Activation::identity}, init_rng);
  nn::AdamState opt;
  opt.lr = hyper.lr;
  opt.init(net);

  const std::size_t n_train = train_idx.size();
  std::vector<std::size_t> order(n_train);
  for (std::size_t i = 0; i < n_train; ++i) order[i] = i;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng shuffle(Rng::derive(hyper.seed, std::uint64_t(epoch) + 1));
    for (std::size_t i = n_train; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
    for (std::size_t lo = 0; lo < n_train; lo += std::size_t(hyper.batch)) {
      std::size_t want = std::min(std::size_t(hyper.batch), n_train - lo);
      nn::Matrix xb(15, want);
      std::vector<int> yb(want);
      for (std::size_t c = 0; c < want; ++c) {
        xb.col(c) = x_train.col(order[lo + c]);
        yb[c] = y_train[order[lo + c]];
      }
      nn::ForwardCache cache;
      nn::Matrix logits = nn::forward(net, xb, &cache);
      nn::Gradients grads = nn::zero_gradients(net);
      nn::backward(net, cache, nn::cross_entropy_grad(logits, yb), grads);
      nn::opt_step(opt, net, grads);
    }
  }

  StampReport report;
  report.test_counts = test_counts;
  for (std::size_t k : test_idx) {
    int truth = ds.labels[k];
    int pred = classify(net, ds.standardizer, ds.signals[k]);
    report.confusion[std::size_t(truth)][std::size_t(pred)] += 1;
  }
  int correct = 0;
  for (int c = 0; c < kStampClasses; ++c) {
    int diag = report.confusion[std::size_t(c)][std::size_t(c)];
    correct += diag;
    report.per_class_accuracy[std::size_t(c)] = double(diag) / double(test_counts[std::size_t(c)]);
  }
  report.total_accuracy = double(correct) / double(test_idx.size());
  return {std::move(net), report};
}

}  // namespace i2t
