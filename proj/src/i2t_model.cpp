#include "i2t/i2t_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "i2t/errors.hpp"

namespace i2t {

using nn::Activation;
using nn::Matrix;
using nn::Vector;

I2TModel make_i2t_model(std::uint64_t seed, double aux_weight) {
  if (!(aux_weight >= 0.0)) throw ValidationError("aux_weight must be >= 0");
  Rng rng(seed);
  I2TModel m;
  m.encoder = nn::make_net({kPatchPixels, 200, 5}, {Activation::relu, Activation::identity}, rng);
  m.touch_head = nn::make_net({5, 500, 15}, {Activation::relu, Activation::identity}, rng);
  m.recon_head =
      nn::make_net({5, 2000, kPatchPixels}, {Activation::relu, Activation::identity}, rng);
  m.standardizer.mean.fill(0.0);
  m.standardizer.std.fill(1.0);
  m.aux_weight = aux_weight;
  return m;
}

std::size_t i2t_parameter_count(const I2TModel& model) {
  return model.encoder.parameter_count() + model.touch_head.parameter_count() +
         model.recon_head.parameter_count();
}

namespace {

Vector flatten(const PatchGrid& patch) {
  Vector v(kPatchPixels);
  for (int k = 0; k < kPatchPixels; ++k) v[k] = patch[k];
  return v;
}

}  // namespace

nn::Matrix predict_touch_batch(const I2TModel& model, const Matrix& patches) {
  return nn::forward(model.touch_head, nn::forward(model.encoder, patches));
}

TactileSignal predict_touch(const I2TModel& model, const PatchGrid& patch) {
  Vector out = predict_touch_batch(model, Matrix(flatten(patch))).col(0);
  TactileSignal sig;
  sig.space = SignalSpace::standardized;
  for (int k = 0; k < 15; ++k) sig.values[k] = out[k];
  return sig;
}

double total_loss(const I2TModel& model, const PatchGrid& patch, const TactileSignal& target) {
  if (target.space != SignalSpace::standardized)
    throw ValidationError("unstandardized target");
  Vector x = flatten(patch);
  Vector code = nn::forward(model.encoder, Matrix(x)).col(0);
  Vector touch = nn::forward(model.touch_head, Matrix(code)).col(0);
  Vector t(15);
  for (int k = 0; k < 15; ++k) t[k] = target.values[k];
  double loss = nn::mse(touch, t);
  if (model.aux_weight > 0.0) {
    Vector recon = nn::forward(model.recon_head, Matrix(code)).col(0);
    loss += model.aux_weight * nn::mse(recon, x);
  }
  return loss;
}

namespace {

struct SplitMatrices {
  Matrix x_train, y_train, x_val, y_val;
};

SplitMatrices build_matrices(const Dataset& ds) {
  std::size_t n_train = 0, n_val = 0;
  for (auto v : ds.split) (v ? n_train : n_val) += 1;
  if (n_train == 0 || n_val == 0) throw ValidationError("empty split");
  SplitMatrices m;
  m.x_train.resize(kPatchPixels, n_train);
  m.y_train.resize(15, n_train);
  m.x_val.resize(kPatchPixels, n_val);
  m.y_val.resize(15, n_val);
  std::size_t it = 0, iv = 0;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const TouchSample& s = ds.samples[i];
    TactileSignal z = apply(ds.standardizer, s.signal_raw);
    if (ds.split[i]) {
      for (int k = 0; k < kPatchPixels; ++k) m.x_train(k, it) = s.patch[k];
      for (int k = 0; k < 15; ++k) m.y_train(k, it) = z.values[k];
      ++it;
    } else {
      for (int k = 0; k < kPatchPixels; ++k) m.x_val(k, iv) = s.patch[k];
      for (int k = 0; k < 15; ++k) m.y_val(k, iv) = z.values[k];
      ++iv;
    }
  }
  return m;
}

struct EvalResult {
  double touch;
  double recon;
};

EvalResult evaluate(const I2TModel& model, const Matrix& x, const Matrix& y) {
  const int chunk = 512;
  double touch_sq = 0.0, recon_sq = 0.0;
  for (int lo = 0; lo < x.cols(); lo += chunk) {
    int want = std::min<int>(chunk, int(x.cols()) - lo);
    Matrix xb = x.middleCols(lo, want);
    Matrix code = nn::forward(model.encoder, xb);
    touch_sq += (nn::forward(model.touch_head, code) - y.middleCols(lo, want)).squaredNorm();
    recon_sq += (nn::forward(model.recon_head, code) - xb).squaredNorm();
  }
  return {touch_sq / double(y.size()), recon_sq / double(x.size())};
}

}  // namespace

std::pair<I2TModel, TrainReport> train(const Dataset& ds, const TrainHyper& hyper) {
  if (hyper.epochs < 0 || hyper.batch < 1) throw ValidationError("bad training hyperparameters");
  if (ds.split.size() != ds.samples.size())
    throw ValidationError("dataset split does not match samples");
  SplitMatrices m = build_matrices(ds);

  I2TModel model = make_i2t_model(hyper.seed, hyper.aux_weight);
  model.standardizer = ds.standardizer;

  TrainReport report;
  report.seed = hyper.seed;
  report.hyper = hyper;

  // Constant-predictor oracle: train-mean standardized signal on held-out.
  Vector train_mean = m.y_train.rowwise().mean();
  report.baseline_val_touch_mse =
      (m.y_val.colwise() - train_mean).squaredNorm() / double(m.y_val.size());

  nn::AdamState opt_enc, opt_touch, opt_recon;
  opt_enc.lr = opt_touch.lr = opt_recon.lr = hyper.lr;
  opt_enc.init(model.encoder);
  opt_touch.init(model.touch_head);
  opt_recon.init(model.recon_head);

  I2TModel best = model;
  double best_val = std::numeric_limits<double>::infinity();
  const std::size_t n_train = std::size_t(m.x_train.cols());
  std::vector<std::size_t> order(n_train);
  for (std::size_t i = 0; i < n_train; ++i) order[i] = i;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng shuffle(Rng::derive(hyper.seed, std::uint64_t(epoch) + 1));
    for (std::size_t i = n_train; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    for (std::size_t lo = 0; lo < n_train; lo += std::size_t(hyper.batch)) {
      std::size_t want = std::min(std::size_t(hyper.batch), n_train - lo);
      Matrix xb(kPatchPixels, want), yb(15, want);
      for (std::size_t c = 0; c < want; ++c) {
        xb.col(c) = m.x_train.col(order[lo + c]);
        yb.col(c) = m.y_train.col(order[lo + c]);
      }
      nn::ForwardCache cache_enc, cache_touch, cache_recon;
      Matrix code = nn::forward(model.encoder, xb, &cache_enc);
      Matrix touch = nn::forward(model.touch_head, code, &cache_touch);
      Matrix recon = nn::forward(model.recon_head, code, &cache_recon);

      nn::Gradients g_enc = nn::zero_gradients(model.encoder);
      nn::Gradients g_touch = nn::zero_gradients(model.touch_head);
      nn::Gradients g_recon = nn::zero_gradients(model.recon_head);
      Matrix dcode = nn::backward(model.touch_head, cache_touch, nn::mse_grad(touch, yb), g_touch);
      dcode += nn::backward(model.recon_head, cache_recon,
                            hyper.aux_weight * nn::mse_grad(recon, xb), g_recon);
      nn::backward(model.encoder, cache_enc, dcode, g_enc);

      nn::opt_step(opt_enc, model.encoder, g_enc);
      nn::opt_step(opt_touch, model.touch_head, g_touch);
      nn::opt_step(opt_recon, model.recon_head, g_recon);
    }

    EvalResult tr = evaluate(model, m.x_train, m.y_train);
    EvalResult va = evaluate(model, m.x_val, m.y_val);
    if (!std::isfinite(tr.touch) || !std::isfinite(va.touch))
      throw Error("training diverged to a non-finite loss");
    report.train_touch_mse.push_back(tr.touch);
    report.train_recon_mse.push_back(tr.recon);
    report.val_touch_mse.push_back(va.touch);
    report.val_recon_mse.push_back(va.recon);
    if (va.touch < best_val) {
      best_val = va.touch;
      best = model;
      report.best_epoch = epoch;
    }
  }

  if (hyper.epochs == 0) {
    report.final_val_touch_mse = evaluate(model, m.x_val, m.y_val).touch;
    return {model, report};
  }
  report.final_val_touch_mse = best_val;
  return {best, report};
}

EvalReport evaluate_on_split(const I2TModel& model, const Dataset& ds) {
  if (ds.split.size() != ds.samples.size())
    throw ValidationError("dataset split does not match samples");
  SplitMatrices m = build_matrices(ds);
  EvalResult val = evaluate(model, m.x_val, m.y_val);
  Vector train_mean = m.y_train.rowwise().mean();
  EvalReport report;
  report.touch_mse = val.touch;
  report.recon_mse = val.recon;
  report.baseline_mse = (m.y_val.colwise() - train_mean).squaredNorm() / double(m.y_val.size());
  return report;
}

namespace {

constexpr char kModelMagic[4] = {'I', '2', 'T', 'F'};
constexpr std::uint32_t kModelVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                        (unsigned char)((v >> 16) & 0xff), (unsigned char)((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("model file truncated");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

void check_architecture(const I2TModel& m) {
  auto dims_ok = [](const nn::DenseNet& net, int in, int hidden, int out) {
    return net.layers.size() == 2 && net.layers[0].w.cols() == in &&
           net.layers[0].w.rows() == hidden && net.layers[1].w.rows() == out &&
           net.layers[0].act == Activation::relu && net.layers[1].act == Activation::identity;
  };
  if (!dims_ok(m.encoder, kPatchPixels, 200, 5) || !dims_ok(m.touch_head, 5, 500, 15) ||
      !dims_ok(m.recon_head, 5, 2000, kPatchPixels))
    throw IoError("model file does not hold the expected architecture");
}

}  // namespace

void save_model(const I2TModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open model file for writing: " + path);
  out.write(kModelMagic, 4);
  write_u32(out, kModelVersion);
  nn::write_net(out, model.encoder);
  nn::write_net(out, model.touch_head);
  nn::write_net(out, model.recon_head);
  for (double v : model.standardizer.mean) {
    float f = float(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    write_u32(out, bits);
  }
  for (double v : model.standardizer.std) {
    float f = float(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    write_u32(out, bits);
  }
  if (!out) throw IoError("failed writing model file: " + path);
}

I2TModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  char magic[4];
  if (!in.read(magic, 4)) throw IoError("model file truncated");
  if (std::memcmp(magic, kModelMagic, 4) != 0) throw IoError("bad model file magic");
  if (read_u32(in) != kModelVersion) throw IoError("unsupported model file version");
  I2TModel m;
  m.encoder = nn::read_net(in);
  m.touch_head = nn::read_net(in);
  m.recon_head = nn::read_net(in);
  for (double& v : m.standardizer.mean) {
    std::uint32_t bits = read_u32(in);
    float f;
    std::memcpy(&f, &bits, 4);
    v = double(f);
  }
  for (double& v : m.standardizer.std) {
    std::uint32_t bits = read_u32(in);
    float f;
    std::memcpy(&f, &bits, 4);
    v = double(f);
  }
  check_architecture(m);
  return m;
}

}  // namespace i2t
