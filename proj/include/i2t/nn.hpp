#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "i2t/rng.hpp"

namespace i2t::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation : std::uint8_t { identity = 0, relu = 1 };

struct Layer {
  Matrix w;  // out x in
  Vector b;  // out
  Activation act = Activation::identity;
};

struct DenseNet {
  std::vector<Layer> layers;

  int in_dim() const { return layers.empty() ? 0 : int(layers.front().w.cols()); }
  int out_dim() const { return layers.empty() ? 0 : int(layers.back().w.rows()); }
  std::size_t parameter_count() const;
};

// Fan-in scaled uniform init, weights U(-1/sqrt(in), 1/sqrt(in)) drawn
// row-major layer by layer, biases zero. dims has one more entry than acts.
DenseNet make_net(const std::vector<int>& dims, const std::vector<Activation>& acts, Rng& rng);

// Batched activations, one column per sample.
struct ForwardCache {
  std::vector<Matrix> inputs;  // per layer: what the affine saw
  std::vector<Matrix> pre;     // per layer: pre-activation values
};

// x is in_dim x batch; returns out_dim x batch. The cache, when requested,
// holds what backward needs.
Matrix forward(const DenseNet& net, const Matrix& x, ForwardCache* cache = nullptr);
Vector forward1(const DenseNet& net, const Vector& x);

struct Gradients {
  std::vector<Matrix> w;
  std::vector<Vector> b;
};
Gradients zero_gradients(const DenseNet& net);

// Reverse-mode pass: dLdy is the loss gradient at the output (out_dim x
// batch). Fills parameter gradients and returns the input gradient. The relu
// subgradient at exactly 0 is 0.
Matrix backward(const DenseNet& net, const ForwardCache& cache, const Matrix& dLdy,
                Gradients& grads);

// Mean over every component (and over the batch for the matrix form).
double mse(const Vector& pred, const Vector& target);
double mse(const Matrix& pred, const Matrix& target);
Vector mse_grad(const Vector& pred, const Vector& target);
Matrix mse_grad(const Matrix& pred, const Matrix& target);

// Stabilized -log softmax(logits)[cls]; batch form averages over columns.
double cross_entropy(const Vector& logits, int cls);
Vector cross_entropy_grad(const Vector& logits, int cls);
double cross_entropy(const Matrix& logits, const std::vector<int>& cls);
Matrix cross_entropy_grad(const Matrix& logits, const std::vector<int>& cls);

// Adaptive-moment optimizer with bias correction.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Matrix> mw, vw;
  std::vector<Vector> mb, vb;

  void init(const DenseNet& net);
};
void opt_step(AdamState& state, DenseNet& net, const Gradients& grads);

// Central-difference check (step 1e-5) of `analytic` against `loss`, probing
// at most `max_params` parameters chosen at random but covering every weight
// and bias block. Returns the max relative error, |a - f| scaled by
// max(|a|, |f|, 1e-6).
double gradcheck(DenseNet& net, const std::function<double(const DenseNet&)>& loss,
                 const Gradients& analytic, Rng& rng, int max_params = 200, double step = 1e-5);

// Net block layout: u32 layer count, then per layer u32 in, u32 out, u8
// activation, f32 weights row-major, f32 bias. All little-endian.
void write_net(std::ostream& out, const DenseNet& net);
DenseNet read_net(std::istream& in);

// Model file: magic "I2TM", u32 version, then one net block.
void save_net(const DenseNet& net, const std::string& path);
DenseNet load_net(const std::string& path);

}  // namespace i2t::nn
