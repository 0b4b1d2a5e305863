#include "i2t/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "i2t/errors.hpp"

namespace i2t::nn {

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += std::size_t(l.w.size()) + std::size_t(l.b.size());
  return n;
}

DenseNet make_net(const std::vector<int>& dims, const std::vector<Activation>& acts, Rng& rng) {
  if (dims.size() < 2 || acts.size() + 1 != dims.size())
    throw ValidationError("make_net: dims must be one longer than acts");
  DenseNet net;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] <= 0 || dims[l + 1] <= 0) throw ValidationError("make_net: dims must be > 0");
    Layer layer;
    layer.w.resize(dims[l + 1], dims[l]);
    double s = 1.0 / std::sqrt(double(dims[l]));
    for (int r = 0; r < layer.w.rows(); ++r)
      for (int c = 0; c < layer.w.cols(); ++c) layer.w(r, c) = rng.uniform(-s, s);
    layer.b = Vector::Zero(dims[l + 1]);
    layer.act = acts[l];
    net.layers.push_back(std::move(layer));
  }
  return net;
}

Gradients zero_gradients(const DenseNet& net) {
  Gradients g;
  for (const Layer& l : net.layers) {
    g.w.push_back(Matrix::Zero(l.w.rows(), l.w.cols()));
    g.b.push_back(Vector::Zero(l.b.size()));
  }
  return g;
}

Matrix forward(const DenseNet& net, const Matrix& x, ForwardCache* cache) {
  if (net.layers.empty()) throw ValidationError("empty network");
  if (x.rows() != net.in_dim()) throw ValidationError("forward: input dimension mismatch");
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Matrix a = x;
  for (const Layer& l : net.layers) {
    if (cache) cache->inputs.push_back(a);
    Matrix z = (l.w * a).colwise() + l.b;
    if (cache) cache->pre.push_back(z);
    a = l.act == Activation::relu ? z.cwiseMax(0.0).eval() : std::move(z);
  }
  return a;
}

Vector forward1(const DenseNet& net, const Vector& x) { return forward(net, Matrix(x)).col(0); }

Matrix backward(const DenseNet& net, const ForwardCache& cache, const Matrix& dLdy,
                Gradients& grads) {
  const std::size_t n = net.layers.size();
  if (cache.inputs.size() != n || cache.pre.size() != n)
    throw ValidationError("backward: cache does not match network");
  if (grads.w.size() != n || grads.b.size() != n)
    throw ValidationError("backward: gradient holder does not match network");
  if (dLdy.rows() != net.out_dim() || dLdy.cols() != cache.pre.back().cols())
    throw ValidationError("backward: output gradient shape mismatch");

  Matrix delta = dLdy;
  for (std::size_t i = n; i-- > 0;) {
    const Layer& l = net.layers[i];
    if (cache.inputs[i].rows() != l.w.cols() || cache.pre[i].rows() != l.w.rows())
      throw ValidationError("backward: stale cache");
    if (l.act == Activation::relu)
      delta = delta.cwiseProduct((cache.pre[i].array() > 0.0).cast<double>().matrix());
    grads.w[i] = delta * cache.inputs[i].transpose();
    grads.b[i] = delta.rowwise().sum();
    if (i > 0) delta = l.w.transpose() * delta;
  }
  return net.layers.front().w.transpose() * delta;
}

double mse(const Vector& pred, const Vector& target) {
  if (pred.size() != target.size()) throw ValidationError("mse: length mismatch");
  return (pred - target).squaredNorm() / double(pred.size());
}

double mse(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw ValidationError("mse: shape mismatch");
  return (pred - target).squaredNorm() / double(pred.size());
}

Vector mse_grad(const Vector& pred, const Vector& target) {
  if (pred.size() != target.size()) throw ValidationError("mse_grad: length mismatch");
  return 2.0 / double(pred.size()) * (pred - target);
}

Matrix mse_grad(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw ValidationError("mse_grad: shape mismatch");
  return 2.0 / double(pred.size()) * (pred - target);
}

namespace {

double log_sum_exp(const Vector& v) {
  double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

double cross_entropy(const Vector& logits, int cls) {
  if (cls < 0 || cls >= logits.size()) throw ValidationError("cross_entropy: class out of range");
  return log_sum_exp(logits) - logits[cls];
}

Vector cross_entropy_grad(const Vector& logits, int cls) {
  if (cls < 0 || cls >= logits.size())
    throw ValidationError("cross_entropy_grad: class out of range");
  double m = logits.maxCoeff();
  Vector p = (logits.array() - m).exp();
  p /= p.sum();
  p[cls] -= 1.0;
  return p;
}

double cross_entropy(const Matrix& logits, const std::vector<int>& cls) {
  if (std::size_t(logits.cols()) != cls.size())
    throw ValidationError("cross_entropy: batch size mismatch");
  double total = 0.0;
  for (int c = 0; c < logits.cols(); ++c) total += cross_entropy(Vector(logits.col(c)), cls[c]);
  return total / double(logits.cols());
}

Matrix cross_entropy_grad(const Matrix& logits, const std::vector<int>& cls) {
  if (std::size_t(logits.cols()) != cls.size())
    throw ValidationError("cross_entropy_grad: batch size mismatch");
  Matrix g(logits.rows(), logits.cols());
  for (int c = 0; c < logits.cols(); ++c)
    g.col(c) = cross_entropy_grad(Vector(logits.col(c)), cls[c]) / double(logits.cols());
  return g;
}

void AdamState::init(const DenseNet& net) {
  step = 0;
  mw.clear();
  vw.clear();
  mb.clear();
  vb.clear();
  for (const Layer& l : net.layers) {
    mw.push_back(Matrix::Zero(l.w.rows(), l.w.cols()));
    vw.push_back(Matrix::Zero(l.w.rows(), l.w.cols()));
    mb.push_back(Vector::Zero(l.b.size()));
    vb.push_back(Vector::Zero(l.b.size()));
  }
}

void opt_step(AdamState& state, DenseNet& net, const Gradients& grads) {
  const std::size_t n = net.layers.size();
  if (state.mw.size() != n || grads.w.size() != n)
    throw ValidationError("opt_step: state/gradient shape mismatch");
  state.step += 1;
  double c1 = 1.0 - std::pow(state.beta1, double(state.step));
  double c2 = 1.0 - std::pow(state.beta2, double(state.step));
  for (std::size_t i = 0; i < n; ++i) {
    Layer& l = net.layers[i];
    if (grads.w[i].rows() != l.w.rows() || grads.w[i].cols() != l.w.cols() ||
        grads.b[i].size() != l.b.size())
      throw ValidationError("opt_step: gradient shape mismatch");
    state.mw[i] = state.beta1 * state.mw[i] + (1.0 - state.beta1) * grads.w[i];
    state.vw[i] = state.beta2 * state.vw[i] + (1.0 - state.beta2) * grads.w[i].cwiseProduct(grads.w[i]);
    state.mb[i] = state.beta1 * state.mb[i] + (1.0 - state.beta1) * grads.b[i];
    state.vb[i] = state.beta2 * state.vb[i] + (1.0 - state.beta2) * grads.b[i].cwiseProduct(grads.b[i]);
    l.w.array() -=
        state.lr * (state.mw[i] / c1).array() / ((state.vw[i] / c2).array().sqrt() + state.eps);
    l.b.array() -=
        state.lr * (state.mb[i] / c1).array() / ((state.vb[i] / c2).array().sqrt() + state.eps);
  }
}

namespace {

struct ParamRef {
  std::size_t layer;
  bool is_bias;
  long index;  // flat index within the block
};

double& param_at(DenseNet& net, const ParamRef& ref) {
  Layer& l = net.layers[ref.layer];
  return ref.is_bias ? l.b[ref.index] : l.w.data()[ref.index];
}

double grad_at(const Gradients& g, const ParamRef& ref) {
  return ref.is_bias ? g.b[ref.layer][ref.index] : g.w[ref.layer].data()[ref.index];
}

}  // namespace

double gradcheck(DenseNet& net, const std::function<double(const DenseNet&)>& loss,
                 const Gradients& analytic, Rng& rng, int max_params, double step) {
  // One entry per block so small nets are covered exhaustively and large ones
  // still probe every weight matrix and bias vector.
  struct Block {
    std::size_t layer;
    bool is_bias;
    long size;
  };
  std::vector<Block> blocks;
  long total = 0;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    blocks.push_back({i, false, long(net.layers[i].w.size())});
    blocks.push_back({i, true, long(net.layers[i].b.size())});
    total += net.layers[i].w.size() + net.layers[i].b.size();
  }

  std::vector<ParamRef> picks;
  if (total <= max_params) {
    for (const Block& blk : blocks)
      for (long k = 0; k < blk.size; ++k) picks.push_back({blk.layer, blk.is_bias, k});
  } else {
    for (const Block& blk : blocks) {
      long want = std::max<long>(8, max_params * blk.size / total);
      want = std::min(want, blk.size);
      for (long k = 0; k < want; ++k)
        picks.push_back({blk.layer, blk.is_bias, long(rng.below(std::uint64_t(blk.size)))});
    }
    while (long(picks.size()) > max_params) {
      picks[rng.below(picks.size())] = picks.back();
      picks.pop_back();
    }
  }

  double worst = 0.0;
  for (const ParamRef& ref : picks) {
    double& p = param_at(net, ref);
    const double saved = p;
    p = saved + step;
    double up = loss(net);
    p = saved - step;
    double down = loss(net);
    p = saved;
    double fd = (up - down) / (2.0 * step);
    double an = grad_at(analytic, ref);
    double err = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-6});
    worst = std::max(worst, err);
  }
  return worst;
}

namespace {

constexpr char kMagic[4] = {'I', '2', 'T', 'M'};
constexpr std::uint32_t kVersion = 1;

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

void write_f32(std::ostream& out, double v) {
  float f = float(v);
  std::uint32_t bits;
  static_assert(sizeof(bits) == sizeof(f));
  std::memcpy(&bits, &f, 4);
  write_u32(out, bits);
}

double read_f32(std::istream& in) {
  std::uint32_t bits = read_u32(in);
  float f;
  std::memcpy(&f, &bits, 4);
  return double(f);
}

}  // namespace

void write_net(std::ostream& out, const DenseNet& net) {
  write_u32(out, std::uint32_t(net.layers.size()));
  for (const Layer& l : net.layers) {
    write_u32(out, std::uint32_t(l.w.cols()));
    write_u32(out, std::uint32_t(l.w.rows()));
    unsigned char act = static_cast<unsigned char>(l.act);
    out.write(reinterpret_cast<const char*>(&act), 1);
    for (int r = 0; r < l.w.rows(); ++r)
      for (int c = 0; c < l.w.cols(); ++c) write_f32(out, l.w(r, c));
    for (int r = 0; r < l.b.size(); ++r) write_f32(out, l.b[r]);
  }
}

DenseNet read_net(std::istream& in) {
  std::uint32_t layer_count = read_u32(in);
  DenseNet net;
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    std::uint32_t in_dim = read_u32(in);
    std::uint32_t out_dim = read_u32(in);
    unsigned char act;
    if (!in.read(reinterpret_cast<char*>(&act), 1)) throw IoError("model file truncated");
    if (act > 1) throw IoError("unknown activation code in model file");
    Layer l;
    l.act = static_cast<Activation>(act);
    l.w.resize(out_dim, in_dim);
    for (std::uint32_t r = 0; r < out_dim; ++r)
      for (std::uint32_t c = 0; c < in_dim; ++c) l.w(r, c) = read_f32(in);
    l.b.resize(out_dim);
    for (std::uint32_t r = 0; r < out_dim; ++r) l.b[r] = read_f32(in);
    net.layers.push_back(std::move(l));
  }
  for (std::size_t i = 1; i < net.layers.size(); ++i)
    if (net.layers[i].w.cols() != net.layers[i - 1].w.rows())
      throw IoError("model file layer dimensions do not chain");
  return net;
}

void save_net(const DenseNet& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open model file for writing: " + path);
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_net(out, net);
  if (!out) throw IoError("failed writing model file: " + path);
}

DenseNet load_net(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  char magic[4];
  if (!in.read(magic, 4)) throw IoError("model file truncated");
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError("bad model file magic");
  if (read_u32(in) != kVersion) throw IoError("unsupported model file version");
  return read_net(in);
}

}  // namespace i2t::nn
