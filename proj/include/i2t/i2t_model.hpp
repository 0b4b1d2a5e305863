#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "i2t/dataset.hpp"
#include "i2t/nn.hpp"

namespace i2t {

// Depth-to-touch network: a shared encoder squeezes the flattened 48x48
// patch through a 5-dim bottleneck; one head predicts the standardized
// tactile signal, the other reconstructs the input as an auxiliary task.
struct I2TModel {
  nn::DenseNet encoder;     // 2304 -> 200 (relu) -> 5 (identity)
  nn::DenseNet touch_head;  // 5 -> 500 (relu) -> 15 (identity)
  nn::DenseNet recon_head;  // 5 -> 2000 (relu) -> 2304 (identity)
  Standardizer standardizer;
  double aux_weight = 0.5;
};

// Seeded initialization of the fixed architecture. The standardizer starts
// as identity (mean 0, std 1) until training fills it in.
I2TModel make_i2t_model(std::uint64_t seed, double aux_weight = 0.5);

std::size_t i2t_parameter_count(const I2TModel& model);

// Patch -> standardized 15-dim prediction.
TactileSignal predict_touch(const I2TModel& model, const PatchGrid& patch);
// Batched form: columns are flattened patches; returns 15 x n predictions.
nn::Matrix predict_touch_batch(const I2TModel& model, const nn::Matrix& patches);

// mse(touch prediction, target) + aux_weight * mse(reconstruction, patch).
// The target must be standardized.
double total_loss(const I2TModel& model, const PatchGrid& patch, const TactileSignal& target);

struct TrainHyper {
  int epochs = 150;
  int batch = 32;
  double lr = 1e-3;
  double aux_weight = 0.5;
  std::uint64_t seed = 0;
};

struct TrainReport {
  std::vector<double> train_touch_mse;
  std::vector<double> train_recon_mse;
  std::vector<double> val_touch_mse;
  std::vector<double> val_recon_mse;
  int best_epoch = -1;             // index into the series; -1 when epochs == 0
  double final_val_touch_mse = 0;  // at the selected epoch
  double baseline_val_touch_mse = 0;  // constant train-mean predictor
  std::uint64_t seed = 0;
  TrainHyper hyper;
};

// Minibatch training of total_loss over the dataset's train split, tracking
// both splits each epoch and returning the weights from the epoch with the
// lowest validation touch-MSE. Deterministic for a fixed seed.
std::pair<I2TModel, TrainReport> train(const Dataset& ds, const TrainHyper& hyper);

struct EvalReport {
  double touch_mse = 0.0;  // held-out split, standardized units
  double recon_mse = 0.0;
  double baseline_mse = 0.0;  // constant train-mean predictor on the same split
};

// Validation-split error of a trained model against the dataset it is
// evaluated on, next to the constant-mean baseline.
EvalReport evaluate_on_split(const I2TModel& model, const Dataset& ds);

// Model file: magic "I2TF", u32 version, three net blocks (encoder, touch,
// recon), then standardizer mean and std as 15 + 15 f32.
void save_model(const I2TModel& model, const std::string& path);
I2TModel load_model(const std::string& path);

}  // namespace i2t
