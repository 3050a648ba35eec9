#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "traj/dataset/types.hpp"

namespace traj {

struct Tensor {
    std::string name;
    std::size_t rows = 0, cols = 0;  // cols == 1 for vectors
    std::vector<double> v;

    Tensor() = default;
    Tensor(std::string n, std::size_t r, std::size_t c)
        : name(std::move(n)), rows(r), cols(c), v(r * c, 0.0) {}
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
    std::size_t size() const { return v.size(); }
    double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

// Tensor indices within ModelParams::tensors. Gate weight naming: W* act on
// the step input, U* on the previous hidden state.
enum TensorId : int {
    kCtxW = 0, kCtxB,
    kEncWz, kEncWr, kEncWc, kEncUz, kEncUr, kEncUc, kEncBz, kEncBr, kEncBc,
    kDecWz, kDecWr, kDecWc, kDecUz, kDecUr, kDecUc, kDecBz, kDecBr, kDecBc,
    kOutW, kOutB,
    kTensorCount
};

// input per encoder step: [target dx, dy, context(4)];
// context = linear map of [mean neighbor rel pos (2), mean rel vel (2)]
constexpr int kInputDim = 6;
constexpr int kCtxDim = 4;
constexpr int kOutputDim = 2;

struct ModelParams {
    int hidden = 64;
    double dropout_rate = 0.0;
    std::vector<Tensor> tensors;

    Tensor& t(TensorId id) { return tensors[id]; }
    const Tensor& t(TensorId id) const { return tensors[id]; }
    bool weight_tensor(int id) const;  // true for matrices (l2-regularized)
};

// zero-valued parameter set with the declared shapes
ModelParams make_params(int hidden);

// uniform +-1/sqrt(fan_in) weights, zero biases; deterministic in seed
ModelParams init_model(long seed, int hidden = 64, double dropout_rate = 0.0);

struct Prediction {
    std::vector<std::array<double, 2>> positions;
};

// constant-velocity baseline from the last history displacement
Prediction cv_predict(const PredictionWindow& window);

Prediction forward(const ModelParams& params, const PredictionWindow& window,
                   bool dropout_on = false, long rng_seed = 0);

struct TrainingConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int batch_size = 64;
    int epochs = 30;
    double l2_coefficient = 0.0;  // 1e-4 when dropout is enabled
    double dropout_rate = 0.0;
    int hidden = 64;
    long seed = 1;
};

struct LossGrad {
    double loss = 0.0;
    ModelParams gradients;  // same shapes as the parameters
};

// mean squared Euclidean position error over all predicted points of the
// batch, plus l2 * ||weights||^2; gradients by reverse-mode differentiation.
// When dropout_rate > 0 an independent mask per window/step is drawn from
// dropout_seed.
LossGrad loss_and_gradients(const ModelParams& params,
                            const std::vector<PredictionWindow>& batch,
                            const TrainingConfig& config,
                            long dropout_seed = 0);

struct TrainResult {
    ModelParams params;
    std::vector<double> epoch_losses;
};

TrainResult train(const std::vector<PredictionWindow>& windows,
                  const TrainingConfig& config);

struct GradCheckReport {
    double max_rel_error = 0.0;
    int n_checked = 0;
    bool pass = false;
};

// analytic vs central-difference gradients on a small random model/batch;
// corrupt_index >= 0 perturbs one analytic entry (negative-control hook)
GradCheckReport grad_check(int hidden = 8, long seed = 1,
                           double tolerance = 1e-4, int n_samples = 120,
                           int corrupt_index = -1);

void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace traj
