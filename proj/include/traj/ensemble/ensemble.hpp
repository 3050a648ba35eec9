#pragma once

#include <string>
#include <vector>

#include "traj/predictor/model.hpp"

namespace traj {

struct EnsemblePrediction {
    std::vector<std::array<double, 2>> mean;  // t_f positions
    std::vector<double> var_x, var_y;         // per-step variances, floored
    std::vector<Prediction> member_predictions;
};

constexpr double kVarianceFloor = 1e-6;  // m^2

// member k trained with seed = config.seed + k (independent init + shuffle)
std::vector<ModelParams> train_ensemble(
    const std::vector<PredictionWindow>& windows, const TrainingConfig& config,
    int ensemble_size = 5, std::vector<std::vector<double>>* epoch_losses = nullptr);

// arithmetic member mean; per-coordinate sample variance with divisor K-1
EnsemblePrediction ensemble_predict(const std::vector<ModelParams>& members,
                                    const PredictionWindow& window);

// K stochastic forward passes with masks derived from seed + k
EnsemblePrediction mc_dropout_predict(const ModelParams& params,
                                      const PredictionWindow& window,
                                      int passes = 5, long seed = 0);

// average predictive entropy over all steps, nats (independent-axis Gaussian)
double ape(const EnsemblePrediction& pred);
// predictive entropy of the final step only
double fpe(const EnsemblePrediction& pred);

// checkpoint directory: member_<k>.ckpt files plus ensemble.json
void save_ensemble(const std::vector<ModelParams>& members,
                   const std::string& dir);
std::vector<ModelParams> load_ensemble(const std::string& dir);

}  // namespace traj
