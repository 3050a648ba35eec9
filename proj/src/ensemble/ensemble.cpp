#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "traj/ensemble/ensemble.hpp"

namespace traj {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

EnsemblePrediction aggregate(std::vector<Prediction> preds) {
    const std::size_t K = preds.size();
    const std::size_t t_f = preds.front().positions.size();
    EnsemblePrediction out;
    out.mean.assign(t_f, {0.0, 0.0});
    out.var_x.assign(t_f, 0.0);
    out.var_y.assign(t_f, 0.0);
    for (const auto& p : preds)
        for (std::size_t i = 0; i < t_f; ++i) {
            out.mean[i][0] += p.positions[i][0];
            out.mean[i][1] += p.positions[i][1];
        }
    const double inv_k = 1.0 / static_cast<double>(K);
    for (auto& m : out.mean) {
        m[0] *= inv_k;
        m[1] *= inv_k;
    }
    const double inv_km1 = 1.0 / static_cast<double>(K - 1);
    for (const auto& p : preds)
        for (std::size_t i = 0; i < t_f; ++i) {
            const double dx = p.positions[i][0] - out.mean[i][0];
            const double dy = p.positions[i][1] - out.mean[i][1];
            out.var_x[i] += dx * dx * inv_km1;
            out.var_y[i] += dy * dy * inv_km1;
        }
    for (std::size_t i = 0; i < t_f; ++i) {
        out.var_x[i] = std::max(out.var_x[i], kVarianceFloor);
        out.var_y[i] = std::max(out.var_y[i], kVarianceFloor);
    }
    out.member_predictions = std::move(preds);
    return out;
}

double step_entropy(double var_x, double var_y) {
    return (std::log(kTwoPi) + 1.0) + 0.5 * std::log(var_x * var_y);
}

}  // namespace

std::vector<ModelParams> train_ensemble(
    const std::vector<PredictionWindow>& windows, const TrainingConfig& config,
    int ensemble_size, std::vector<std::vector<double>>* epoch_losses) {
    if (ensemble_size < 2)
        throw std::runtime_error("ensemble needs at least 2 members");
    std::vector<ModelParams> members;
    members.reserve(ensemble_size);
    if (epoch_losses != nullptr) epoch_losses->clear();
    for (int k = 0; k < ensemble_size; ++k) {
        TrainingConfig member_config = config;
        member_config.seed = config.seed + k;
        TrainResult result = train(windows, member_config);
        if (epoch_losses != nullptr)
            epoch_losses->push_back(result.epoch_losses);
        members.push_back(std::move(result.params));
    }
    return members;
}

EnsemblePrediction ensemble_predict(const std::vector<ModelParams>& members,
                                    const PredictionWindow& window) {
    if (members.size() < 2)
        throw std::runtime_error("ensemble_predict needs at least 2 members");
    std::vector<Prediction> preds;
    preds.reserve(members.size());
    for (const auto& m : members) preds.push_back(forward(m, window));
    return aggregate(std::move(preds));
}

EnsemblePrediction mc_dropout_predict(const ModelParams& params,
                                      const PredictionWindow& window,
                                      int passes, long seed) {
    if (params.dropout_rate <= 0.0)
        throw std::runtime_error(
            "mc_dropout_predict requires a model trained with dropout");
    if (passes < 2)
        throw std::runtime_error("mc dropout needs at least 2 passes");
    std::vector<Prediction> preds;
    preds.reserve(passes);
    for (int k = 0; k < passes; ++k)
        preds.push_back(forward(params, window, true, seed + k));
    return aggregate(std::move(preds));
}

double ape(const EnsemblePrediction& pred) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.var_x.size(); ++i)
        sum += step_entropy(pred.var_x[i], pred.var_y[i]);
    return sum / static_cast<double>(pred.var_x.size());
}

double fpe(const EnsemblePrediction& pred) {
    return step_entropy(pred.var_x.back(), pred.var_y.back());
}

void save_ensemble(const std::vector<ModelParams>& members,
                   const std::string& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["k"] = members.size();
    manifest["members"] = nlohmann::json::array();
    for (std::size_t k = 0; k < members.size(); ++k) {
        const std::string name = "member_" + std::to_string(k) + ".ckpt";
        save_checkpoint(members[k], dir + "/" + name);
        manifest["members"].push_back(name);
    }
    std::ofstream out(dir + "/ensemble.json");
    out << manifest.dump(2) << '\n';
}

std::vector<ModelParams> load_ensemble(const std::string& dir) {
    std::ifstream in(dir + "/ensemble.json");
    if (!in) throw std::runtime_error("cannot open ensemble manifest in " + dir);
    nlohmann::json manifest;
    in >> manifest;
    std::vector<ModelParams> members;
    for (const auto& name : manifest.at("members"))
        members.push_back(load_checkpoint(dir + "/" + name.get<std::string>()));
    return members;
}

}  // namespace traj
