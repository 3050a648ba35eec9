#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "traj/experiment/experiment.hpp"

namespace traj {

namespace {

std::string window_id(const PredictionWindow& w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", w.t0);
    return w.target_track_id + ":" + buf;
}

Positions truth_positions(const PredictionWindow& w) {
    Positions p;
    p.reserve(w.future.size());
    for (const auto& pt : w.future) p.push_back({pt.x, pt.y});
    return p;
}

}  // namespace

std::vector<WindowMetrics> evaluate_windows(
    const std::vector<ModelParams>& members,
    const std::vector<PredictionWindow>& windows) {
    std::vector<WindowMetrics> rows;
    rows.reserve(windows.size());
    for (const auto& w : windows) {
        const EnsemblePrediction pred = ensemble_predict(members, w);
        const Positions truth = truth_positions(w);
        WindowMetrics m;
        m.window_id = window_id(w);
        m.ade_ensemble = ade(pred.mean, truth);
        m.fde_ensemble = fde(pred.mean, truth);
        m.ade_member1 = ade(pred.member_predictions.front().positions, truth);
        m.ape = ape(pred);
        m.fpe = fpe(pred);
        rows.push_back(std::move(m));
    }
    return rows;
}

CrossMatrix run_cross_dataset(
    const std::vector<std::pair<std::string, Scene>>& datasets,
    const ExperimentConfig& config) {
    if (datasets.size() < 2)
        throw std::invalid_argument("run_cross_dataset: need >= 2 datasets");

    const std::size_t n = datasets.size();
    CrossMatrix out;
    for (const auto& [name, scene] : datasets) out.names.push_back(name);
    auto zeros = std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0));
    out.ade_member1 = zeros;
    out.ade_ensemble = zeros;
    out.fde_ensemble = zeros;
    out.ape = zeros;
    out.fpe = zeros;

    // every dataset split once; the same split seed keeps identical datasets
    // producing identical rows
    std::vector<DatasetSplit> splits;
    splits.reserve(n);
    for (const auto& [name, scene] : datasets) {
        const Scene resampled = resample_scene(scene, config.resample_hz);
        const auto windows = extract_windows(resampled, config.windows);
        if (windows.empty())
            throw std::runtime_error("run_cross_dataset: dataset '" + name +
                                     "' produced no windows");
        splits.push_back(split_dataset(windows, config.test_ratio, config.seed));
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto members =
            train_ensemble(splits[i].train, config.training, config.ensemble_k);
        for (std::size_t j = 0; j < n; ++j) {
            const auto rows = evaluate_windows(members, splits[j].test);
            double s_a1 = 0.0, s_ae = 0.0, s_fe = 0.0, s_ape = 0.0, s_fpe = 0.0;
            for (const auto& r : rows) {
                s_a1 += r.ade_member1;
                s_ae += r.ade_ensemble;
                s_fe += r.fde_ensemble;
                s_ape += r.ape;
                s_fpe += r.fpe;
            }
            const double m = static_cast<double>(rows.size());
            out.ade_member1[i][j] = s_a1 / m;
            out.ade_ensemble[i][j] = s_ae / m;
            out.fde_ensemble[i][j] = s_fe / m;
            out.ape[i][j] = s_ape / m;
            out.fpe[i][j] = s_fpe / m;
        }
    }
    return out;
}

}  // namespace traj
