#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "traj/eval/evaluation.hpp"

namespace traj {

double ade(const Positions& pred, const Positions& truth) {
    if (pred.size() != truth.size())
        throw std::invalid_argument("ade: length mismatch");
    if (pred.empty()) throw std::invalid_argument("ade: empty trajectories");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        sum += std::hypot(pred[i][0] - truth[i][0], pred[i][1] - truth[i][1]);
    return sum / static_cast<double>(pred.size());
}

double fde(const Positions& pred, const Positions& truth) {
    if (pred.size() != truth.size())
        throw std::invalid_argument("fde: length mismatch");
    if (pred.empty()) throw std::invalid_argument("fde: empty trajectories");
    return std::hypot(pred.back()[0] - truth.back()[0],
                      pred.back()[1] - truth.back()[1]);
}

std::string to_string(RetentionMode m) {
    switch (m) {
        case RetentionMode::uncertainty: return "uncertainty";
        case RetentionMode::optimal: return "optimal";
        case RetentionMode::random: return "random";
    }
    return "unknown";
}

RetentionCurve retention_curve(const std::vector<double>& errors,
                               const std::vector<double>& uncertainties,
                               RetentionMode mode) {
    const std::size_t n = errors.size();
    if (n == 0) throw std::invalid_argument("retention_curve: empty input");
    if (mode == RetentionMode::uncertainty && uncertainties.size() != n)
        throw std::invalid_argument("retention_curve: length mismatch");

    RetentionCurve curve;
    curve.mode = mode;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double mean_error =
        std::accumulate(errors.begin(), errors.end(), 0.0) * inv_n;

    curve.fractions.resize(n + 1);
    curve.values.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        curve.fractions[k] = static_cast<double>(k) * inv_n;

    if (mode == RetentionMode::random) {
        for (std::size_t k = 0; k <= n; ++k)
            curve.values[k] = curve.fractions[k] * mean_error;
        return curve;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const std::vector<double>& key =
        (mode == RetentionMode::uncertainty) ? uncertainties : errors;
    std::stable_sort(order.begin(), order.end(),
                     [&key](std::size_t a, std::size_t b) {
                         return key[a] < key[b];
                     });

    double retained = 0.0;
    curve.values[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        retained += errors[order[k]];
        curve.values[k + 1] = retained * inv_n;
    }
    return curve;
}

double retention_auc(const RetentionCurve& curve) {
    double auc = 0.0;
    for (std::size_t i = 1; i < curve.fractions.size(); ++i)
        auc += 0.5 * (curve.values[i] + curve.values[i - 1]) *
               (curve.fractions[i] - curve.fractions[i - 1]);
    return auc;
}

std::vector<double> retention_scores(const RetentionCurve& uncertainty,
                                     const RetentionCurve& optimal,
                                     const RetentionCurve& random) {
    if (uncertainty.fractions != optimal.fractions ||
        uncertainty.fractions != random.fractions)
        throw std::invalid_argument("retention_scores: fraction grid mismatch");
    std::vector<double> scores(uncertainty.fractions.size(), 0.0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double denom = random.values[i] - optimal.values[i];
        if (denom < 1e-12) continue;
        scores[i] = (random.values[i] - uncertainty.values[i]) / denom;
    }
    return scores;
}

}  // namespace traj
