#pragma once

#include <array>
#include <string>
#include <vector>

namespace traj {

using Positions = std::vector<std::array<double, 2>>;

// mean Euclidean displacement over all steps
double ade(const Positions& pred, const Positions& truth);
// Euclidean displacement at the final step
double fde(const Positions& pred, const Positions& truth);

enum class RetentionMode { uncertainty, optimal, random };

std::string to_string(RetentionMode m);

struct RetentionCurve {
    std::vector<double> fractions;  // k/N for k = 0..N
    std::vector<double> values;     // error retained at each fraction
    RetentionMode mode = RetentionMode::uncertainty;
};

// value(k/N) = (1/N) * sum of the k retained errors; retained = k
// lowest-uncertainty windows (uncertainty mode) or k lowest-error windows
// (optimal mode); random mode uses the analytic expectation (k/N) * mean.
// Ties break by ascending window index.
RetentionCurve retention_curve(const std::vector<double>& errors,
                               const std::vector<double>& uncertainties,
                               RetentionMode mode);

// trapezoidal integral over the fraction grid
double retention_auc(const RetentionCurve& curve);

// score(r) = (err_random - err_uncertainty) / (err_random - err_optimal),
// zero where the denominator is below 1e-12
std::vector<double> retention_scores(const RetentionCurve& uncertainty,
                                     const RetentionCurve& optimal,
                                     const RetentionCurve& random);

}  // namespace traj
