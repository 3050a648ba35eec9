#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "traj/analysis/analysis.hpp"

namespace traj {

std::vector<double> rank_with_ties(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&values](std::size_t a, std::size_t b) {
                         return values[a] < values[b];
                     });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // average rank over the tie run [i, j]
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 3) throw std::invalid_argument("spearman: need n >= 3");

    const auto rx = rank_with_ties(x);
    const auto ry = rank_with_ties(y);
    const double n = static_cast<double>(x.size());
    const double mean_rank = (n + 1.0) / 2.0;

    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = rx[i] - mean_rank;
        const double dy = ry[i] - mean_rank;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x < 1e-12 || var_y < 1e-12)
        throw std::invalid_argument("spearman: constant input");
    return cov / std::sqrt(var_x * var_y);
}

}  // namespace traj
