#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "traj/dataset/dataset.hpp"

namespace traj {

DatasetSplit split_dataset(const std::vector<PredictionWindow>& windows,
                           double test_ratio, long seed) {
    if (test_ratio <= 0.0 || test_ratio >= 1.0)
        throw DatasetError("test_ratio must lie in (0, 1)");

    std::set<std::string> id_set;
    for (const auto& w : windows) id_set.insert(w.target_track_id);
    if (id_set.size() < 2)
        throw DatasetError("need at least 2 distinct target tracks to split");

    std::vector<std::string> ids(id_set.begin(), id_set.end());
    std::mt19937_64 rng(static_cast<unsigned long long>(seed));
    std::shuffle(ids.begin(), ids.end(), rng);

    std::size_t n_test = static_cast<std::size_t>(
        std::llround(test_ratio * static_cast<double>(ids.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, ids.size() - 1);

    std::set<std::string> test_ids(ids.begin(), ids.begin() + n_test);
    DatasetSplit split;
    split.seed = seed;
    for (const auto& w : windows) {
        if (test_ids.count(w.target_track_id))
            split.test.push_back(w);
        else
            split.train.push_back(w);
    }
    return split;
}

}  // namespace traj
