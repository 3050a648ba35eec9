#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "traj/analysis/analysis.hpp"

namespace traj {

namespace {

double variance(const std::vector<double>& targets,
                const std::vector<std::size_t>& idx) {
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i : idx) {
        sum += targets[i];
        sumsq += targets[i] * targets[i];
    }
    const double n = static_cast<double>(idx.size());
    const double mean = sum / n;
    return std::max(0.0, sumsq / n - mean * mean);
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& features;
    const std::vector<double>& targets;
    const ForestConfig& config;
    int n_features;
    int m_try;
    std::mt19937_64& rng;
    DecisionTree& tree;

    int build(std::vector<std::size_t>& idx, int depth) {
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        TreeNode& node = tree.nodes[node_id];
        node.n_samples = idx.size();
        node.impurity = variance(targets, idx);
        double sum = 0.0;
        for (std::size_t i : idx) sum += targets[i];
        node.leaf_value = sum / static_cast<double>(idx.size());

        if (depth >= config.max_depth ||
            idx.size() < 2 * static_cast<std::size_t>(config.min_leaf) ||
            node.impurity < 1e-15)
            return node_id;

        // m_try candidate features without replacement, searched ascending so
        // equal-gain ties resolve to the lowest feature index / threshold
        std::vector<int> cand(n_features);
        std::iota(cand.begin(), cand.end(), 0);
        for (int i = 0; i < m_try; ++i) {
            std::uniform_int_distribution<int> pick(i, n_features - 1);
            std::swap(cand[i], cand[pick(rng)]);
        }
        cand.resize(m_try);
        std::sort(cand.begin(), cand.end());

        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;
        const double n = static_cast<double>(idx.size());

        std::vector<std::size_t> sorted_idx = idx;
        for (int f : cand) {
            std::stable_sort(sorted_idx.begin(), sorted_idx.end(),
                             [&](std::size_t a, std::size_t b) {
                                 return features[a][f] < features[b][f];
                             });
            // prefix target sums for O(1) child variances per cut
            double lsum = 0.0, lsumsq = 0.0;
            double tsum = 0.0, tsumsq = 0.0;
            for (std::size_t i : sorted_idx) {
                tsum += targets[i];
                tsumsq += targets[i] * targets[i];
            }
            for (std::size_t c = 0; c + 1 < sorted_idx.size(); ++c) {
                const double y = targets[sorted_idx[c]];
                lsum += y;
                lsumsq += y * y;
                const double v_left = features[sorted_idx[c]][f];
                const double v_right = features[sorted_idx[c + 1]][f];
                if (v_left == v_right) continue;  // no cut inside a tie run
                const std::size_t nl = c + 1;
                const std::size_t nr = sorted_idx.size() - nl;
                if (nl < static_cast<std::size_t>(config.min_leaf) ||
                    nr < static_cast<std::size_t>(config.min_leaf))
                    continue;
                const double dl = static_cast<double>(nl);
                const double dr = static_cast<double>(nr);
                const double var_l =
                    std::max(0.0, lsumsq / dl - (lsum / dl) * (lsum / dl));
                const double rsum = tsum - lsum;
                const double rsumsq = tsumsq - lsumsq;
                const double var_r =
                    std::max(0.0, rsumsq / dr - (rsum / dr) * (rsum / dr));
                const double gain =
                    tree.nodes[node_id].impurity - (dl / n) * var_l - (dr / n) * var_r;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (v_left + v_right);
                }
            }
        }

        if (best_feature < 0) return node_id;

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            if (features[i][best_feature] <= best_threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }
        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        const int left = build(left_idx, depth + 1);
        tree.nodes[node_id].left = left;
        const int right = build(right_idx, depth + 1);
        tree.nodes[node_id].right = right;
        return node_id;
    }
};

}  // namespace

ForestModel fit_forest(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& targets,
                       const ForestConfig& config) {
    const std::size_t n = features.size();
    if (n != targets.size())
        throw std::invalid_argument("fit_forest: row count mismatch");
    if (n < 2 * static_cast<std::size_t>(config.min_leaf))
        throw std::invalid_argument("fit_forest: too few rows");
    const int J = static_cast<int>(features.front().size());
    for (const auto& row : features) {
        if (static_cast<int>(row.size()) != J)
            throw std::invalid_argument("fit_forest: ragged feature table");
        for (double v : row)
            if (!std::isfinite(v))
                throw std::invalid_argument("fit_forest: non-finite feature");
    }
    for (double y : targets)
        if (!std::isfinite(y))
            throw std::invalid_argument("fit_forest: non-finite target");

    ForestModel model;
    model.n_features = J;
    model.config = config;
    const int m_try =
        config.m_try > 0
            ? std::min(config.m_try, J)
            : static_cast<int>(std::ceil(static_cast<double>(J) / 3.0));

    for (int t = 0; t < config.n_trees; ++t) {
        std::mt19937_64 rng(static_cast<unsigned long long>(config.seed) *
                                6364136223846793005ULL +
                            static_cast<unsigned long long>(t));
        std::uniform_int_distribution<std::size_t> draw(0, n - 1);
        std::vector<std::size_t> bootstrap(n);
        for (auto& i : bootstrap) i = draw(rng);
        std::sort(bootstrap.begin(), bootstrap.end());

        DecisionTree tree;
        TreeBuilder builder{features, targets, config, J, m_try, rng, tree};
        builder.build(bootstrap, 0);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

double forest_predict(const ForestModel& model, const std::vector<double>& row) {
    if (static_cast<int>(row.size()) != model.n_features)
        throw std::invalid_argument("forest_predict: dimension mismatch");
    double sum = 0.0;
    for (const auto& tree : model.trees) {
        int node = 0;
        while (tree.nodes[node].feature >= 0) {
            const TreeNode& cur = tree.nodes[node];
            node = (row[cur.feature] <= cur.threshold) ? cur.left : cur.right;
        }
        sum += tree.nodes[node].leaf_value;
    }
    return sum / static_cast<double>(model.trees.size());
}

std::vector<double> feature_importance(const ForestModel& model) {
    std::vector<double> vim(model.n_features, 0.0);
    bool any_split = false;
    for (const auto& tree : model.trees) {
        if (tree.nodes.empty()) continue;
        const double n_root = static_cast<double>(tree.nodes[0].n_samples);
        for (const auto& node : tree.nodes) {
            if (node.feature < 0) continue;
            any_split = true;
            const TreeNode& l = tree.nodes[node.left];
            const TreeNode& r = tree.nodes[node.right];
            const double n = static_cast<double>(node.n_samples);
            const double decrease =
                node.impurity -
                (static_cast<double>(l.n_samples) / n) * l.impurity -
                (static_cast<double>(r.n_samples) / n) * r.impurity;
            vim[node.feature] += (n / n_root) * decrease;
        }
    }
    if (!any_split)
        throw std::invalid_argument("feature_importance: forest has no splits");
    const double total = std::accumulate(vim.begin(), vim.end(), 0.0);
    for (double& v : vim) v /= total;
    return vim;
}

CorrelationReport correlation_report(
    const std::vector<std::string>& feature_names,
    const std::vector<std::vector<double>>& feature_rows,
    const std::vector<std::string>& metric_names,
    const std::vector<std::vector<double>>& metric_rows) {
    if (feature_rows.size() != metric_rows.size())
        throw std::invalid_argument("correlation_report: row count mismatch");
    CorrelationReport report;
    report.feature_names = feature_names;
    report.metric_names = metric_names;
    report.rho.assign(feature_names.size(),
                      std::vector<double>(metric_names.size(), 0.0));
    for (std::size_t f = 0; f < feature_names.size(); ++f) {
        std::vector<double> col(feature_rows.size());
        for (std::size_t i = 0; i < feature_rows.size(); ++i)
            col[i] = feature_rows[i][f];
        for (std::size_t m = 0; m < metric_names.size(); ++m) {
            std::vector<double> mcol(metric_rows.size());
            for (std::size_t i = 0; i < metric_rows.size(); ++i)
                mcol[i] = metric_rows[i][m];
            try {
                report.rho[f][m] = spearman(col, mcol);
            } catch (const std::invalid_argument&) {
                report.rho[f][m] = std::nan("");
            }
        }
    }
    return report;
}

CategorySummary category_summary(
    const std::vector<std::string>& categories,
    const std::vector<std::string>& metric_names,
    const std::vector<std::vector<double>>& metric_rows) {
    if (categories.size() != metric_rows.size())
        throw std::invalid_argument("category_summary: row count mismatch");
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < categories.size(); ++i)
        groups[categories[i]].push_back(i);

    CategorySummary summary;
    for (const auto& [label, idx] : groups) {
        for (std::size_t m = 0; m < metric_names.size(); ++m) {
            std::vector<double> vals;
            vals.reserve(idx.size());
            for (std::size_t i : idx) vals.push_back(metric_rows[i][m]);
            std::sort(vals.begin(), vals.end());
            const double mean =
                std::accumulate(vals.begin(), vals.end(), 0.0) /
                static_cast<double>(vals.size());
            const std::size_t n = vals.size();
            const double median = (n % 2 == 1)
                                      ? vals[n / 2]
                                      : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
            summary.stats[label][metric_names[m]] = {
                mean, median, static_cast<double>(n)};
        }
    }
    return summary;
}

}  // namespace traj
