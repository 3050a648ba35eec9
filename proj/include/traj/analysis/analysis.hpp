#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace traj {

// average ranks for ties; sum of ranks is n(n+1)/2
std::vector<double> rank_with_ties(const std::vector<double>& values);

// Spearman rank correlation via the rank-covariance form (handles ties);
// throws on constant input or n < 3
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct ForestConfig {
    int n_trees = 100;
    int max_depth = 12;
    int min_leaf = 5;
    int m_try = 0;  // 0 -> ceil(J / 3)
    long seed = 1;
};

struct TreeNode {
    int feature = -1;  // -1 for leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double leaf_value = 0.0;
    std::size_t n_samples = 0;
    double impurity = 0.0;  // variance of targets at this node
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // node 0 is the root
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    int n_features = 0;
    ForestConfig config;
};

// bootstrap-sampled variance-reduction regression trees; deterministic in
// config.seed. Split tie-break: lowest feature index, then lowest threshold.
ForestModel fit_forest(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& targets,
                       const ForestConfig& config = {});

double forest_predict(const ForestModel& model, const std::vector<double>& row);

// per-feature importance: sample-fraction-weighted impurity decrease summed
// over every split, normalized to sum to 1; throws when no tree ever splits
std::vector<double> feature_importance(const ForestModel& model);

struct CorrelationReport {
    std::vector<std::string> feature_names;
    std::vector<std::string> metric_names;
    // rho[f][m]; NaN where a column was constant
    std::vector<std::vector<double>> rho;
};

CorrelationReport correlation_report(
    const std::vector<std::string>& feature_names,
    const std::vector<std::vector<double>>& feature_rows,
    const std::vector<std::string>& metric_names,
    const std::vector<std::vector<double>>& metric_rows);

// per-category mean/median of each metric, for categorical features
struct CategorySummary {
    // category label -> metric name -> (mean, median, count)
    std::map<std::string, std::map<std::string, std::array<double, 3>>> stats;
};

CategorySummary category_summary(const std::vector<std::string>& categories,
                                 const std::vector<std::string>& metric_names,
                                 const std::vector<std::vector<double>>& metric_rows);

}  // namespace traj
