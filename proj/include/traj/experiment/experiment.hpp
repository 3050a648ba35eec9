#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "traj/analysis/analysis.hpp"
#include "traj/dataset/dataset.hpp"
#include "traj/ensemble/ensemble.hpp"
#include "traj/eval/evaluation.hpp"
#include "traj/features/features.hpp"
#include "traj/synthgen/generator.hpp"

namespace traj {

// Single source of every hyperparameter; CLI flags override file values and
// the effective config is echoed into each output manifest.
struct ExperimentConfig {
    long seed = 1;
    double resample_hz = 2.0;
    WindowParams windows;
    FeatureParams features;
    TrainingConfig training;
    int ensemble_k = 5;
    double test_ratio = 0.3;
    std::string uncertainty_metric = "ape";  // or "fpe"
    GeneratorConfig synth;
    std::vector<FamilyMember> family;

    nlohmann::json to_json() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// per-window evaluation record (the eval CSV row)
struct WindowMetrics {
    std::string window_id;
    double ade_ensemble = 0.0;
    double fde_ensemble = 0.0;
    double ade_member1 = 0.0;
    double ape = 0.0;
    double fpe = 0.0;
};

std::vector<WindowMetrics> evaluate_windows(
    const std::vector<ModelParams>& members,
    const std::vector<PredictionWindow>& windows);

struct CrossMatrix {
    std::vector<std::string> names;
    // entry [i][j] = train on i, evaluate on j
    std::vector<std::vector<double>> ade_member1;
    std::vector<std::vector<double>> ade_ensemble;
    std::vector<std::vector<double>> fde_ensemble;
    std::vector<std::vector<double>> ape;
    std::vector<std::vector<double>> fpe;
};

CrossMatrix run_cross_dataset(
    const std::vector<std::pair<std::string, Scene>>& datasets,
    const ExperimentConfig& config);

// ---- report emission ------------------------------------------------------

std::uint64_t fnv1a_hash(const std::string& bytes);
std::uint64_t file_checksum(const std::string& path);

// collects written artifacts; write() emits manifest.json with the config
// hash and per-file checksums
class ReportManifest {
  public:
    void add(const std::string& path);
    void write(const std::string& out_dir, const nlohmann::json& config) const;
    std::size_t size() const { return files_.size(); }

  private:
    std::vector<std::string> files_;
};

void write_matrix_csv(const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& matrix,
                      const std::string& path);
void write_window_metrics_csv(const std::vector<WindowMetrics>& rows,
                              const std::string& path);
std::vector<WindowMetrics> read_window_metrics_csv(const std::string& path);
void write_curves_csv(const std::vector<RetentionCurve>& curves,
                      const std::string& path);
void write_scores_csv(const std::vector<double>& fractions,
                      const std::vector<double>& scores,
                      const std::string& path);
void write_auc_csv(const std::vector<std::pair<std::string, double>>& aucs,
                   const std::string& path);
void write_correlation_csv(const CorrelationReport& report,
                           const std::string& path);
void write_importance_csv(const std::vector<std::string>& names,
                          const std::vector<double>& vim,
                          const std::string& path);
void write_category_summary_csv(const CategorySummary& summary,
                                const std::string& path);

// minimal standalone SVG renderers
void write_svg_lines(const std::vector<std::string>& labels,
                     const std::vector<std::vector<double>>& xs,
                     const std::vector<std::vector<double>>& ys,
                     const std::string& title, const std::string& path);
void write_svg_heatmap(const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& matrix,
                       const std::string& title, const std::string& path);

}  // namespace traj
