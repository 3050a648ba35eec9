#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "traj/experiment/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<long> seed;
    std::string out;
    bool serial = false;
};

traj::ExperimentConfig effective_config(const CommonOpts& opts) {
    traj::ExperimentConfig config = opts.config_path.empty()
                                        ? traj::ExperimentConfig{}
                                        : traj::load_config(opts.config_path);
    if (opts.seed) {
        config.seed = *opts.seed;
        config.training.seed = *opts.seed;
        config.synth.seed = *opts.seed;
    }
    return config;
}

std::string window_key(const std::string& track_id, double t0) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", t0);
    return track_id + ":" + buf;
}

struct LoadedWindows {
    traj::Scene resampled;
    std::vector<traj::PredictionWindow> windows;
};

LoadedWindows load_windows(const std::string& tracks_path,
                           const std::string& map_path,
                           const std::string& signal_path,
                           const traj::ExperimentConfig& config) {
    const traj::Scene scene =
        traj::load_tracks(tracks_path, {}, map_path, signal_path);
    LoadedWindows lw;
    lw.resampled = traj::resample_scene(scene, config.resample_hz);
    lw.windows = traj::extract_windows(lw.resampled, config.windows);
    if (lw.windows.empty())
        throw std::runtime_error("no prediction windows in " + tracks_path);
    return lw;
}

void write_dataset(const traj::Scene& scene, const fs::path& dir,
                   traj::ReportManifest& manifest) {
    fs::create_directories(dir);
    const auto tracks = (dir / "tracks.csv").string();
    traj::save_tracks(scene, tracks);
    manifest.add(tracks);
    if (scene.map) {
        const auto map = (dir / "map.json").string();
        traj::save_map(*scene.map, map);
        manifest.add(map);
    }
    if (scene.signals) {
        const auto signals = (dir / "signals.json").string();
        traj::save_signals(*scene.signals, signals);
        manifest.add(signals);
    }
}

int cmd_synth(const CommonOpts& opts) {
    const auto config = effective_config(opts);
    fs::create_directories(opts.out);
    traj::ReportManifest manifest;
    if (config.family.empty()) {
        traj::GeneratorConfig gc = config.synth;
        const traj::Scene scene = traj::generate_scene(gc);
        write_dataset(scene, opts.out, manifest);
    } else {
        const auto family =
            traj::generate_dataset_family(config.synth, config.family);
        for (const auto& [name, scene] : family)
            write_dataset(scene, fs::path(opts.out) / name, manifest);
    }
    manifest.write(opts.out, config.to_json());
    std::cout << "wrote " << manifest.size() << " dataset files to " << opts.out
              << "\n";
    return 0;
}

int cmd_features(const CommonOpts& opts, const std::string& tracks_path,
                 const std::string& map_path, const std::string& signal_path) {
    const auto config = effective_config(opts);
    const auto lw = load_windows(tracks_path, map_path, signal_path, config);
    const auto table =
        traj::feature_table(lw.resampled, lw.windows, config.features);
    traj::write_feature_table(table, config.features, opts.out);
    std::cout << "wrote " << table.size() << " feature rows to " << opts.out
              << "\n";
    return 0;
}

int cmd_train(const CommonOpts& opts, const std::string& tracks_path,
              int ensemble_override) {
    auto config = effective_config(opts);
    if (ensemble_override > 0) config.ensemble_k = ensemble_override;
    const auto lw = load_windows(tracks_path, "", "", config);
    const auto split =
        traj::split_dataset(lw.windows, config.test_ratio, config.seed);
    std::vector<std::vector<double>> losses;
    const auto members = traj::train_ensemble(split.train, config.training,
                                              config.ensemble_k, &losses);
    fs::create_directories(opts.out);
    traj::save_ensemble(members, opts.out);

    traj::ReportManifest manifest;
    const auto losses_path = (fs::path(opts.out) / "epoch_losses.csv").string();
    {
        std::ofstream out(losses_path);
        out << std::setprecision(17) << "epoch";
        for (std::size_t k = 0; k < losses.size(); ++k)
            out << ",member_" << k + 1;
        out << "\n";
        for (std::size_t e = 0; e < losses.front().size(); ++e) {
            out << e + 1;
            for (const auto& l : losses) out << "," << l[e];
            out << "\n";
        }
    }
    manifest.add(losses_path);
    for (int k = 0; k < config.ensemble_k; ++k)
        manifest.add(
            (fs::path(opts.out) / ("member_" + std::to_string(k) + ".ckpt"))
                .string());
    manifest.write(opts.out, config.to_json());
    std::cout << "trained " << config.ensemble_k << " members on "
              << split.train.size() << " windows -> " << opts.out << "\n";
    return 0;
}

int cmd_predict(const CommonOpts& opts, const std::string& tracks_path,
                const std::string& model_path) {
    const auto config = effective_config(opts);
    const auto lw = load_windows(tracks_path, "", "", config);
    const auto members = traj::load_ensemble(model_path);
    std::ofstream out(opts.out);
    if (!out) throw std::runtime_error("cannot write: " + opts.out);
    out << std::setprecision(17)
        << "window_id,step,mean_x,mean_y,var_x,var_y\n";
    for (const auto& w : lw.windows) {
        const auto pred = traj::ensemble_predict(members, w);
        const auto id = window_key(w.target_track_id, w.t0);
        for (std::size_t s = 0; s < pred.mean.size(); ++s)
            out << id << "," << s + 1 << "," << pred.mean[s][0] << ","
                << pred.mean[s][1] << "," << pred.var_x[s] << ","
                << pred.var_y[s] << "\n";
    }
    std::cout << "wrote predictions for " << lw.windows.size()
              << " windows to " << opts.out << "\n";
    return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& tracks_path,
             const std::string& model_path, const std::string& subset) {
    const auto config = effective_config(opts);
    const auto lw = load_windows(tracks_path, "", "", config);
    std::vector<traj::PredictionWindow> windows;
    if (subset == "all") {
        windows = lw.windows;
    } else {
        const auto split =
            traj::split_dataset(lw.windows, config.test_ratio, config.seed);
        windows = (subset == "train") ? split.train : split.test;
    }
    const auto members = traj::load_ensemble(model_path);
    const auto rows = traj::evaluate_windows(members, windows);
    traj::write_window_metrics_csv(rows, opts.out);
    double sum_ade = 0.0, sum_fde = 0.0;
    for (const auto& r : rows) {
        sum_ade += r.ade_ensemble;
        sum_fde += r.fde_ensemble;
    }
    const double n = static_cast<double>(rows.size());
    std::cout << "evaluated " << rows.size() << " windows (" << subset
              << "): mean ADE " << sum_ade / n << ", mean FDE " << sum_fde / n
              << " -> " << opts.out << "\n";
    return 0;
}

int cmd_retention(const CommonOpts& opts, const std::string& metrics_path) {
    const auto config = effective_config(opts);
    const auto rows = traj::read_window_metrics_csv(metrics_path);
    std::vector<double> errors, uncertainties;
    for (const auto& r : rows) {
        errors.push_back(r.ade_ensemble);
        uncertainties.push_back(config.uncertainty_metric == "fpe" ? r.fpe
                                                                   : r.ape);
    }
    const auto unc = traj::retention_curve(errors, uncertainties,
                                           traj::RetentionMode::uncertainty);
    const auto opt =
        traj::retention_curve(errors, {}, traj::RetentionMode::optimal);
    const auto rnd =
        traj::retention_curve(errors, {}, traj::RetentionMode::random);
    const auto scores = traj::retention_scores(unc, opt, rnd);

    fs::create_directories(opts.out);
    traj::ReportManifest manifest;
    const auto curves_path = (fs::path(opts.out) / "curves.csv").string();
    traj::write_curves_csv({unc, opt, rnd}, curves_path);
    manifest.add(curves_path);
    const auto auc_path = (fs::path(opts.out) / "auc.csv").string();
    traj::write_auc_csv({{"uncertainty", traj::retention_auc(unc)},
                         {"optimal", traj::retention_auc(opt)},
                         {"random", traj::retention_auc(rnd)}},
                        auc_path);
    manifest.add(auc_path);
    const auto scores_path = (fs::path(opts.out) / "scores.csv").string();
    traj::write_scores_csv(unc.fractions, scores, scores_path);
    manifest.add(scores_path);
    const auto svg_path = (fs::path(opts.out) / "retention.svg").string();
    traj::write_svg_lines({"uncertainty", "optimal", "random"},
                          {unc.fractions, opt.fractions, rnd.fractions},
                          {unc.values, opt.values, rnd.values},
                          "error retention", svg_path);
    manifest.add(svg_path);
    manifest.write(opts.out, config.to_json());
    std::cout << "retention over " << errors.size() << " windows -> "
              << opts.out << "\n";
    return 0;
}

struct FeatureFile {
    std::vector<std::string> numeric_names;
    // window key -> numeric row / categorical labels
    std::map<std::string, std::vector<double>> numeric;
    std::map<std::string, std::map<std::string, std::string>> categorical;
};

FeatureFile read_feature_csv(const std::string& path,
                             const traj::FeatureParams& params) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty feature file: " + path);
    std::vector<std::string> header;
    {
        std::istringstream s(line);
        std::string field;
        while (std::getline(s, field, ',')) header.push_back(field);
    }
    const auto expected = traj::feature_table_columns(params);
    if (header != expected)
        throw std::runtime_error("feature file header mismatch: " + path);

    FeatureFile ff;
    ff.numeric_names = traj::numeric_feature_names(params);
    const std::size_t n_numeric = ff.numeric_names.size();
    const std::vector<std::string> cat_names = {"agent_type", "behavior",
                                                "compliance", "location_stage"};
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream s(line);
        std::vector<std::string> fields;
        std::string field;
        while (std::getline(s, field, ',')) fields.push_back(field);
        if (fields.size() != header.size())
            throw std::runtime_error("ragged feature row in " + path);
        const auto key = window_key(fields[0], std::stod(fields[1]));
        std::vector<double> row(n_numeric);
        for (std::size_t i = 0; i < n_numeric; ++i)
            row[i] = std::stod(fields[2 + i]);
        ff.numeric[key] = std::move(row);
        for (std::size_t c = 0; c < cat_names.size(); ++c)
            ff.categorical[key][cat_names[c]] = fields[2 + n_numeric + c];
    }
    return ff;
}

int cmd_analyze(const CommonOpts& opts, const std::string& features_path,
                const std::string& metrics_path) {
    const auto config = effective_config(opts);
    const auto ff = read_feature_csv(features_path, config.features);
    const auto metrics = traj::read_window_metrics_csv(metrics_path);

    const std::vector<std::string> metric_names = {"ade_ensemble",
                                                   "fde_ensemble", "ape", "fpe"};
    std::vector<std::vector<double>> feature_rows, metric_rows;
    std::map<std::string, std::vector<std::string>> cat_columns;
    for (const auto& m : metrics) {
        const auto it = ff.numeric.find(m.window_id);
        if (it == ff.numeric.end()) continue;
        feature_rows.push_back(it->second);
        metric_rows.push_back(
            {m.ade_ensemble, m.fde_ensemble, m.ape, m.fpe});
        for (const auto& [cat, label] : ff.categorical.at(m.window_id))
            cat_columns[cat].push_back(label);
    }
    if (feature_rows.size() < 3)
        throw std::runtime_error("analyze: fewer than 3 joined rows");

    fs::create_directories(opts.out);
    traj::ReportManifest manifest;

    const auto report = traj::correlation_report(ff.numeric_names, feature_rows,
                                                 metric_names, metric_rows);
    const auto corr_path = (fs::path(opts.out) / "correlations.csv").string();
    traj::write_correlation_csv(report, corr_path);
    manifest.add(corr_path);

    traj::ForestConfig fc;
    fc.seed = config.seed;
    const std::vector<std::pair<std::string, int>> targets = {
        {"ade", 0}, {config.uncertainty_metric, config.uncertainty_metric == "fpe" ? 3 : 2}};
    for (const auto& [tag, col] : targets) {
        std::vector<double> y;
        y.reserve(metric_rows.size());
        for (const auto& row : metric_rows) y.push_back(row[col]);
        const auto model = traj::fit_forest(feature_rows, y, fc);
        const auto vim = traj::feature_importance(model);
        const auto path =
            (fs::path(opts.out) / ("importance_" + tag + ".csv")).string();
        traj::write_importance_csv(ff.numeric_names, vim, path);
        manifest.add(path);
    }

    for (const auto& [cat, labels] : cat_columns) {
        const auto summary =
            traj::category_summary(labels, metric_names, metric_rows);
        const auto path =
            (fs::path(opts.out) / ("summary_" + cat + ".csv")).string();
        traj::write_category_summary_csv(summary, path);
        manifest.add(path);
    }
    manifest.write(opts.out, config.to_json());
    std::cout << "analyzed " << feature_rows.size() << " joined rows -> "
              << opts.out << "\n";
    return 0;
}

int cmd_cross(const CommonOpts& opts) {
    const auto config = effective_config(opts);
    if (config.family.size() < 2)
        throw std::runtime_error("cross: config needs a family of >= 2 datasets");
    const auto family =
        traj::generate_dataset_family(config.synth, config.family);
    const auto matrix = traj::run_cross_dataset(family, config);

    fs::create_directories(opts.out);
    traj::ReportManifest manifest;
    const std::vector<
        std::pair<std::string, const std::vector<std::vector<double>>*>>
        outputs = {{"ade_member1", &matrix.ade_member1},
                   {"ade_ensemble", &matrix.ade_ensemble},
                   {"fde_ensemble", &matrix.fde_ensemble},
                   {"ape", &matrix.ape},
                   {"fpe", &matrix.fpe}};
    for (const auto& [tag, m] : outputs) {
        const auto csv = (fs::path(opts.out) / (tag + ".csv")).string();
        traj::write_matrix_csv(matrix.names, *m, csv);
        manifest.add(csv);
        const auto svg = (fs::path(opts.out) / (tag + ".svg")).string();
        traj::write_svg_heatmap(matrix.names, *m, tag, svg);
        manifest.add(svg);
    }
    manifest.write(opts.out, config.to_json());
    std::cout << "cross-dataset matrix over " << matrix.names.size()
              << " datasets -> " << opts.out << "\n";
    return 0;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream s(line);
        std::vector<std::string> fields;
        std::string field;
        while (std::getline(s, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

int cmd_report(const CommonOpts& opts, const std::string& run_dir) {
    const auto config = effective_config(opts);
    traj::ReportManifest manifest;
    int rendered = 0;

    // re-render plots for any recognized CSVs in the run directory
    for (const auto& entry : fs::directory_iterator(run_dir)) {
        if (entry.path().extension() != ".csv") continue;
        const auto stem = entry.path().stem().string();
        const auto rows = read_csv(entry.path().string());
        if (rows.size() < 2) continue;
        if (rows.front().front() == "train_dataset") {
            std::vector<std::string> names;
            std::vector<std::vector<double>> m;
            for (std::size_t i = 1; i < rows.size(); ++i) {
                names.push_back(rows[i][0]);
                std::vector<double> row;
                for (std::size_t j = 1; j < rows[i].size(); ++j)
                    row.push_back(std::stod(rows[i][j]));
                m.push_back(std::move(row));
            }
            const auto svg = (fs::path(run_dir) / (stem + ".svg")).string();
            traj::write_svg_heatmap(names, m, stem, svg);
            ++rendered;
        } else if (rows.front().front() == "fraction") {
            std::vector<std::string> labels(rows.front().begin() + 1,
                                            rows.front().end());
            std::vector<double> fractions;
            std::vector<std::vector<double>> series(labels.size());
            for (std::size_t i = 1; i < rows.size(); ++i) {
                fractions.push_back(std::stod(rows[i][0]));
                for (std::size_t s = 0; s < labels.size(); ++s)
                    series[s].push_back(std::stod(rows[i][s + 1]));
            }
            std::vector<std::vector<double>> xs(labels.size(), fractions);
            const auto svg = (fs::path(run_dir) / (stem + ".svg")).string();
            traj::write_svg_lines(labels, xs, series, stem, svg);
            ++rendered;
        }
    }
    for (const auto& entry : fs::directory_iterator(run_dir)) {
        if (entry.path().filename() == "manifest.json") continue;
        if (!entry.is_regular_file()) continue;
        manifest.add(entry.path().string());
    }
    manifest.write(run_dir, config.to_json());
    std::cout << "rendered " << rendered << " plots, manifest covers "
              << manifest.size() << " files in " << run_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trajectory prediction workbench"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "JSON config file")
        ->check(CLI::ExistingFile);
    long seed_flag = 0;
    const auto seed_opt =
        app.add_option("--seed", seed_flag, "override the config seed");
    app.add_flag("--serial", opts.serial,
                 "force single-threaded deterministic execution (the default)");

    auto* synth = app.add_subcommand("synth", "generate synthetic datasets");
    synth->add_option("--out", opts.out, "output directory")->required();

    std::string tracks_path, map_path, signal_path, model_path;
    auto* features = app.add_subcommand("features", "compute scenario features");
    features->add_option("--tracks", tracks_path, "track CSV")
        ->required()
        ->check(CLI::ExistingFile);
    features->add_option("--map", map_path, "map JSON");
    features->add_option("--signals", signal_path, "signal timing JSON");
    features->add_option("--out", opts.out, "output CSV")->required();

    int ensemble_override = 0;
    auto* train = app.add_subcommand("train", "train an ensemble");
    train->add_option("--tracks", tracks_path, "track CSV")
        ->required()
        ->check(CLI::ExistingFile);
    train->add_option("--ensemble", ensemble_override, "ensemble size");
    train->add_option("--out", opts.out, "checkpoint directory")->required();

    auto* predict = app.add_subcommand("predict", "dump ensemble predictions");
    predict->add_option("--tracks", tracks_path, "track CSV")
        ->required()
        ->check(CLI::ExistingFile);
    predict->add_option("--model", model_path, "checkpoint directory")
        ->required();
    predict->add_option("--out", opts.out, "output CSV")->required();

    std::string subset = "test";
    auto* eval = app.add_subcommand("eval", "per-window metrics");
    eval->add_option("--tracks", tracks_path, "track CSV")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--model", model_path, "checkpoint directory")->required();
    eval->add_option("--subset", subset, "train | test | all")
        ->check(CLI::IsMember({"train", "test", "all"}));
    eval->add_option("--out", opts.out, "output CSV")->required();

    std::string metrics_path, features_path;
    auto* retention = app.add_subcommand("retention", "error-retention curves");
    retention->add_option("--metrics", metrics_path, "eval output CSV")
        ->required()
        ->check(CLI::ExistingFile);
    retention->add_option("--out", opts.out, "output directory")->required();

    auto* analyze =
        app.add_subcommand("analyze", "correlations and importances");
    analyze->add_option("--features", features_path, "feature CSV")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--metrics", metrics_path, "eval output CSV")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--out", opts.out, "output directory")->required();

    auto* cross =
        app.add_subcommand("cross", "full cross-dataset evaluation matrix");
    cross->add_option("--out", opts.out, "output directory")->required();

    std::string run_dir;
    auto* report = app.add_subcommand("report", "re-render plots and manifest");
    report->add_option("--run", run_dir, "existing run directory")
        ->required()
        ->check(CLI::ExistingDirectory);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (!seed_opt->empty()) opts.seed = seed_flag;

    try {
        if (synth->parsed()) return cmd_synth(opts);
        if (features->parsed())
            return cmd_features(opts, tracks_path, map_path, signal_path);
        if (train->parsed()) return cmd_train(opts, tracks_path, ensemble_override);
        if (predict->parsed()) return cmd_predict(opts, tracks_path, model_path);
        if (eval->parsed()) return cmd_eval(opts, tracks_path, model_path, subset);
        if (retention->parsed()) return cmd_retention(opts, metrics_path);
        if (analyze->parsed())
            return cmd_analyze(opts, features_path, metrics_path);
        if (cross->parsed()) return cmd_cross(opts);
        if (report->parsed()) return cmd_report(opts, run_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
