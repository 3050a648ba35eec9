#include <fstream>
#include <stdexcept>

#include "traj/experiment/experiment.hpp"

namespace traj {

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["resample_hz"] = resample_hz;
    j["windows"] = {{"t_h_steps", windows.t_h_steps},
                    {"t_f_steps", windows.t_f_steps},
                    {"stride_steps", windows.stride_steps},
                    {"neighbor_radius_m", windows.neighbor_radius_m},
                    {"max_neighbors", windows.max_neighbors}};
    j["features"] = {{"lambda", features.lambda},
                     {"alpha_c", features.alpha_c},
                     {"horizon_s", features.horizon_s},
                     {"horizon_step_s", features.horizon_step_s},
                     {"x_set", features.x_set},
                     {"eps_disp", features.eps_disp}};
    j["training"] = {{"learning_rate", training.learning_rate},
                     {"batch_size", training.batch_size},
                     {"epochs", training.epochs},
                     {"l2_coefficient", training.l2_coefficient},
                     {"dropout_rate", training.dropout_rate},
                     {"hidden", training.hidden}};
    j["ensemble_k"] = ensemble_k;
    j["test_ratio"] = test_ratio;
    j["uncertainty_metric"] = uncertainty_metric;
    j["synth"] = synth;
    nlohmann::json fam = nlohmann::json::array();
    for (const auto& m : family)
        fam.push_back({{"name", m.name}, {"overrides", m.overrides}});
    j["family"] = fam;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.seed = j.value("seed", c.seed);
    c.resample_hz = j.value("resample_hz", c.resample_hz);
    if (j.contains("windows")) {
        const auto& w = j.at("windows");
        c.windows.t_h_steps = w.value("t_h_steps", c.windows.t_h_steps);
        c.windows.t_f_steps = w.value("t_f_steps", c.windows.t_f_steps);
        c.windows.stride_steps = w.value("stride_steps", c.windows.stride_steps);
        c.windows.neighbor_radius_m =
            w.value("neighbor_radius_m", c.windows.neighbor_radius_m);
        c.windows.max_neighbors = w.value("max_neighbors", c.windows.max_neighbors);
    }
    if (j.contains("features")) {
        const auto& f = j.at("features");
        c.features.lambda = f.value("lambda", c.features.lambda);
        c.features.alpha_c = f.value("alpha_c", c.features.alpha_c);
        c.features.horizon_s = f.value("horizon_s", c.features.horizon_s);
        c.features.horizon_step_s =
            f.value("horizon_step_s", c.features.horizon_step_s);
        if (f.contains("x_set"))
            c.features.x_set = f.at("x_set").get<std::vector<double>>();
        c.features.eps_disp = f.value("eps_disp", c.features.eps_disp);
    }
    if (j.contains("training")) {
        const auto& t = j.at("training");
        c.training.learning_rate = t.value("learning_rate", c.training.learning_rate);
        c.training.batch_size = t.value("batch_size", c.training.batch_size);
        c.training.epochs = t.value("epochs", c.training.epochs);
        c.training.l2_coefficient =
            t.value("l2_coefficient", c.training.l2_coefficient);
        c.training.dropout_rate = t.value("dropout_rate", c.training.dropout_rate);
        c.training.hidden = t.value("hidden", c.training.hidden);
    }
    c.ensemble_k = j.value("ensemble_k", c.ensemble_k);
    c.test_ratio = j.value("test_ratio", c.test_ratio);
    c.uncertainty_metric = j.value("uncertainty_metric", c.uncertainty_metric);
    if (c.uncertainty_metric != "ape" && c.uncertainty_metric != "fpe")
        throw std::invalid_argument("config: uncertainty_metric must be ape or fpe");
    if (j.contains("synth")) c.synth = j.at("synth").get<GeneratorConfig>();
    if (j.contains("family")) {
        for (const auto& m : j.at("family")) {
            FamilyMember fm;
            fm.name = m.at("name").get<std::string>();
            fm.overrides = m.value("overrides", nlohmann::json::object());
            c.family.push_back(std::move(fm));
        }
    }
    // one seed drives everything downstream
    c.training.seed = c.seed;
    c.synth.seed = j.contains("synth") && j.at("synth").contains("seed")
                       ? c.synth.seed
                       : c.seed;
    if (c.ensemble_k < 2)
        throw std::invalid_argument("config: ensemble_k must be >= 2");
    if (c.test_ratio <= 0.0 || c.test_ratio >= 1.0)
        throw std::invalid_argument("config: test_ratio must be in (0, 1)");
    if (c.resample_hz <= 0.0)
        throw std::invalid_argument("config: resample_hz must be positive");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

}  // namespace traj
