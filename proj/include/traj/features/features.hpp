#pragma once

#include <map>
#include <string>
#include <vector>

#include "traj/dataset/types.hpp"

namespace traj {

struct KinematicSeries {
    std::vector<double> speeds;         // n-1 entries, m/s
    std::vector<double> accelerations;  // n-2 entries, m/s^2 (signed)
    std::vector<double> headings;       // n-1 entries, rad in (-pi, pi]
    std::vector<double> hcs;            // n-2 entries, rad/s, >= 0
};

struct KinematicFeatures {
    double avht = 0.0, cv = 0.0, avft = 0.0;     // m/s
    double aaht = 0.0, aaft = 0.0, maft = 0.0;   // m/s^2 (absolute)
    double ahcsht = 0.0, ahcsft = 0.0, mhcsft = 0.0;  // rad/s
};

struct InteractionBand {
    double radius_m = 0.0;
    double ntp = 0.0;        // neighbor count at t0
    double dtp = 0.0;        // sum of exp(-lambda * d_j)
    double dctp_mean = 0.0;  // mean-aggregated extrapolated conflict
    double dctp_max = 0.0;   // max-conflict aggregation (min weighted distance)
};

struct InteractionFeatures {
    std::vector<InteractionBand> bands;  // one per x in x_set, ascending
};

enum class BehaviorLabel { straight, left, right, u_turn, unknown };
enum class ComplianceLabel { compliant, yellow_running, red_running, unknown };

std::string to_string(BehaviorLabel b);
std::string to_string(ComplianceLabel c);

struct CategoricalFeatures {
    AgentType agent_type = AgentType::small_vehicle;
    BehaviorLabel behavior = BehaviorLabel::unknown;
    ComplianceLabel compliance = ComplianceLabel::unknown;
    int location_stage = 0;  // 1..6, 0 = outside
};

struct FeatureVector {
    std::string target_track_id;
    double t0 = 0.0;
    KinematicFeatures kinematic;
    InteractionFeatures interaction;
    CategoricalFeatures categorical;
};

struct FeatureParams {
    double lambda = 0.2;          // 1/m, exponential distance scale
    double alpha_c = 0.25;        // 1/s^2 in alpha(t) = 1 + c t^2
    double horizon_s = 3.0;       // T for conflict extrapolation
    double horizon_step_s = 0.5;  // h
    std::vector<double> x_set = {10.0, 20.0, 30.0, 50.0};
    double eps_disp = 0.05;       // m, heading carry-forward threshold
};

// Finite-difference series over a uniform-step point sequence. Headings are
// carried forward unchanged when the step displacement is below eps_disp.
KinematicSeries kinematic_series(const std::vector<TrackPoint>& points,
                                 double eps_disp = 0.05);

KinematicFeatures kinematic_features(const PredictionWindow& window,
                                     const FeatureParams& params = {});

InteractionFeatures interaction_features(const Scene& scene,
                                         const PredictionWindow& window,
                                         const FeatureParams& params = {});

BehaviorLabel classify_behavior(const Track& track);
ComplianceLabel classify_compliance(const Track& track, const MapSpec& map,
                                    const SignalTimeline& signals);
int classify_location(const PredictionWindow& window, const MapSpec& map);

// first polygon (file order) containing the point wins; boundary counts as in
bool point_in_polygon(double x, double y,
                      const std::vector<std::pair<double, double>>& polygon);

std::vector<FeatureVector> feature_table(
    const Scene& scene, const std::vector<PredictionWindow>& windows,
    const FeatureParams& params = {});

// stable column order; one row per window
std::vector<std::string> feature_table_columns(const FeatureParams& params);
void write_feature_table(const std::vector<FeatureVector>& table,
                         const FeatureParams& params, const std::string& path);

// numeric view of one row, aligned with the numeric columns of
// feature_table_columns (categoricals excluded)
std::vector<std::string> numeric_feature_names(const FeatureParams& params);
std::vector<double> numeric_feature_row(const FeatureVector& fv);

}  // namespace traj
