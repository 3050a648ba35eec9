#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace traj {

enum class AgentType { small_vehicle, large_vehicle, two_wheeler, pedestrian };

AgentType agent_type_from_string(const std::string& tag);
std::string to_string(AgentType type);

struct TrackPoint {
    double t = 0.0;  // seconds
    double x = 0.0;  // meters
    double y = 0.0;  // meters
};

struct Track {
    std::string track_id;
    AgentType agent_type = AgentType::small_vehicle;
    std::vector<TrackPoint> points;  // t strictly increasing
};

struct StageRegion {
    int label = 1;  // 1..6
    std::string approach_id;
    std::vector<std::pair<double, double>> polygon;
};

struct StopLine {
    std::string approach_id;
    double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
};

struct MapSpec {
    std::vector<StageRegion> regions;
    std::vector<StopLine> stop_lines;
};

enum class SignalPhase { green, yellow, red };

SignalPhase phase_from_string(const std::string& s);
std::string to_string(SignalPhase p);

struct SignalInterval {
    SignalPhase phase = SignalPhase::green;
    double start_s = 0.0;
    double end_s = 0.0;  // [start_s, end_s)
};

struct SignalTimeline {
    // per approach, non-overlapping contiguous intervals
    std::map<std::string, std::vector<SignalInterval>> phases;

    std::optional<SignalPhase> phase_at(const std::string& approach_id,
                                        double t) const;
};

struct Scene {
    std::string scene_id;
    std::vector<Track> tracks;  // track_ids unique
    std::optional<MapSpec> map;
    std::optional<SignalTimeline> signals;

    const Track* find_track(const std::string& id) const;
};

struct NeighborState {
    double rel_x = 0.0, rel_y = 0.0;    // neighbor - target, meters
    double rel_vx = 0.0, rel_vy = 0.0;  // m/s
};

struct PredictionWindow {
    std::string target_track_id;
    double t0 = 0.0;
    std::vector<TrackPoint> history;  // t_h + 1 points, history.back().t == t0
    std::vector<TrackPoint> future;   // t_f points after t0
    // one entry per history point: nearest co-present neighbors
    std::vector<std::vector<NeighborState>> neighbor_states;
};

struct DatasetSplit {
    std::vector<PredictionWindow> train;
    std::vector<PredictionWindow> test;
    long seed = 0;
};

struct DatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace traj
