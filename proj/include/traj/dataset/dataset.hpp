#pragma once

#include <string>
#include <vector>

#include "traj/dataset/types.hpp"

namespace traj {

struct ColumnSchema {
    std::string track_id = "track_id";
    std::string t = "t";
    std::string agent_type = "agent_type";
    std::string x = "x";
    std::string y = "y";
};

// CSV with header; required columns track_id,t,agent_type,x,y (names
// remappable through the schema). Optional map/signal JSON files attach the
// MapSpec and SignalTimeline.
Scene load_tracks(const std::string& path, const ColumnSchema& schema = {},
                  const std::string& map_path = "",
                  const std::string& signal_path = "");

void save_tracks(const Scene& scene, const std::string& path);
void save_map(const MapSpec& map, const std::string& path);
void save_signals(const SignalTimeline& signals, const std::string& path);
MapSpec load_map(const std::string& path);
SignalTimeline load_signals(const std::string& path);

// Uniform grid at 1/rate_hz starting at the first timestamp, positions
// linearly interpolated, no extrapolation past the original span.
Track resample_track(const Track& track, double rate_hz);
Scene resample_scene(const Scene& scene, double rate_hz);

struct WindowParams {
    int t_h_steps = 6;
    int t_f_steps = 6;
    int stride_steps = 1;
    double neighbor_radius_m = 30.0;
    int max_neighbors = 8;
};

// Requires a scene resampled to a uniform rate. Emits only windows with a
// full history and a full future.
std::vector<PredictionWindow> extract_windows(const Scene& scene,
                                              const WindowParams& params = {});

// Track-level split: all windows of a track land on the same side.
// Deterministic in (track-id set, ratio, seed).
DatasetSplit split_dataset(const std::vector<PredictionWindow>& windows,
                           double test_ratio, long seed);

}  // namespace traj
