#include "traj/dataset/types.hpp"

namespace traj {

AgentType agent_type_from_string(const std::string& tag) {
    if (tag == "small_vehicle") return AgentType::small_vehicle;
    if (tag == "large_vehicle") return AgentType::large_vehicle;
    if (tag == "two_wheeler") return AgentType::two_wheeler;
    if (tag == "pedestrian") return AgentType::pedestrian;
    throw DatasetError("unknown agent_type tag: " + tag);
}

std::string to_string(AgentType type) {
    switch (type) {
        case AgentType::small_vehicle: return "small_vehicle";
        case AgentType::large_vehicle: return "large_vehicle";
        case AgentType::two_wheeler: return "two_wheeler";
        case AgentType::pedestrian: return "pedestrian";
    }
    return "unknown";
}

SignalPhase phase_from_string(const std::string& s) {
    if (s == "green") return SignalPhase::green;
    if (s == "yellow") return SignalPhase::yellow;
    if (s == "red") return SignalPhase::red;
    throw DatasetError("unknown signal phase: " + s);
}

std::string to_string(SignalPhase p) {
    switch (p) {
        case SignalPhase::green: return "green";
        case SignalPhase::yellow: return "yellow";
        case SignalPhase::red: return "red";
    }
    return "unknown";
}

std::optional<SignalPhase> SignalTimeline::phase_at(
    const std::string& approach_id, double t) const {
    auto it = phases.find(approach_id);
    if (it == phases.end()) return std::nullopt;
    // closed intervals; at a shared boundary instant the earlier interval
    // in list order wins
    for (const auto& iv : it->second)
        if (t >= iv.start_s && t <= iv.end_s) return iv.phase;
    return std::nullopt;
}

const Track* Scene::find_track(const std::string& id) const {
    for (const auto& tr : tracks)
        if (tr.track_id == id) return &tr;
    return nullptr;
}

}  // namespace traj
