#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "traj/dataset/types.hpp"

namespace traj {

enum class Behavior { straight, left, right, u_turn, stop_and_go };

std::string to_string(Behavior b);

// Parametric four-arm signalized intersection generator. Tracks follow
// kinematic templates (straight runs, circular-arc turns, stop-and-go speed
// profiles tied to the signal) plus optional Gaussian perturbations.
struct GeneratorConfig {
    long seed = 1;
    int n_tracks = 40;  // total; allocated across behaviors by mix weight
    double speed_scale = 1.0;
    double accel_noise_std = 0.0;    // m/s^2
    double heading_noise_std = 0.0;  // rad
    std::map<Behavior, double> behavior_mix = {{Behavior::straight, 0.4},
                                               {Behavior::left, 0.2},
                                               {Behavior::right, 0.2},
                                               {Behavior::u_turn, 0.1},
                                               {Behavior::stop_and_go, 0.1}};
    std::map<AgentType, double> agent_mix = {{AgentType::small_vehicle, 0.6},
                                             {AgentType::large_vehicle, 0.2},
                                             {AgentType::two_wheeler, 0.1},
                                             {AgentType::pedestrian, 0.1}};
    double green_s = 20.0;
    double yellow_s = 3.0;
    double red_s = 23.0;
    double arm_length_m = 60.0;
    double lane_offset_m = 1.75;
    double headway_s = 2.0;    // start-time spacing between tracks
    double sample_dt_s = 0.1;  // generation time step

    void validate() const;
};

void to_json(nlohmann::json& j, const GeneratorConfig& c);
void from_json(const nlohmann::json& j, GeneratorConfig& c);

Scene generate_scene(const GeneratorConfig& config);

struct FamilyMember {
    std::string name;
    nlohmann::json overrides;  // merged onto the base config
};

std::vector<std::pair<std::string, Scene>> generate_dataset_family(
    const GeneratorConfig& base, const std::vector<FamilyMember>& members);

// The config actually used for member i: overrides applied, seed = base + i.
GeneratorConfig family_member_config(const GeneratorConfig& base,
                                     const FamilyMember& member, int index);

double nominal_speed(AgentType type);

}  // namespace traj
