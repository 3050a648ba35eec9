#include <algorithm>
#include <cmath>
#include <random>

#include "traj/synthgen/generator.hpp"

namespace traj {

namespace {

constexpr double kPi = 3.14159265358979323846;
// intersection geometry (meters)
constexpr double kBoxHalf = 10.0;     // central square half width
constexpr double kCrosswalk = 3.0;    // crosswalk depth
constexpr double kGap = 2.0;          // gap between crosswalk and approach
constexpr double kStage1Len = 15.0;   // ex-entering stretch
constexpr double kRoadHalf = 5.0;     // half road width
constexpr double kBrake = 2.0;        // m/s^2 stop-and-go decel/accel
constexpr double kRadiusLeft = 8.0;
constexpr double kRadiusRight = 5.0;
constexpr double kRadiusU = 4.0;

struct Vec2 {
    double x = 0.0, y = 0.0;
};
Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
Vec2 rot90_left(Vec2 a) { return {-a.y, a.x}; }
Vec2 rot90_right(Vec2 a) { return {a.y, -a.x}; }

struct Approach {
    std::string name;
    Vec2 dir;  // direction of travel when entering
};

const Approach kApproaches[4] = {
    {"south", {0.0, 1.0}},
    {"west", {1.0, 0.0}},
    {"north", {0.0, -1.0}},
    {"east", {-1.0, 0.0}},
};

// Piecewise straight/arc path with arc-length evaluation.
struct Segment {
    bool is_arc = false;
    double length = 0.0;
    // straight
    Vec2 start, dir;
    // arc
    Vec2 center;
    double radius = 0.0, angle0 = 0.0, sweep_sign = 1.0;
};

struct Path {
    std::vector<Segment> segments;
    double total = 0.0;

    void add_straight(Vec2 start, Vec2 dir, double length) {
        Segment s;
        s.is_arc = false;
        s.start = start;
        s.dir = dir;
        s.length = length;
        segments.push_back(s);
        total += length;
    }
    void add_arc(Vec2 center, double radius, double angle0, double sweep,
                 double sign) {
        Segment s;
        s.is_arc = true;
        s.center = center;
        s.radius = radius;
        s.angle0 = angle0;
        s.sweep_sign = sign;
        s.length = radius * sweep;
        segments.push_back(s);
        total += s.length;
    }
    Vec2 end_point() const { return eval(total); }
    Vec2 eval(double s) const {
        double rem = std::min(s, total);
        for (const auto& seg : segments) {
            if (rem <= seg.length + 1e-12) {
                if (!seg.is_arc) return seg.start + rem * seg.dir;
                const double a = seg.angle0 + seg.sweep_sign * rem / seg.radius;
                return seg.center + Vec2{seg.radius * std::cos(a),
                                         seg.radius * std::sin(a)};
            }
            rem -= seg.length;
        }
        return segments.back().start;
    }
};

Path make_path(Behavior behavior, const Approach& ap, double arm_length,
               double lane_offset) {
    const Vec2 d = ap.dir;
    const Vec2 right = rot90_right(d);
    const Vec2 p0 = (-arm_length) * d + lane_offset * right;
    Path path;
    switch (behavior) {
        case Behavior::straight:
        case Behavior::stop_and_go:
            path.add_straight(p0, d, 2.0 * arm_length);
            break;
        case Behavior::left: {
            const double s1 = arm_length - kRadiusLeft;
            path.add_straight(p0, d, s1);
            const Vec2 turn_start = p0 + s1 * d;
            const Vec2 center = turn_start + kRadiusLeft * rot90_left(d);
            const double a0 = std::atan2(turn_start.y - center.y,
                                         turn_start.x - center.x);
            path.add_arc(center, kRadiusLeft, a0, kPi / 2.0, +1.0);
            const Vec2 out_dir = rot90_left(d);
            path.add_straight(path.eval(path.total), out_dir,
                              arm_length - kRadiusLeft);
            break;
        }
        case Behavior::right: {
            const double s1 = arm_length - kRadiusRight;
            path.add_straight(p0, d, s1);
            const Vec2 turn_start = p0 + s1 * d;
            const Vec2 center = turn_start + kRadiusRight * rot90_right(d);
            const double a0 = std::atan2(turn_start.y - center.y,
                                         turn_start.x - center.x);
            path.add_arc(center, kRadiusRight, a0, kPi / 2.0, -1.0);
            const Vec2 out_dir = rot90_right(d);
            path.add_straight(path.eval(path.total), out_dir,
                              arm_length - kRadiusRight);
            break;
        }
        case Behavior::u_turn: {
            const double s1 = arm_length - kRadiusU;
            path.add_straight(p0, d, s1);
            const Vec2 turn_start = p0 + s1 * d;
            const Vec2 center = turn_start + kRadiusU * rot90_left(d);
            const double a0 = std::atan2(turn_start.y - center.y,
                                         turn_start.x - center.x);
            path.add_arc(center, kRadiusU, a0, kPi, +1.0);
            const Vec2 out_dir = -1.0 * d;
            path.add_straight(path.eval(path.total), out_dir, s1);
            break;
        }
    }
    return path;
}

bool is_ns(const Approach& ap) { return ap.dir.x == 0.0; }

SignalTimeline build_signals(const GeneratorConfig& c, double horizon_s) {
    SignalTimeline tl;
    const double cycle = c.green_s + c.yellow_s + c.red_s;
    for (const auto& ap : kApproaches) {
        // east-west runs half a cycle out of phase with north-south
        const double offset = is_ns(ap) ? 0.0 : c.green_s + c.yellow_s;
        std::vector<SignalInterval> ivs;
        double t = -cycle;  // cover t slightly before zero as well
        while (t < horizon_s + cycle) {
            ivs.push_back({SignalPhase::green, t + offset, t + offset + c.green_s});
            ivs.push_back({SignalPhase::yellow, t + offset + c.green_s,
                           t + offset + c.green_s + c.yellow_s});
            ivs.push_back({SignalPhase::red, t + offset + c.green_s + c.yellow_s,
                           t + offset + cycle});
            t += cycle;
        }
        tl.phases[ap.name] = std::move(ivs);
    }
    return tl;
}

MapSpec build_map(const GeneratorConfig& c) {
    MapSpec map;
    auto rect = [](Vec2 d, double a1, double a2, double w1, double w2) {
        const Vec2 right = rot90_right(d);
        std::vector<std::pair<double, double>> poly;
        const Vec2 p1 = (-a2) * d + w1 * right;
        const Vec2 p2 = (-a1) * d + w1 * right;
        const Vec2 p3 = (-a1) * d + w2 * right;
        const Vec2 p4 = (-a2) * d + w2 * right;
        poly = {{p1.x, p1.y}, {p2.x, p2.y}, {p3.x, p3.y}, {p4.x, p4.y}};
        return poly;
    };
    // entry-side stages for every approach first (they win overlap ties)
    for (const auto& ap : kApproaches) {
        const double b = kBoxHalf;
        map.regions.push_back({1, ap.name,
                               rect(ap.dir, b + kCrosswalk + kGap,
                                    b + kCrosswalk + kGap + kStage1Len,
                                    -kRoadHalf, kRoadHalf)});
        map.regions.push_back({2, ap.name,
                               rect(ap.dir, b + kCrosswalk, b + kCrosswalk + kGap,
                                    -kRoadHalf, kRoadHalf)});
        map.regions.push_back({3, ap.name,
                               rect(ap.dir, b, b + kCrosswalk, -kRoadHalf,
                                    kRoadHalf)});
    }
    // central square
    map.regions.push_back({4, "center",
                           {{-kBoxHalf, -kBoxHalf},
                            {kBoxHalf, -kBoxHalf},
                            {kBoxHalf, kBoxHalf},
                            {-kBoxHalf, kBoxHalf}}});
    // exit-side stages (opposite arm, straight-through convention)
    for (const auto& ap : kApproaches) {
        const Vec2 out = -1.0 * ap.dir;
        map.regions.push_back({5, ap.name,
                               rect(out, kBoxHalf, kBoxHalf + kCrosswalk,
                                    -kRoadHalf, kRoadHalf)});
        map.regions.push_back({6, ap.name,
                               rect(out, kBoxHalf + kCrosswalk,
                                    kBoxHalf + kCrosswalk + kGap + kStage1Len,
                                    -kRoadHalf, kRoadHalf)});
    }
    for (const auto& ap : kApproaches) {
        const double u = kBoxHalf + kCrosswalk;
        const Vec2 right = rot90_right(ap.dir);
        const Vec2 a = (-u) * ap.dir;
        const Vec2 b = (-u) * ap.dir + kRoadHalf * right;
        map.stop_lines.push_back({ap.name, a.x, a.y, b.x, b.y});
    }
    return map;
}

AgentType sample_agent_type(const GeneratorConfig& c, std::mt19937_64& rng) {
    double total = 0.0;
    for (const auto& [k, w] : c.agent_mix) total += w;
    std::uniform_real_distribution<double> u(0.0, total);
    double r = u(rng);
    for (const auto& [k, w] : c.agent_mix) {
        if (r < w) return k;
        r -= w;
    }
    return c.agent_mix.rbegin()->first;
}

}  // namespace

std::string to_string(Behavior b) {
    switch (b) {
        case Behavior::straight: return "straight";
        case Behavior::left: return "left";
        case Behavior::right: return "right";
        case Behavior::u_turn: return "u_turn";
        case Behavior::stop_and_go: return "stop_and_go";
    }
    return "unknown";
}

double nominal_speed(AgentType type) {
    switch (type) {
        case AgentType::small_vehicle: return 8.0;
        case AgentType::large_vehicle: return 6.0;
        case AgentType::two_wheeler: return 4.0;
        case AgentType::pedestrian: return 1.5;
    }
    return 8.0;
}

void GeneratorConfig::validate() const {
    if (accel_noise_std < 0.0 || heading_noise_std < 0.0)
        throw DatasetError("noise std must be non-negative");
    if (green_s <= 0.0 || yellow_s <= 0.0 || red_s <= 0.0)
        throw DatasetError("signal durations must be positive");
    if (n_tracks < 1) throw DatasetError("n_tracks must be positive");
    double mix = 0.0;
    for (const auto& [b, w] : behavior_mix) mix += w;
    if (std::abs(mix - 1.0) > 1e-6)
        throw DatasetError("behavior mix weights must sum to 1");
}

Scene generate_scene(const GeneratorConfig& config) {
    config.validate();
    std::mt19937_64 rng(static_cast<unsigned long long>(config.seed));
    std::normal_distribution<double> gauss(0.0, 1.0);

    // behavior sequence: counts proportional to mix, interleaved round-robin
    std::vector<Behavior> behaviors;
    {
        std::vector<std::pair<Behavior, int>> counts;
        int assigned = 0;
        for (const auto& [b, w] : config.behavior_mix) {
            int n = static_cast<int>(std::llround(w * config.n_tracks));
            counts.emplace_back(b, n);
            assigned += n;
        }
        // pad/trim to the requested total on the first class
        if (!counts.empty()) counts.front().second += config.n_tracks - assigned;
        bool any = true;
        while (any) {
            any = false;
            for (auto& [b, n] : counts)
                if (n > 0) {
                    behaviors.push_back(b);
                    --n;
                    any = true;
                }
        }
    }

    const double horizon =
        config.headway_s * config.n_tracks + 6.0 * config.arm_length_m + 120.0;
    Scene scene;
    scene.scene_id = "synth_seed" + std::to_string(config.seed);
    scene.signals = build_signals(config, horizon);
    scene.map = build_map(config);

    const double dt = config.sample_dt_s;
    for (std::size_t i = 0; i < behaviors.size(); ++i) {
        const Behavior behavior = behaviors[i];
        const Approach& ap = kApproaches[i % 4];
        const AgentType type = sample_agent_type(config, rng);
        const double v0 = nominal_speed(type) * config.speed_scale;
        const Path path =
            make_path(behavior, ap, config.arm_length_m, config.lane_offset_m);

        Track tr;
        tr.track_id = "t" + std::to_string(i) + "_" + to_string(behavior);
        tr.agent_type = type;

        const double t_start = config.headway_s * static_cast<double>(i);
        // stop just short of the stop line (stop line at box + crosswalk)
        const double s_stop =
            config.arm_length_m - (kBoxHalf + kCrosswalk) - 1.0;

        double t = t_start;
        double s = 0.0;
        double v = v0;
        Vec2 drift{0.0, 0.0};  // accumulated heading-noise offset
        std::size_t guard = 0;
        while (s < path.total - 1e-9 && guard++ < 100000) {
            const Vec2 p = path.eval(s) + drift;
            tr.points.push_back({t, p.x, p.y});

            double accel = 0.0;
            bool hold = false;  // red/yellow ahead: do not pass the stop line
            if (behavior == Behavior::stop_and_go && s < s_stop + 1e-6) {
                const auto phase = scene.signals->phase_at(ap.name, t);
                const bool go = phase.has_value() && *phase == SignalPhase::green;
                const double dist = s_stop - s;
                if (!go && (dist <= v * v / (2.0 * kBrake) + v * dt ||
                            dist <= 1.0)) {
                    accel = -kBrake;
                    hold = true;
                } else if (v < v0) {
                    accel = kBrake;
                }
            } else if (v < v0) {
                accel = kBrake;
            }
            if (config.accel_noise_std > 0.0)
                accel += config.accel_noise_std * gauss(rng) / std::sqrt(dt);
            const double v_cap =
                (accel > 0.0 && config.accel_noise_std == 0.0) ? v0
                                                               : 2.0 * v0 + 5.0;
            v = std::clamp(v + accel * dt, 0.0, v_cap);
            if (hold) v = std::min(v, std::max(0.0, (s_stop - s) / dt));

            if (config.heading_noise_std > 0.0 && v > 1e-9) {
                const Vec2 cur = path.eval(std::min(s + v * dt, path.total));
                Vec2 step = cur - path.eval(s);
                const double eta = config.heading_noise_std * gauss(rng);
                const Vec2 rotated{step.x * std::cos(eta) - step.y * std::sin(eta),
                                   step.x * std::sin(eta) + step.y * std::cos(eta)};
                drift = drift + (rotated - step);
            }
            s += v * dt;
            t += dt;
        }
        if (tr.points.size() >= 2) scene.tracks.push_back(std::move(tr));
    }
    return scene;
}

GeneratorConfig family_member_config(const GeneratorConfig& base,
                                     const FamilyMember& member, int index) {
    nlohmann::json j;
    to_json(j, base);
    if (!member.overrides.is_null())
        j.merge_patch(member.overrides);
    GeneratorConfig c;
    from_json(j, c);
    c.seed = base.seed + index;
    if (member.overrides.contains("seed"))
        c.seed = member.overrides.at("seed").get<long>();
    return c;
}

std::vector<std::pair<std::string, Scene>> generate_dataset_family(
    const GeneratorConfig& base, const std::vector<FamilyMember>& members) {
    if (members.size() < 2)
        throw DatasetError("dataset family needs at least 2 members");
    std::vector<std::pair<std::string, Scene>> out;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t k = 0; k < i; ++k)
            if (members[k].name == members[i].name)
                throw DatasetError("duplicate family member name: " +
                                   members[i].name);
        const GeneratorConfig c =
            family_member_config(base, members[i], static_cast<int>(i));
        out.emplace_back(members[i].name, generate_scene(c));
    }
    return out;
}

void to_json(nlohmann::json& j, const GeneratorConfig& c) {
    nlohmann::json bm, am;
    for (const auto& [b, w] : c.behavior_mix) bm[to_string(b)] = w;
    for (const auto& [a, w] : c.agent_mix) am[to_string(a)] = w;
    j = {{"seed", c.seed},
         {"n_tracks", c.n_tracks},
         {"speed_scale", c.speed_scale},
         {"accel_noise_std", c.accel_noise_std},
         {"heading_noise_std", c.heading_noise_std},
         {"behavior_mix", bm},
         {"agent_mix", am},
         {"green_s", c.green_s},
         {"yellow_s", c.yellow_s},
         {"red_s", c.red_s},
         {"arm_length_m", c.arm_length_m},
         {"lane_offset_m", c.lane_offset_m},
         {"headway_s", c.headway_s},
         {"sample_dt_s", c.sample_dt_s}};
}

void from_json(const nlohmann::json& j, GeneratorConfig& c) {
    c.seed = j.value("seed", c.seed);
    c.n_tracks = j.value("n_tracks", c.n_tracks);
    c.speed_scale = j.value("speed_scale", c.speed_scale);
    c.accel_noise_std = j.value("accel_noise_std", c.accel_noise_std);
    c.heading_noise_std = j.value("heading_noise_std", c.heading_noise_std);
    if (j.contains("behavior_mix")) {
        std::map<Behavior, double> bm;
        for (const auto& [k, v] : j.at("behavior_mix").items()) {
            Behavior b;
            if (k == "straight") b = Behavior::straight;
            else if (k == "left") b = Behavior::left;
            else if (k == "right") b = Behavior::right;
            else if (k == "u_turn") b = Behavior::u_turn;
            else if (k == "stop_and_go") b = Behavior::stop_and_go;
            else throw DatasetError("unknown behavior: " + k);
            bm[b] = v.get<double>();
        }
        c.behavior_mix = std::move(bm);
    }
    if (j.contains("agent_mix")) {
        std::map<AgentType, double> am;
        for (const auto& [k, v] : j.at("agent_mix").items())
            am[agent_type_from_string(k)] = v.get<double>();
        c.agent_mix = std::move(am);
    }
    c.green_s = j.value("green_s", c.green_s);
    c.yellow_s = j.value("yellow_s", c.yellow_s);
    c.red_s = j.value("red_s", c.red_s);
    c.arm_length_m = j.value("arm_length_m", c.arm_length_m);
    c.lane_offset_m = j.value("lane_offset_m", c.lane_offset_m);
    c.headway_s = j.value("headway_s", c.headway_s);
    c.sample_dt_s = j.value("sample_dt_s", c.sample_dt_s);
}

}  // namespace traj
