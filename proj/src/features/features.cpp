#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

#include "traj/features/features.hpp"

namespace traj {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

double mean(const std::vector<double>& v, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += v[i];
    return s / static_cast<double>(end - begin);
}

double mean_abs(const std::vector<double>& v, std::size_t begin,
                std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += std::abs(v[i]);
    return s / static_cast<double>(end - begin);
}

double max_abs(const std::vector<double>& v, std::size_t begin,
               std::size_t end) {
    double m = 0.0;
    for (std::size_t i = begin; i < end; ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

// position + backward-difference velocity of a track at time t (uniform grid)
struct AgentState {
    double x, y, vx, vy;
};

bool state_at(const Track& tr, double t, AgentState* out) {
    const auto& pts = tr.points;
    if (pts.size() < 2) return false;
    if (t < pts.front().t - 1e-9 || t > pts.back().t + 1e-9) return false;
    auto it = std::lower_bound(pts.begin(), pts.end(), t,
                               [](const TrackPoint& p, double tt) { return p.t < tt; });
    std::size_t i = static_cast<std::size_t>(it - pts.begin());
    if (i >= pts.size()) i = pts.size() - 1;
    double x, y;
    if (i == 0) {
        x = pts[0].x;
        y = pts[0].y;
    } else {
        const auto& a = pts[i - 1];
        const auto& b = pts[i];
        const double u = (t - a.t) / (b.t - a.t);
        x = a.x + u * (b.x - a.x);
        y = a.y + u * (b.y - a.y);
    }
    const std::size_t j = (i == 0) ? 1 : i;
    const double dt = pts[j].t - pts[j - 1].t;
    out->x = x;
    out->y = y;
    out->vx = (pts[j].x - pts[j - 1].x) / dt;
    out->vy = (pts[j].y - pts[j - 1].y) / dt;
    return true;
}

}  // namespace

std::string to_string(BehaviorLabel b) {
    switch (b) {
        case BehaviorLabel::straight: return "straight";
        case BehaviorLabel::left: return "left";
        case BehaviorLabel::right: return "right";
        case BehaviorLabel::u_turn: return "u_turn";
        case BehaviorLabel::unknown: return "unknown";
    }
    return "unknown";
}

std::string to_string(ComplianceLabel c) {
    switch (c) {
        case ComplianceLabel::compliant: return "compliant";
        case ComplianceLabel::yellow_running: return "yellow_running";
        case ComplianceLabel::red_running: return "red_running";
        case ComplianceLabel::unknown: return "unknown";
    }
    return "unknown";
}

KinematicSeries kinematic_series(const std::vector<TrackPoint>& points,
                                 double eps_disp) {
    const std::size_t n = points.size();
    if (n < 3) throw DatasetError("kinematic_series needs at least 3 points");
    const double dt = points[1].t - points[0].t;

    KinematicSeries s;
    s.speeds.reserve(n - 1);
    s.headings.reserve(n - 1);
    double carried_heading = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double dx = points[i].x - points[i - 1].x;
        const double dy = points[i].y - points[i - 1].y;
        const double disp = std::hypot(dx, dy);
        s.speeds.push_back(disp / dt);
        if (disp >= eps_disp) carried_heading = std::atan2(dy, dx);
        s.headings.push_back(carried_heading);
    }
    for (std::size_t i = 1; i < s.speeds.size(); ++i) {
        s.accelerations.push_back((s.speeds[i] - s.speeds[i - 1]) / dt);
        s.hcs.push_back(std::abs(wrap_angle(s.headings[i] - s.headings[i - 1])) /
                        dt);
    }
    return s;
}

KinematicFeatures kinematic_features(const PredictionWindow& window,
                                     const FeatureParams& params) {
    std::vector<TrackPoint> all = window.history;
    all.insert(all.end(), window.future.begin(), window.future.end());
    const std::size_t t_h = window.history.size() - 1;
    const std::size_t t_f = window.future.size();
    const KinematicSeries s = kinematic_series(all, params.eps_disp);

    KinematicFeatures f;
    // speeds: index i is the step ending at point i+1
    f.avht = mean(s.speeds, 0, t_h);
    f.cv = s.speeds[t_h - 1];
    f.avft = mean(s.speeds, t_h, t_h + t_f);
    // accelerations/hcs: index i pairs steps i and i+1; entries from t_h-1 on
    // involve a future step (seeded by the last two history points)
    f.aaht = mean_abs(s.accelerations, 0, t_h - 1);
    f.aaft = mean_abs(s.accelerations, t_h - 1, t_h + t_f - 1);
    f.maft = max_abs(s.accelerations, t_h - 1, t_h + t_f - 1);
    f.ahcsht = mean(s.hcs, 0, t_h - 1);
    f.ahcsft = mean(s.hcs, t_h - 1, t_h + t_f - 1);
    f.mhcsft = max_abs(s.hcs, t_h - 1, t_h + t_f - 1);
    return f;
}

InteractionFeatures interaction_features(const Scene& scene,
                                         const PredictionWindow& window,
                                         const FeatureParams& params) {
    const TrackPoint& tp = window.history.back();
    AgentState target{tp.x, tp.y, 0.0, 0.0};
    if (window.history.size() >= 2) {
        const TrackPoint& prev = window.history[window.history.size() - 2];
        const double dt = tp.t - prev.t;
        target.vx = (tp.x - prev.x) / dt;
        target.vy = (tp.y - prev.y) / dt;
    }

    struct Neighbor {
        double dist;
        AgentState state;
    };
    std::vector<Neighbor> neighbors;
    for (const auto& tr : scene.tracks) {
        if (tr.track_id == window.target_track_id) continue;
        AgentState st;
        if (!state_at(tr, window.t0, &st)) continue;
        neighbors.push_back({std::hypot(st.x - target.x, st.y - target.y), st});
    }

    std::vector<double> times;
    for (double t = params.horizon_step_s; t <= params.horizon_s + 1e-9;
         t += params.horizon_step_s)
        times.push_back(t);

    InteractionFeatures out;
    std::vector<double> xs = params.x_set;
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
        InteractionBand band;
        band.radius_m = x;
        for (const auto& nb : neighbors) {
            if (nb.dist > x) continue;
            band.ntp += 1.0;
            band.dtp += std::exp(-params.lambda * nb.dist);

            double wsum = 0.0;
            double wmin = std::numeric_limits<double>::infinity();
            for (double t : times) {
                const double dx =
                    (target.x + target.vx * t) - (nb.state.x + nb.state.vx * t);
                const double dy =
                    (target.y + target.vy * t) - (nb.state.y + nb.state.vy * t);
                const double alpha = 1.0 + params.alpha_c * t * t;
                const double w = alpha * std::hypot(dx, dy);
                wsum += w;
                wmin = std::min(wmin, w);
            }
            const double wmean = wsum / static_cast<double>(times.size());
            band.dctp_mean += std::exp(-params.lambda * wmean);
            // maximum-conflict aggregation: the smallest weighted distance
            band.dctp_max += std::exp(-params.lambda * wmin);
        }
        out.bands.push_back(band);
    }
    return out;
}

BehaviorLabel classify_behavior(const Track& track) {
    const auto& pts = track.points;
    if (pts.size() < 3) return BehaviorLabel::unknown;
    const std::size_t k = std::min<std::size_t>(3, pts.size() - 1);
    const double in_dx = pts[k].x - pts[0].x;
    const double in_dy = pts[k].y - pts[0].y;
    const std::size_t n = pts.size();
    const double out_dx = pts[n - 1].x - pts[n - 1 - k].x;
    const double out_dy = pts[n - 1].y - pts[n - 1 - k].y;
    if (std::hypot(in_dx, in_dy) < 1e-6 || std::hypot(out_dx, out_dy) < 1e-6)
        return BehaviorLabel::unknown;
    const double d =
        wrap_angle(std::atan2(out_dy, out_dx) - std::atan2(in_dy, in_dx));
    const double deg = d * 180.0 / kPi;
    if (std::abs(deg) <= 30.0) return BehaviorLabel::straight;
    if (deg > 30.0 && deg <= 150.0) return BehaviorLabel::left;
    if (deg < -30.0 && deg >= -150.0) return BehaviorLabel::right;
    return BehaviorLabel::u_turn;
}

namespace {

// proper segment intersection incl. endpoints; returns parameter on (p1,p2)
bool segments_intersect(double p1x, double p1y, double p2x, double p2y,
                        double q1x, double q1y, double q2x, double q2y,
                        double* u_out) {
    const double rx = p2x - p1x, ry = p2y - p1y;
    const double sx = q2x - q1x, sy = q2y - q1y;
    const double denom = rx * sy - ry * sx;
    if (std::abs(denom) < 1e-12) return false;
    const double qpx = q1x - p1x, qpy = q1y - p1y;
    const double u = (qpx * sy - qpy * sx) / denom;
    const double v = (qpx * ry - qpy * rx) / denom;
    if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0) return false;
    *u_out = u;
    return true;
}

}  // namespace

ComplianceLabel classify_compliance(const Track& track, const MapSpec& map,
                                    const SignalTimeline& signals) {
    if (map.stop_lines.empty() || signals.phases.empty())
        return ComplianceLabel::unknown;
    // earliest stop-line crossing along the track
    double best_t = std::numeric_limits<double>::infinity();
    const StopLine* best_line = nullptr;
    for (const auto& sl : map.stop_lines) {
        for (std::size_t i = 1; i < track.points.size(); ++i) {
            const auto& a = track.points[i - 1];
            const auto& b = track.points[i];
            double u;
            if (segments_intersect(a.x, a.y, b.x, b.y, sl.x1, sl.y1, sl.x2,
                                   sl.y2, &u)) {
                const double t = a.t + u * (b.t - a.t);
                if (t < best_t) {
                    best_t = t;
                    best_line = &sl;
                }
                break;
            }
        }
    }
    if (best_line == nullptr) return ComplianceLabel::compliant;
    const auto phase = signals.phase_at(best_line->approach_id, best_t);
    if (!phase.has_value()) return ComplianceLabel::unknown;
    switch (*phase) {
        case SignalPhase::green: return ComplianceLabel::compliant;
        case SignalPhase::yellow: return ComplianceLabel::yellow_running;
        case SignalPhase::red: return ComplianceLabel::red_running;
    }
    return ComplianceLabel::unknown;
}

bool point_in_polygon(double x, double y,
                      const std::vector<std::pair<double, double>>& polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    // boundary counts as inside
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [ax, ay] = polygon[i];
        const auto& [bx, by] = polygon[(i + 1) % n];
        const double cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
        if (std::abs(cross) < 1e-9 &&
            x >= std::min(ax, bx) - 1e-9 && x <= std::max(ax, bx) + 1e-9 &&
            y >= std::min(ay, by) - 1e-9 && y <= std::max(ay, by) + 1e-9)
            return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& [xi, yi] = polygon[i];
        const auto& [xj, yj] = polygon[j];
        if ((yi > y) != (yj > y) &&
            x < (xj - xi) * (y - yi) / (yj - yi) + xi)
            inside = !inside;
    }
    return inside;
}

int classify_location(const PredictionWindow& window, const MapSpec& map) {
    const TrackPoint& p = window.history.back();
    for (const auto& region : map.regions)
        if (point_in_polygon(p.x, p.y, region.polygon)) return region.label;
    return 0;
}

std::vector<FeatureVector> feature_table(
    const Scene& scene, const std::vector<PredictionWindow>& windows,
    const FeatureParams& params) {
    std::vector<FeatureVector> rows;
    rows.reserve(windows.size());
    for (const auto& w : windows) {
        FeatureVector fv;
        fv.target_track_id = w.target_track_id;
        fv.t0 = w.t0;
        fv.kinematic = kinematic_features(w, params);
        fv.interaction = interaction_features(scene, w, params);
        const Track* track = scene.find_track(w.target_track_id);
        if (track != nullptr) {
            fv.categorical.agent_type = track->agent_type;
            fv.categorical.behavior = classify_behavior(*track);
            if (scene.map.has_value() && scene.signals.has_value())
                fv.categorical.compliance =
                    classify_compliance(*track, *scene.map, *scene.signals);
            if (scene.map.has_value())
                fv.categorical.location_stage = classify_location(w, *scene.map);
        }
        rows.push_back(std::move(fv));
    }
    return rows;
}

std::vector<std::string> numeric_feature_names(const FeatureParams& params) {
    std::vector<std::string> names = {"AVHT", "CV",   "AVFT",   "AAHT",  "AAFT",
                                      "MAFT", "AHCSHT", "AHCSFT", "MHCSFT"};
    std::vector<double> xs = params.x_set;
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
        const std::string sx = std::to_string(static_cast<int>(x));
        names.push_back("NTP_" + sx);
        names.push_back("DTP_" + sx);
        names.push_back("DCTP_" + sx + "_mean");
        names.push_back("DCTP_" + sx + "_max");
    }
    return names;
}

std::vector<double> numeric_feature_row(const FeatureVector& fv) {
    const auto& k = fv.kinematic;
    std::vector<double> row = {k.avht, k.cv,     k.avft,   k.aaht,  k.aaft,
                               k.maft, k.ahcsht, k.ahcsft, k.mhcsft};
    for (const auto& band : fv.interaction.bands) {
        row.push_back(band.ntp);
        row.push_back(band.dtp);
        row.push_back(band.dctp_mean);
        row.push_back(band.dctp_max);
    }
    return row;
}

std::vector<std::string> feature_table_columns(const FeatureParams& params) {
    std::vector<std::string> cols = {"track_id", "t0"};
    for (const auto& n : numeric_feature_names(params)) cols.push_back(n);
    cols.insert(cols.end(),
                {"agent_type", "behavior", "compliance", "location_stage"});
    return cols;
}

void write_feature_table(const std::vector<FeatureVector>& table,
                         const FeatureParams& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot write feature table: " + path);
    const auto cols = feature_table_columns(params);
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << cols[i] << (i + 1 < cols.size() ? ',' : '\n');
    out << std::setprecision(17);
    for (const auto& fv : table) {
        out << fv.target_track_id << ',' << fv.t0;
        for (double v : numeric_feature_row(fv)) out << ',' << v;
        out << ',' << to_string(fv.categorical.agent_type) << ','
            << to_string(fv.categorical.behavior) << ','
            << to_string(fv.categorical.compliance) << ','
            << fv.categorical.location_stage << '\n';
    }
}

}  // namespace traj
