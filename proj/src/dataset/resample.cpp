#include <cmath>

#include "traj/dataset/dataset.hpp"

namespace traj {

Track resample_track(const Track& track, double rate_hz) {
    if (rate_hz <= 0.0) throw DatasetError("rate_hz must be positive");
    if (track.points.size() < 2)
        throw DatasetError("track too short to resample: " + track.track_id);
    const double dt = 1.0 / rate_hz;
    const double t_begin = track.points.front().t;
    const double t_end = track.points.back().t;
    if (t_end - t_begin < dt)
        throw DatasetError("track shorter than one output step: " + track.track_id);

    Track out;
    out.track_id = track.track_id;
    out.agent_type = track.agent_type;

    const auto& pts = track.points;
    std::size_t seg = 0;
    const long n_steps = static_cast<long>(
        std::floor((t_end - t_begin) / dt + 1e-9));
    for (long k = 0; k <= n_steps; ++k) {
        const double t = t_begin + static_cast<double>(k) * dt;
        while (seg + 2 < pts.size() && pts[seg + 1].t < t) ++seg;
        const TrackPoint& a = pts[seg];
        const TrackPoint& b = pts[seg + 1];
        double u = (t - a.t) / (b.t - a.t);
        if (u < 0.0) u = 0.0;
        if (u > 1.0) u = 1.0;
        out.points.push_back({t, a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)});
    }
    // keep endpoints exact when the grid lands on them
    out.points.front().x = pts.front().x;
    out.points.front().y = pts.front().y;
    if (std::abs(out.points.back().t - t_end) < 1e-9) {
        out.points.back().x = pts.back().x;
        out.points.back().y = pts.back().y;
    }
    return out;
}

Scene resample_scene(const Scene& scene, double rate_hz) {
    Scene out;
    out.scene_id = scene.scene_id;
    out.map = scene.map;
    out.signals = scene.signals;
    for (const auto& tr : scene.tracks) {
        if (tr.points.size() < 2) continue;
        if (tr.points.back().t - tr.points.front().t < 1.0 / rate_hz) continue;
        out.tracks.push_back(resample_track(tr, rate_hz));
    }
    return out;
}

}  // namespace traj
