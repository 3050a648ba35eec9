#include <algorithm>
#include <cmath>

#include "traj/dataset/dataset.hpp"

namespace traj {

namespace {

// position at time t by linear interpolation; false when t is outside the span
bool position_at(const Track& tr, double t, double* x, double* y) {
    const auto& pts = tr.points;
    if (t < pts.front().t - 1e-9 || t > pts.back().t + 1e-9) return false;
    auto it = std::lower_bound(pts.begin(), pts.end(), t,
                               [](const TrackPoint& p, double tt) { return p.t < tt; });
    if (it == pts.begin()) {
        *x = pts.front().x;
        *y = pts.front().y;
        return true;
    }
    if (it == pts.end()) {
        *x = pts.back().x;
        *y = pts.back().y;
        return true;
    }
    const TrackPoint& b = *it;
    const TrackPoint& a = *(it - 1);
    const double u = (t - a.t) / (b.t - a.t);
    *x = a.x + u * (b.x - a.x);
    *y = a.y + u * (b.y - a.y);
    return true;
}

// backward finite-difference velocity over one scene step (forward at the
// start of the span)
void velocity_at(const Track& tr, double t, double dt, double* vx, double* vy) {
    double x1, y1;
    position_at(tr, t, &x1, &y1);
    double x0, y0;
    if (position_at(tr, t - dt, &x0, &y0) && t - dt >= tr.points.front().t - 1e-9) {
        *vx = (x1 - x0) / dt;
        *vy = (y1 - y0) / dt;
        return;
    }
    double x2, y2;
    if (position_at(tr, t + dt, &x2, &y2)) {
        *vx = (x2 - x1) / dt;
        *vy = (y2 - y1) / dt;
        return;
    }
    *vx = 0.0;
    *vy = 0.0;
}

}  // namespace

std::vector<PredictionWindow> extract_windows(const Scene& scene,
                                              const WindowParams& params) {
    std::vector<PredictionWindow> windows;
    const int t_h = params.t_h_steps;
    const int t_f = params.t_f_steps;
    const int stride = std::max(1, params.stride_steps);

    for (const auto& target : scene.tracks) {
        const auto& pts = target.points;
        const int n = static_cast<int>(pts.size());
        if (n < t_h + t_f + 1) continue;
        const double dt = pts[1].t - pts[0].t;

        for (int i = t_h; i + t_f < n; i += stride) {
            PredictionWindow w;
            w.target_track_id = target.track_id;
            w.t0 = pts[i].t;
            w.history.assign(pts.begin() + (i - t_h), pts.begin() + i + 1);
            w.future.assign(pts.begin() + i + 1, pts.begin() + i + 1 + t_f);

            w.neighbor_states.resize(t_h + 1);
            for (int s = 0; s <= t_h; ++s) {
                const TrackPoint& tp = w.history[s];
                double tvx, tvy;
                velocity_at(target, tp.t, dt, &tvx, &tvy);

                struct Cand {
                    double dist;
                    const Track* track;
                    NeighborState state;
                };
                std::vector<Cand> cands;
                for (const auto& nb : scene.tracks) {
                    if (&nb == &target) continue;
                    double nx, ny;
                    if (!position_at(nb, tp.t, &nx, &ny)) continue;
                    const double dx = nx - tp.x;
                    const double dy = ny - tp.y;
                    const double d = std::hypot(dx, dy);
                    if (d > params.neighbor_radius_m) continue;
                    double nvx, nvy;
                    velocity_at(nb, tp.t, dt, &nvx, &nvy);
                    cands.push_back({d, &nb, {dx, dy, nvx - tvx, nvy - tvy}});
                }
                std::sort(cands.begin(), cands.end(),
                          [](const Cand& a, const Cand& b) {
                              if (a.dist != b.dist) return a.dist < b.dist;
                              return a.track->track_id < b.track->track_id;
                          });
                if (static_cast<int>(cands.size()) > params.max_neighbors)
                    cands.resize(params.max_neighbors);
                for (const auto& c : cands)
                    w.neighbor_states[s].push_back(c.state);
            }
            windows.push_back(std::move(w));
        }
    }
    return windows;
}

}  // namespace traj
