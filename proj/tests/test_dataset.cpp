#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "traj/dataset/dataset.hpp"
#include "traj/synthgen/generator.hpp"

using namespace traj;

namespace {

Track grid_track(const std::string& id, double t0, int n, double dt,
                 double x0, double y0, double vx, double vy,
                 AgentType type = AgentType::small_vehicle) {
    Track tr;
    tr.track_id = id;
    tr.agent_type = type;
    for (int i = 0; i < n; ++i)
        tr.points.push_back({t0 + i * dt, x0 + vx * i * dt, y0 + vy * i * dt});
    return tr;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("load_tracks parses a minimal two-row file") {
    const auto path = temp_path("mini_tracks.csv");
    {
        std::ofstream out(path);
        out << "track_id,t,agent_type,x,y\n";
        out << "a,0.0,small_vehicle,1.0,2.0\n";
        out << "a,0.5,small_vehicle,2.0,3.0\n";
    }
    const Scene scene = load_tracks(path);
    REQUIRE(scene.tracks.size() == 1);
    CHECK(scene.tracks[0].track_id == "a");
    CHECK(scene.tracks[0].agent_type == AgentType::small_vehicle);
    REQUIRE(scene.tracks[0].points.size() == 2);
    CHECK(scene.tracks[0].points[1].t == 0.5);
    CHECK(scene.tracks[0].points[1].x == 2.0);
}

TEST_CASE("load_tracks rejects malformed input") {
    SUBCASE("duplicate timestamp") {
        const auto path = temp_path("dup_ts.csv");
        std::ofstream(path) << "track_id,t,agent_type,x,y\n"
                               "a,0.0,small_vehicle,0,0\n"
                               "a,0.0,small_vehicle,1,1\n";
        CHECK_THROWS_WITH_AS(load_tracks(path),
                             doctest::Contains("non-monotone timestamps"),
                             DatasetError);
    }
    SUBCASE("missing column") {
        const auto path = temp_path("no_y.csv");
        std::ofstream(path) << "track_id,t,agent_type,x\n"
                               "a,0.0,small_vehicle,0\n";
        CHECK_THROWS_AS(load_tracks(path), DatasetError);
    }
    SUBCASE("unknown agent type") {
        const auto path = temp_path("bad_type.csv");
        std::ofstream(path) << "track_id,t,agent_type,x,y\n"
                               "a,0.0,hovercraft,0,0\n"
                               "a,0.5,hovercraft,1,1\n";
        CHECK_THROWS_AS(load_tracks(path), DatasetError);
    }
}

TEST_CASE("load_tracks supports column remapping") {
    const auto path = temp_path("remap.csv");
    std::ofstream(path) << "id,time,cls,px,py\n"
                           "a,0.0,pedestrian,0,0\n"
                           "a,0.5,pedestrian,1,1\n";
    ColumnSchema schema;
    schema.track_id = "id";
    schema.t = "time";
    schema.agent_type = "cls";
    schema.x = "px";
    schema.y = "py";
    const Scene scene = load_tracks(path, schema);
    REQUIRE(scene.tracks.size() == 1);
    CHECK(scene.tracks[0].agent_type == AgentType::pedestrian);
}

TEST_CASE("generated scenes round-trip through save/load") {
    GeneratorConfig config;
    config.seed = 5;
    config.n_tracks = 8;
    config.accel_noise_std = 0.2;
    config.heading_noise_std = 0.01;
    const Scene scene = generate_scene(config);

    const auto tracks_path = temp_path("rt_tracks.csv");
    const auto map_path = temp_path("rt_map.json");
    const auto signal_path = temp_path("rt_signals.json");
    save_tracks(scene, tracks_path);
    save_map(*scene.map, map_path);
    save_signals(*scene.signals, signal_path);

    const Scene loaded = load_tracks(tracks_path, {}, map_path, signal_path);
    REQUIRE(loaded.tracks.size() == scene.tracks.size());
    for (std::size_t i = 0; i < scene.tracks.size(); ++i) {
        const Track& a = scene.tracks[i];
        const Track& b = loaded.tracks[i];
        CHECK(a.track_id == b.track_id);
        CHECK(a.agent_type == b.agent_type);
        REQUIRE(a.points.size() == b.points.size());
        for (std::size_t p = 0; p < a.points.size(); ++p) {
            CHECK(a.points[p].t == b.points[p].t);
            CHECK(a.points[p].x == b.points[p].x);
            CHECK(a.points[p].y == b.points[p].y);
        }
    }
    REQUIRE(loaded.map.has_value());
    REQUIRE(loaded.map->regions.size() == scene.map->regions.size());
    for (std::size_t i = 0; i < scene.map->regions.size(); ++i) {
        CHECK(loaded.map->regions[i].label == scene.map->regions[i].label);
        CHECK(loaded.map->regions[i].polygon == scene.map->regions[i].polygon);
    }
    CHECK(loaded.map->stop_lines.size() == scene.map->stop_lines.size());
    REQUIRE(loaded.signals.has_value());
    REQUIRE(loaded.signals->phases.size() == scene.signals->phases.size());
    for (const auto& [approach, intervals] : scene.signals->phases) {
        const auto& got = loaded.signals->phases.at(approach);
        REQUIRE(got.size() == intervals.size());
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            CHECK(got[i].phase == intervals[i].phase);
            CHECK(got[i].start_s == intervals[i].start_s);
            CHECK(got[i].end_s == intervals[i].end_s);
        }
    }
}

TEST_CASE("resample_track interpolates onto a uniform grid") {
    SUBCASE("downsampling preserves endpoints") {
        Track tr;
        tr.track_id = "a";
        tr.points = {{0.0, 0.0, 0.0}, {0.25, 1.0, 0.0}, {0.5, 2.0, 0.0}};
        const Track out = resample_track(tr, 2.0);
        REQUIRE(out.points.size() == 2);
        CHECK(out.points[0].t == 0.0);
        CHECK(out.points[0].x == 0.0);
        CHECK(out.points[1].t == 0.5);
        CHECK(out.points[1].x == 2.0);
    }
    SUBCASE("idempotent at the target rate") {
        const Track tr = grid_track("a", 0.0, 13, 0.5, 0.0, 0.0, 2.0, 1.0);
        const Track out = resample_track(tr, 2.0);
        REQUIRE(out.points.size() == tr.points.size());
        for (std::size_t i = 0; i < tr.points.size(); ++i) {
            CHECK(out.points[i].t == doctest::Approx(tr.points[i].t).epsilon(1e-12));
            CHECK(out.points[i].x == doctest::Approx(tr.points[i].x).epsilon(1e-12));
            CHECK(out.points[i].y == doctest::Approx(tr.points[i].y).epsilon(1e-12));
        }
    }
    SUBCASE("linear interpolation by hand") {
        Track tr;
        tr.track_id = "a";
        tr.points = {{0.0, 0.0, 0.0}, {1.0, 4.0, 0.0}};
        const Track out = resample_track(tr, 2.0);
        REQUIRE(out.points.size() == 3);
        CHECK(out.points[0].x == doctest::Approx(0.0));
        CHECK(out.points[1].t == doctest::Approx(0.5));
        CHECK(out.points[1].x == doctest::Approx(2.0));
        CHECK(out.points[2].x == doctest::Approx(4.0));
    }
    SUBCASE("track shorter than one step is rejected") {
        Track tr;
        tr.track_id = "a";
        tr.points = {{0.0, 0.0, 0.0}, {0.2, 1.0, 0.0}};
        CHECK_THROWS_AS(resample_track(tr, 2.0), DatasetError);
    }
}

TEST_CASE("extract_windows emits only full 7/6 windows") {
    WindowParams params;
    SUBCASE("13 points -> exactly 1 window") {
        Scene scene;
        scene.tracks = {grid_track("a", 0.0, 13, 0.5, 0.0, 0.0, 2.0, 0.0)};
        const auto windows = extract_windows(scene, params);
        REQUIRE(windows.size() == 1);
        CHECK(windows[0].history.size() == 7);
        CHECK(windows[0].future.size() == 6);
        CHECK(windows[0].t0 == 3.0);
        CHECK(windows[0].history.back().t == windows[0].t0);
    }
    SUBCASE("12 points -> no windows") {
        Scene scene;
        scene.tracks = {grid_track("a", 0.0, 12, 0.5, 0.0, 0.0, 2.0, 0.0)};
        CHECK(extract_windows(scene, params).empty());
    }
    SUBCASE("stride 2 halves the window count") {
        Scene scene;
        scene.tracks = {grid_track("a", 0.0, 20, 0.5, 0.0, 0.0, 2.0, 0.0)};
        params.stride_steps = 1;
        const auto all = extract_windows(scene, params);
        params.stride_steps = 2;
        const auto strided = extract_windows(scene, params);
        CHECK(all.size() == 8);
        CHECK(strided.size() == 4);
        CHECK(strided[1].t0 == all[2].t0);
    }
}

TEST_CASE("parallel tracks see each other as single neighbors at 5 m") {
    Scene scene;
    scene.tracks = {grid_track("a", 0.0, 13, 0.5, 0.0, 0.0, 3.0, 0.0),
                    grid_track("b", 0.0, 13, 0.5, 0.0, 5.0, 3.0, 0.0)};
    const auto windows = extract_windows(scene, {});
    REQUIRE(windows.size() == 2);
    for (const auto& w : windows) {
        REQUIRE(w.neighbor_states.size() == 7);
        for (const auto& step : w.neighbor_states) {
            REQUIRE(step.size() == 1);
            CHECK(std::hypot(step[0].rel_x, step[0].rel_y) ==
                  doctest::Approx(5.0).epsilon(1e-12));
            // co-moving: zero relative velocity
            CHECK(step[0].rel_vx == doctest::Approx(0.0));
            CHECK(step[0].rel_vy == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("neighbor lists match a brute-force search on random scenes") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pos(-40.0, 40.0);
    std::uniform_real_distribution<double> vel(-5.0, 5.0);

    for (int rep = 0; rep < 5; ++rep) {
        Scene scene;
        const int n_tracks = 12;
        const int n_pts = 13;
        const double dt = 0.5;
        for (int k = 0; k < n_tracks; ++k) {
            char id[8];
            std::snprintf(id, sizeof(id), "t%02d", k);
            scene.tracks.push_back(grid_track(id, 0.0, n_pts, dt, pos(rng),
                                              pos(rng), vel(rng), vel(rng)));
        }
        WindowParams params;
        const auto windows = extract_windows(scene, params);
        REQUIRE(windows.size() == static_cast<std::size_t>(n_tracks));

        for (const auto& w : windows) {
            const Track* target = scene.find_track(w.target_track_id);
            for (std::size_t s = 0; s < w.neighbor_states.size(); ++s) {
                const TrackPoint& tp = w.history[s];
                const int i =
                    static_cast<int>(std::llround(tp.t / dt));
                // brute force: every other track, same definition
                struct Cand {
                    double d;
                    std::string id;
                    NeighborState st;
                };
                std::vector<Cand> cands;
                const auto vel_of = [&](const Track& tr, int idx) {
                    const auto& p = tr.points;
                    const int a = (idx == 0) ? 0 : idx - 1;
                    const int b = (idx == 0) ? 1 : idx;
                    return std::pair<double, double>{(p[b].x - p[a].x) / dt,
                                                     (p[b].y - p[a].y) / dt};
                };
                const auto [tvx, tvy] = vel_of(*target, i);
                for (const auto& nb : scene.tracks) {
                    if (nb.track_id == w.target_track_id) continue;
                    const double dx = nb.points[i].x - tp.x;
                    const double dy = nb.points[i].y - tp.y;
                    const double d = std::hypot(dx, dy);
                    if (d > params.neighbor_radius_m) continue;
                    const auto [nvx, nvy] = vel_of(nb, i);
                    cands.push_back(
                        {d, nb.track_id, {dx, dy, nvx - tvx, nvy - tvy}});
                }
                std::sort(cands.begin(), cands.end(),
                          [](const Cand& a, const Cand& b) {
                              if (a.d != b.d) return a.d < b.d;
                              return a.id < b.id;
                          });
                if (static_cast<int>(cands.size()) > params.max_neighbors)
                    cands.resize(params.max_neighbors);

                REQUIRE(w.neighbor_states[s].size() == cands.size());
                for (std::size_t c = 0; c < cands.size(); ++c) {
                    CHECK(w.neighbor_states[s][c].rel_x ==
                          doctest::Approx(cands[c].st.rel_x).epsilon(1e-12));
                    CHECK(w.neighbor_states[s][c].rel_y ==
                          doctest::Approx(cands[c].st.rel_y).epsilon(1e-12));
                    CHECK(w.neighbor_states[s][c].rel_vx ==
                          doctest::Approx(cands[c].st.rel_vx).epsilon(1e-9));
                    CHECK(w.neighbor_states[s][c].rel_vy ==
                          doctest::Approx(cands[c].st.rel_vy).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("split_dataset is deterministic and leak-free") {
    std::vector<PredictionWindow> windows;
    for (int k = 0; k < 10; ++k)
        for (int rep = 0; rep < 3; ++rep) {
            PredictionWindow w;
            w.target_track_id = "tr" + std::to_string(k);
            w.t0 = 3.0 + rep * 0.5;
            windows.push_back(w);
        }

    SUBCASE("10 tracks at ratio 0.2 -> 2 test tracks; rerun identical") {
        const auto s1 = split_dataset(windows, 0.2, 7);
        const auto s2 = split_dataset(windows, 0.2, 7);
        std::set<std::string> test_ids;
        for (const auto& w : s1.test) test_ids.insert(w.target_track_id);
        CHECK(test_ids.size() == 2);
        REQUIRE(s1.test.size() == s2.test.size());
        for (std::size_t i = 0; i < s1.test.size(); ++i) {
            CHECK(s1.test[i].target_track_id == s2.test[i].target_track_id);
            CHECK(s1.test[i].t0 == s2.test[i].t0);
        }
    }
    SUBCASE("no track appears on both sides") {
        const auto split = split_dataset(windows, 0.3, 42);
        std::set<std::string> train_ids, test_ids;
        for (const auto& w : split.train) train_ids.insert(w.target_track_id);
        for (const auto& w : split.test) test_ids.insert(w.target_track_id);
        for (const auto& id : test_ids) CHECK(train_ids.count(id) == 0);
        CHECK(split.train.size() + split.test.size() == windows.size());
    }
    SUBCASE("split depends only on the track-id set") {
        auto shuffled = windows;
        std::mt19937_64 rng(3);
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto a = split_dataset(windows, 0.3, 9);
        const auto b = split_dataset(shuffled, 0.3, 9);
        std::set<std::string> ta, tb;
        for (const auto& w : a.test) ta.insert(w.target_track_id);
        for (const auto& w : b.test) tb.insert(w.target_track_id);
        CHECK(ta == tb);
    }
    SUBCASE("2 tracks at ratio 0.5 -> 1 and 1") {
        std::vector<PredictionWindow> two;
        for (const auto& w : windows)
            if (w.target_track_id == "tr0" || w.target_track_id == "tr1")
                two.push_back(w);
        const auto split = split_dataset(two, 0.5, 1);
        std::set<std::string> train_ids, test_ids;
        for (const auto& w : split.train) train_ids.insert(w.target_track_id);
        for (const auto& w : split.test) test_ids.insert(w.target_track_id);
        CHECK(train_ids.size() == 1);
        CHECK(test_ids.size() == 1);
    }
    SUBCASE("fewer than 2 tracks is rejected") {
        std::vector<PredictionWindow> one(windows.begin(), windows.begin() + 3);
        CHECK_THROWS_AS(split_dataset(one, 0.5, 1), DatasetError);
    }
}
