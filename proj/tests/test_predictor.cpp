#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "traj/dataset/dataset.hpp"
#include "traj/predictor/model.hpp"
#include "traj/synthgen/generator.hpp"

using namespace traj;

namespace {

constexpr double kDt = 0.5;

PredictionWindow window_from_points(const std::vector<TrackPoint>& pts) {
    REQUIRE(pts.size() == 13);
    PredictionWindow w;
    w.target_track_id = "target";
    w.history.assign(pts.begin(), pts.begin() + 7);
    w.future.assign(pts.begin() + 7, pts.end());
    w.t0 = w.history.back().t;
    w.neighbor_states.resize(7);
    return w;
}

PredictionWindow cv_window(double vx, double vy, double x0 = 0.0,
                           double y0 = 0.0) {
    std::vector<TrackPoint> pts;
    for (int i = 0; i < 13; ++i)
        pts.push_back({i * kDt, x0 + vx * i * kDt, y0 + vy * i * kDt});
    return window_from_points(pts);
}

PredictionWindow shifted(const PredictionWindow& w, double dx, double dy) {
    PredictionWindow out = w;
    for (auto& p : out.history) {
        p.x += dx;
        p.y += dy;
    }
    for (auto& p : out.future) {
        p.x += dx;
        p.y += dy;
    }
    return out;
}

std::vector<PredictionWindow> noiseless_corpus() {
    GeneratorConfig config;
    config.seed = 5;
    config.n_tracks = 8;
    config.accel_noise_std = 0.0;
    config.heading_noise_std = 0.0;
    config.behavior_mix = {{Behavior::straight, 1.0}};
    config.agent_mix = {{AgentType::small_vehicle, 1.0}};
    const Scene scene = resample_scene(generate_scene(config), 2.0);
    return extract_windows(scene, {});
}

bool params_equal(const ModelParams& a, const ModelParams& b) {
    if (a.hidden != b.hidden || a.tensors.size() != b.tensors.size())
        return false;
    for (std::size_t i = 0; i < a.tensors.size(); ++i)
        if (a.tensors[i].v != b.tensors[i].v) return false;
    return true;
}

}  // namespace

TEST_CASE("constant-velocity baseline extrapolates the last step") {
    SUBCASE("uniform motion is reproduced exactly") {
        const auto w = cv_window(3.0, -1.0, 10.0, 20.0);
        const auto pred = cv_predict(w);
        REQUIRE(pred.positions.size() == w.future.size());
        for (std::size_t s = 0; s < pred.positions.size(); ++s) {
            CHECK(pred.positions[s][0] ==
                  doctest::Approx(w.future[s].x).epsilon(1e-12));
            CHECK(pred.positions[s][1] ==
                  doctest::Approx(w.future[s].y).epsilon(1e-12));
        }
    }
    SUBCASE("stationary history predicts no motion") {
        std::vector<TrackPoint> pts;
        for (int i = 0; i < 13; ++i) pts.push_back({i * kDt, 4.0, -2.0});
        const auto pred = cv_predict(window_from_points(pts));
        for (const auto& p : pred.positions) {
            CHECK(p[0] == doctest::Approx(4.0));
            CHECK(p[1] == doctest::Approx(-2.0));
        }
    }
    SUBCASE("only the last history step matters") {
        // turn mid-history; extrapolation follows the final displacement
        std::vector<TrackPoint> pts;
        double x = 0.0, y = 0.0;
        for (int i = 0; i < 13; ++i) {
            pts.push_back({i * kDt, x, y});
            if (i < 4)
                x += 1.0;
            else
                y += 2.0;
        }
        const auto pred = cv_predict(window_from_points(pts));
        CHECK(pred.positions[0][0] == doctest::Approx(pts[6].x));
        CHECK(pred.positions[0][1] == doctest::Approx(pts[6].y + 2.0));
        CHECK(pred.positions[5][1] == doctest::Approx(pts[6].y + 12.0));
    }
}

TEST_CASE("initialization is deterministic and bounded") {
    const auto a = init_model(7, 16);
    const auto b = init_model(7, 16);
    CHECK(params_equal(a, b));
    const auto c = init_model(8, 16);
    CHECK(!params_equal(a, c));

    bool any_nonzero = false;
    for (int id = 0; id < kTensorCount; ++id) {
        const auto& t = a.tensors[id];
        const bool is_weight = a.weight_tensor(id);
        const double bound =
            is_weight ? 1.0 / std::sqrt(static_cast<double>(t.cols)) : 0.0;
        for (double v : t.v) {
            if (is_weight) {
                CHECK(std::abs(v) <= bound + 1e-12);
                if (v != 0.0) any_nonzero = true;
            } else {
                CHECK(v == 0.0);
            }
        }
    }
    CHECK(any_nonzero);
}

TEST_CASE("zero parameters give a stationary fixed point") {
    const auto params = make_params(12);
    const auto w = cv_window(5.0, 2.0);
    const auto pred = forward(params, w);
    const auto& last = w.history.back();
    for (const auto& p : pred.positions) {
        CHECK(p[0] == last.x);
        CHECK(p[1] == last.y);
    }
}

TEST_CASE("forward pass is deterministic and translation equivariant") {
    const auto params = init_model(3, 16);
    GeneratorConfig config;
    config.seed = 11;
    config.n_tracks = 6;
    config.accel_noise_std = 0.3;
    const Scene scene = resample_scene(generate_scene(config), 2.0);
    const auto windows = extract_windows(scene, {});
    REQUIRE(!windows.empty());

    for (std::size_t i = 0; i < std::min<std::size_t>(windows.size(), 10); ++i) {
        const auto a = forward(params, windows[i]);
        const auto b = forward(params, windows[i]);
        REQUIRE(a.positions.size() == b.positions.size());
        for (std::size_t s = 0; s < a.positions.size(); ++s) {
            CHECK(a.positions[s][0] == b.positions[s][0]);
            CHECK(a.positions[s][1] == b.positions[s][1]);
        }
        // increments depend on relative geometry only
        const auto moved = forward(params, shifted(windows[i], 120.0, -55.0));
        for (std::size_t s = 0; s < a.positions.size(); ++s) {
            CHECK(moved.positions[s][0] ==
                  doctest::Approx(a.positions[s][0] + 120.0).epsilon(1e-12));
            CHECK(moved.positions[s][1] ==
                  doctest::Approx(a.positions[s][1] - 55.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("dropout forward draws different masks per seed") {
    auto params = init_model(2, 16);
    params.dropout_rate = 0.5;
    const auto w = cv_window(4.0, 1.0);

    const auto base = forward(params, w, true, 100);
    const auto same = forward(params, w, true, 100);
    for (std::size_t s = 0; s < base.positions.size(); ++s) {
        CHECK(base.positions[s][0] == same.positions[s][0]);
        CHECK(base.positions[s][1] == same.positions[s][1]);
    }

    std::set<std::pair<double, double>> finals;
    for (long seed = 0; seed < 10; ++seed) {
        const auto p = forward(params, w, true, seed);
        finals.insert({p.positions.back()[0], p.positions.back()[1]});
    }
    CHECK(finals.size() >= 9);

    // dropout off ignores the seed
    const auto off_a = forward(params, w, false, 1);
    const auto off_b = forward(params, w, false, 2);
    CHECK(off_a.positions.back()[0] == off_b.positions.back()[0]);
}

TEST_CASE("loss matches the squared-error definition") {
    TrainingConfig config;
    config.hidden = 12;
    const auto params = make_params(config.hidden);
    const auto w = cv_window(2.0, 0.0);

    // zero params predict the frozen last history point
    const auto lg = loss_and_gradients(params, {w}, config);
    double expect = 0.0;
    const auto& last = w.history.back();
    for (const auto& f : w.future) {
        const double dx = f.x - last.x;
        const double dy = f.y - last.y;
        expect += dx * dx + dy * dy;
    }
    expect /= static_cast<double>(w.future.size());
    CHECK(lg.loss == doctest::Approx(expect).epsilon(1e-12));

    SUBCASE("perfect prediction of a stationary target has zero loss") {
        std::vector<TrackPoint> pts;
        for (int i = 0; i < 13; ++i) pts.push_back({i * kDt, 1.0, 2.0});
        const auto still = window_from_points(pts);
        const auto zl = loss_and_gradients(params, {still}, config);
        CHECK(zl.loss == doctest::Approx(0.0));
        for (const auto& t : zl.gradients.tensors)
            for (double g : t.v) CHECK(g == doctest::Approx(0.0));
    }

    SUBCASE("l2 term adds the coefficient times the squared weight norm") {
        const auto model = init_model(9, config.hidden);
        TrainingConfig reg = config;
        reg.l2_coefficient = 0.01;
        const double base = loss_and_gradients(model, {w}, config).loss;
        const double with_l2 = loss_and_gradients(model, {w}, reg).loss;
        double norm2 = 0.0;
        for (int id = 0; id < kTensorCount; ++id)
            if (model.weight_tensor(id))
                for (double v : model.tensors[id].v) norm2 += v * v;
        CHECK(with_l2 - base == doctest::Approx(0.01 * norm2).epsilon(1e-9));
    }
}

TEST_CASE("analytic gradients agree with finite differences") {
    const auto report = grad_check(8, 1, 1e-4, 120);
    CHECK(report.pass);
    CHECK(report.n_checked >= 100);
    CHECK(report.max_rel_error < 1e-4);

    SUBCASE("a corrupted analytic entry is caught") {
        const auto bad = grad_check(8, 1, 1e-4, 120, 7);
        CHECK(!bad.pass);
    }
    SUBCASE("an unachievable tolerance fails") {
        const auto strict = grad_check(8, 1, 1e-14, 120);
        CHECK(!strict.pass);
    }
}

TEST_CASE("training beats the constant-velocity baseline on curved tracks") {
    GeneratorConfig config;
    config.seed = 17;
    config.n_tracks = 8;
    config.accel_noise_std = 0.0;
    config.heading_noise_std = 0.0;
    config.behavior_mix = {{Behavior::left, 0.5}, {Behavior::right, 0.5}};
    config.agent_mix = {{AgentType::small_vehicle, 1.0}};
    const Scene scene = resample_scene(generate_scene(config), 2.0);
    const auto windows = extract_windows(scene, {});
    REQUIRE(windows.size() > 30);

    TrainingConfig tc;
    tc.hidden = 24;
    tc.epochs = 60;
    tc.batch_size = 32;
    tc.learning_rate = 3e-3;
    tc.seed = 1;
    const auto result = train(windows, tc);
    REQUIRE(result.epoch_losses.size() == 60);
    CHECK(result.epoch_losses.back() < result.epoch_losses.front());

    double model_err = 0.0, cv_err = 0.0;
    for (const auto& w : windows) {
        const auto mp = forward(result.params, w);
        const auto cp = cv_predict(w);
        for (std::size_t s = 0; s < w.future.size(); ++s) {
            model_err += std::hypot(mp.positions[s][0] - w.future[s].x,
                                    mp.positions[s][1] - w.future[s].y);
            cv_err += std::hypot(cp.positions[s][0] - w.future[s].x,
                                 cp.positions[s][1] - w.future[s].y);
        }
    }
    CHECK(model_err < cv_err);
}

TEST_CASE("training is deterministic in the seed") {
    const auto windows = noiseless_corpus();
    REQUIRE(!windows.empty());
    TrainingConfig tc;
    tc.hidden = 8;
    tc.epochs = 3;
    tc.seed = 9;
    const auto a = train(windows, tc);
    const auto b = train(windows, tc);
    CHECK(params_equal(a.params, b.params));
    CHECK(a.epoch_losses == b.epoch_losses);
    tc.seed = 10;
    const auto c = train(windows, tc);
    CHECK(!params_equal(a.params, c.params));
}

TEST_CASE("training config is validated") {
    const auto windows = noiseless_corpus();
    TrainingConfig tc;
    tc.epochs = 0;
    CHECK_THROWS(train(windows, tc));
    tc.epochs = 1;
    tc.batch_size = 0;
    CHECK_THROWS(train(windows, tc));
    tc.batch_size = 16;
    tc.learning_rate = -1.0;
    CHECK_THROWS(train(windows, tc));
    CHECK_THROWS(train({}, TrainingConfig{}));
}

TEST_CASE("checkpoints round-trip exactly") {
    auto params = init_model(13, 16, 0.5);
    const auto path =
        (std::filesystem::temp_directory_path() / "ckpt_test.json").string();
    save_checkpoint(params, path);
    const auto back = load_checkpoint(path);
    CHECK(back.hidden == params.hidden);
    CHECK(back.dropout_rate == params.dropout_rate);
    CHECK(params_equal(params, back));

    const auto w = cv_window(3.0, 2.0);
    const auto a = forward(params, w);
    const auto b = forward(back, w);
    CHECK(a.positions.back()[0] == b.positions.back()[0]);
    CHECK(a.positions.back()[1] == b.positions.back()[1]);
}
