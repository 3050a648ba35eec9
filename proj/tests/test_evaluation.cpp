#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "traj/eval/evaluation.hpp"

using namespace traj;

namespace {

Positions points(std::initializer_list<std::array<double, 2>> ps) {
    return Positions(ps);
}

// every subset of size k, minimum achievable retained sum
double best_retained_sum(const std::vector<double>& errors, std::size_t k) {
    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    return std::accumulate(sorted.begin(), sorted.begin() + k, 0.0);
}

}  // namespace

TEST_CASE("displacement errors on hand cases") {
    SUBCASE("3-4-5 offsets average to 2.5") {
        const auto pred = points({{3.0, 4.0}, {0.0, 0.0}});
        const auto truth = points({{0.0, 0.0}, {0.0, 0.0}});
        CHECK(ade(pred, truth) == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(fde(pred, truth) == doctest::Approx(0.0));
    }
    SUBCASE("fde only reads the final step") {
        const auto pred = points({{100.0, 100.0}, {3.0, 4.0}});
        const auto truth = points({{0.0, 0.0}, {0.0, 0.0}});
        CHECK(fde(pred, truth) == doctest::Approx(5.0).epsilon(1e-12));
    }
    SUBCASE("perfect prediction scores zero") {
        const auto p = points({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
        CHECK(ade(p, p) == 0.0);
        CHECK(fde(p, p) == 0.0);
    }
    SUBCASE("mismatched or empty inputs throw") {
        const auto a = points({{0.0, 0.0}});
        const auto b = points({{0.0, 0.0}, {1.0, 1.0}});
        CHECK_THROWS_AS(ade(a, b), std::invalid_argument);
        CHECK_THROWS_AS(fde(a, b), std::invalid_argument);
        CHECK_THROWS_AS(ade({}, {}), std::invalid_argument);
    }
}

TEST_CASE("retention curve on a four-window example") {
    const std::vector<double> errors = {1.0, 2.0, 3.0, 4.0};

    SUBCASE("uncertainty order follows the uncertainty key") {
        // most uncertain first in the key => retained last
        const std::vector<double> unc = {0.4, 0.3, 0.2, 0.1};
        const auto curve =
            retention_curve(errors, unc, RetentionMode::uncertainty);
        REQUIRE(curve.fractions.size() == 5);
        CHECK(curve.values[0] == 0.0);
        CHECK(curve.values[1] == doctest::Approx(4.0 / 4.0));
        CHECK(curve.values[2] == doctest::Approx(7.0 / 4.0));
        CHECK(curve.values[4] == doctest::Approx(10.0 / 4.0));
    }
    SUBCASE("optimal order retains the smallest errors first") {
        const auto curve = retention_curve(errors, {}, RetentionMode::optimal);
        CHECK(curve.values[1] == doctest::Approx(1.0 / 4.0));
        CHECK(curve.values[2] == doctest::Approx(3.0 / 4.0));
        CHECK(curve.values[3] == doctest::Approx(6.0 / 4.0));
    }
    SUBCASE("random mode is the analytic expectation") {
        const auto curve = retention_curve(errors, {}, RetentionMode::random);
        const double mean = 2.5;
        for (std::size_t k = 0; k < curve.fractions.size(); ++k)
            CHECK(curve.values[k] ==
                  doctest::Approx(curve.fractions[k] * mean).epsilon(1e-12));
    }
    SUBCASE("curve boundaries") {
        for (auto mode : {RetentionMode::uncertainty, RetentionMode::optimal,
                          RetentionMode::random}) {
            const auto curve =
                retention_curve(errors, {1.0, 2.0, 3.0, 4.0}, mode);
            CHECK(std::abs(curve.values.front()) <= 1e-12);
            CHECK(std::abs(curve.values.back() - 2.5) <= 1e-12);
            CHECK(curve.fractions.front() == 0.0);
            CHECK(curve.fractions.back() == 1.0);
        }
    }
    SUBCASE("ties break by ascending window index") {
        const std::vector<double> tied_unc = {0.5, 0.5, 0.5, 0.5};
        const auto curve =
            retention_curve(errors, tied_unc, RetentionMode::uncertainty);
        CHECK(curve.values[1] == doctest::Approx(1.0 / 4.0));
        CHECK(curve.values[2] == doctest::Approx(3.0 / 4.0));
    }
    SUBCASE("bad inputs throw") {
        CHECK_THROWS(retention_curve({}, {}, RetentionMode::random));
        CHECK_THROWS(
            retention_curve(errors, {1.0}, RetentionMode::uncertainty));
    }
}

TEST_CASE("optimal curve is pointwise minimal over all subsets") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> err(0.0, 10.0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rep % 5;  // up to 6
        std::vector<double> errors(n);
        for (auto& e : errors) e = err(rng);
        const auto curve = retention_curve(errors, {}, RetentionMode::optimal);
        for (std::size_t k = 1; k <= n; ++k)
            CHECK(curve.values[k] ==
                  doctest::Approx(best_retained_sum(errors, k) /
                                  static_cast<double>(n))
                      .epsilon(1e-12));
        // any other ordering retains at least as much error at each k
        std::vector<double> unc(n);
        for (auto& u : unc) u = err(rng);
        const auto other =
            retention_curve(errors, unc, RetentionMode::uncertainty);
        for (std::size_t k = 0; k <= n; ++k)
            CHECK(other.values[k] >= curve.values[k] - 1e-12);
    }
}

TEST_CASE("auc identities") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> err(0.0, 5.0);
    std::vector<double> errors(40);
    for (auto& e : errors) e = err(rng);
    const double mean =
        std::accumulate(errors.begin(), errors.end(), 0.0) / 40.0;

    SUBCASE("random auc is mean / 2") {
        const auto curve = retention_curve(errors, {}, RetentionMode::random);
        CHECK(retention_auc(curve) == doctest::Approx(mean / 2.0).epsilon(1e-12));
    }
    SUBCASE("optimal auc <= any uncertainty auc <= reverse-optimal") {
        std::vector<double> unc(40);
        for (auto& u : unc) u = err(rng);
        const double a_opt =
            retention_auc(retention_curve(errors, {}, RetentionMode::optimal));
        const double a_unc = retention_auc(
            retention_curve(errors, unc, RetentionMode::uncertainty));
        std::vector<double> anti(errors.size());
        for (std::size_t i = 0; i < anti.size(); ++i) anti[i] = -errors[i];
        const double a_worst = retention_auc(
            retention_curve(errors, anti, RetentionMode::uncertainty));
        CHECK(a_opt <= a_unc + 1e-12);
        CHECK(a_unc <= a_worst + 1e-12);
    }
    SUBCASE("auc is invariant to monotone transforms of the uncertainty") {
        std::vector<double> unc(40);
        for (auto& u : unc) u = err(rng) + 0.1;
        const auto base =
            retention_curve(errors, unc, RetentionMode::uncertainty);
        std::vector<double> mapped(unc.size());
        for (std::size_t i = 0; i < unc.size(); ++i)
            mapped[i] = std::log(unc[i]) * 3.0 + 7.0;
        const auto same =
            retention_curve(errors, mapped, RetentionMode::uncertainty);
        CHECK(retention_auc(base) ==
              doctest::Approx(retention_auc(same)).epsilon(1e-12));
    }
}

TEST_CASE("retention scores") {
    const std::vector<double> errors = {1.0, 2.0, 3.0, 4.0, 5.0};

    SUBCASE("uncertainty co-ordered with error scores exactly 1") {
        const auto unc = retention_curve(errors, errors,
                                         RetentionMode::uncertainty);
        const auto opt = retention_curve(errors, {}, RetentionMode::optimal);
        const auto rnd = retention_curve(errors, {}, RetentionMode::random);
        const auto scores = retention_scores(unc, opt, rnd);
        REQUIRE(scores.size() == 6);
        // endpoints have zero denominator -> defined as 0
        CHECK(scores.front() == 0.0);
        CHECK(scores.back() == 0.0);
        for (std::size_t i = 1; i + 1 < scores.size(); ++i)
            CHECK(scores[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("random uncertainty scores near zero on average") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> err(0.0, 4.0);
        std::vector<double> big(200);
        for (auto& e : big) e = err(rng);
        const auto opt = retention_curve(big, {}, RetentionMode::optimal);
        const auto rnd = retention_curve(big, {}, RetentionMode::random);
        double mean_score = 0.0;
        int count = 0;
        for (int rep = 0; rep < 30; ++rep) {
            std::vector<double> unc(big.size());
            for (auto& u : unc) u = err(rng);
            const auto curve =
                retention_curve(big, unc, RetentionMode::uncertainty);
            for (double s : retention_scores(curve, opt, rnd)) {
                mean_score += s;
                ++count;
            }
        }
        CHECK(std::abs(mean_score / count) < 0.2);
    }
    SUBCASE("mismatched grids throw") {
        const auto a = retention_curve(errors, {}, RetentionMode::optimal);
        const auto b =
            retention_curve({1.0, 2.0}, {}, RetentionMode::random);
        CHECK_THROWS_AS(retention_scores(a, a, b), std::invalid_argument);
    }
}
