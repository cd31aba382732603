#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ats/dist.hpp"
#include "ats/moments.hpp"
#include "ats/sim.hpp"

using namespace ats;

namespace {

double ts_increment_mean(const AtsParams& p, double dt) {
    return p.a * dt * std::tgamma(1.0 - p.c) * std::pow(p.b, p.c - 1.0);
}

double ts_increment_var(const AtsParams& p, double dt) {
    return p.a * dt * std::tgamma(2.0 - p.c) * std::pow(p.b, p.c - 2.0);
}

void check_increment_moments(const AtsParams& p, double dt, std::uint64_t seed) {
    Rng rng(seed);
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_ts_increment(p, dt, rng);
        REQUIRE(x > 0.0);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const double m = ts_increment_mean(p, dt);
    const double v = ts_increment_var(p, dt);
    const double k4 = p.a * dt * std::tgamma(4.0 - p.c) * std::pow(p.b, p.c - 4.0);
    CHECK(std::abs(mean - m) < 4.0 * std::sqrt(v / n));
    CHECK(std::abs(var - v) < 4.0 * std::sqrt((k4 + 2.0 * v * v) / n));
}

}  // namespace

TEST_CASE("uniform grid construction and validation") {
    const PathGrid g = PathGrid::uniform(4, 2.0);
    REQUIRE(g.times.size() == 5);
    CHECK(g.times.front() == 0.0);
    CHECK(g.times.back() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g.times[2] == doctest::Approx(1.0).epsilon(1e-15));
    g.validate();
    CHECK_THROWS_AS(PathGrid::uniform(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PathGrid::uniform(5, -1.0), std::invalid_argument);
    PathGrid bad = g;
    bad.times[3] = bad.times[1];
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.times.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("jump-size bin edges") {
    CpaConfig cfg;
    cfg.n_bins = 10;
    cfg.x_min = 0.5;
    cfg.x_max = 2.0;
    cfg.spacing = BinSpacing::Uniform;
    auto e = cfg.edges();
    REQUIRE(e.size() == 11);
    CHECK(e.front() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.back() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(e[4] - e[3] == doctest::Approx(0.15).epsilon(1e-12));

    cfg.spacing = BinSpacing::Log;
    e = cfg.edges();
    CHECK(e.front() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.back() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(e[5] / e[4] == doctest::Approx(std::pow(4.0, 0.1)).epsilon(1e-12));

    cfg.x_min = 2.0;
    cfg.x_max = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.x_min = 0.5;
    cfg.x_max = 2.0;
    cfg.n_bins = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("subordinator increments match the first two moments") {
    check_increment_moments(AtsParams{1.2, 0.9, 0.0, 1.0}, 0.25, 101);
    check_increment_moments(AtsParams{1.0, 1.0, 0.5, 1.0}, 0.25, 202);
    check_increment_moments(AtsParams{0.8, 1.4, 0.25, 1.0}, 0.25, 303);
}

TEST_CASE("euler paths satisfy the discrete averaging identity") {
    const AtsParams p{1.0, 1.0, 0.5, 1.0};
    const PathGrid grid = PathGrid::uniform(16, 1.0);
    const EulerPaths ep = euler_paths(p, grid, 5, 42);
    REQUIRE(ep.paths_x.size() == 5);
    REQUIRE(ep.paths_avg.size() == 5);
    for (int j = 0; j < 5; ++j) {
        const auto& x = ep.paths_x[j].values;
        const auto& avg = ep.paths_avg[j].values;
        REQUIRE(x.size() == grid.times.size());
        CHECK(x[0] == 0.0);
        CHECK(avg[0] == 0.0);
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            CHECK(x[i + 1] >= x[i]);
            const double dt = grid.times[i + 1] - grid.times[i];
            const double lhs = avg[i + 1] * grid.times[i + 1] - avg[i] * grid.times[i];
            CHECK(lhs == doctest::Approx(x[i + 1] * dt).epsilon(1e-12));
        }
    }
}

TEST_CASE("seeded batches are reproducible and prefix-stable") {
    const AtsParams p{1.0, 1.0, 0.5, 1.0};
    const PathGrid grid = PathGrid::uniform(8, 1.0);
    const EulerPaths a = euler_paths(p, grid, 6, 9001);
    const EulerPaths b = euler_paths(p, grid, 6, 9001);
    const EulerPaths c = euler_paths(p, grid, 3, 9001);
    const EulerPaths d = euler_paths(p, grid, 6, 9002);
    for (int j = 0; j < 6; ++j)
        CHECK(a.paths_x[j].values == b.paths_x[j].values);
    for (int j = 0; j < 3; ++j)
        CHECK(a.paths_x[j].values == c.paths_x[j].values);
    CHECK(a.paths_x[0].values != d.paths_x[0].values);
}

TEST_CASE("euler terminal law improves or holds under grid refinement") {
    const AtsParams p{1.46874, 0.682686, 0.5, 1.0};
    const auto law = [&](double x) { return cdf(p, x); };
    for (std::uint64_t seed : {11u, 22u, 33u}) {
        auto terminal = [&](int n_steps) {
            const EulerPaths ep =
                euler_paths(p, PathGrid::uniform(n_steps, 1.0), 500, seed);
            std::vector<double> s;
            s.reserve(ep.paths_avg.size());
            for (const auto& path : ep.paths_avg) s.push_back(path.values.back());
            return ks_distance(std::move(s), law);
        };
        const double ks_coarse = terminal(50);
        const double ks_fine = terminal(100);
        CHECK(ks_fine <= ks_coarse + 0.03);
        CHECK(ks_fine < 0.10);
    }
}

TEST_CASE("compound-Poisson terminal mean") {
    const AtsParams p{1.0, 1.0, 0.5, 1.0};
    const PathGrid grid = PathGrid::uniform(50, 1.0);
    const CpaConfig cfg;
    const int n_paths = 4000;
    const auto paths = cpa_lambda_paths(p, grid, cfg, n_paths, 777);
    REQUIRE(static_cast<int>(paths.size()) == n_paths);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& path : paths) {
        CHECK(path.values.front() == 0.0);
        sum += path.values.back();
        sum2 += path.values.back() * path.values.back();
    }
    const double mean = sum / n_paths;
    const double var = sum2 / n_paths - mean * mean;
    CHECK(std::abs(mean - cumulant(p, 1)) < 4.0 * std::sqrt(var / n_paths));
}

TEST_CASE("compound-Poisson terminal law matches the running-average law") {
    const AtsParams p{1.46874, 0.682686, 0.5, 1.0};
    const PathGrid grid = PathGrid::uniform(50, 1.0);
    const CpaConfig cfg;
    const auto paths = cpa_lambda_paths(p, grid, cfg, 1000, 515151);
    std::vector<double> s;
    s.reserve(paths.size());
    for (const auto& path : paths) s.push_back(path.values.back());
    const double ks = ks_distance(std::move(s), [&](double x) { return cdf(p, x); });
    CHECK(ks < 0.06);
}

TEST_CASE("Kolmogorov-Smirnov distance by hand") {
    const double ks =
        ks_distance({0.25, 0.75}, [](double x) { return std::clamp(x, 0.0, 1.0); });
    CHECK(ks == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(ks_distance({}, [](double) { return 0.0; }), std::invalid_argument);
}

TEST_CASE("gaussian mixture paths") {
    MixtureParams mp;
    mp.base = AtsParams{1.46874, 0.682686, 0.5, 1.0};
    mp.mu = -0.594359;
    mp.sigma = 0.635236;
    mp.kappa = 0.1;
    const PathGrid grid = PathGrid::uniform(40, 1.0);
    const CpaConfig cfg;
    const int n_paths = 4000;
    const auto paths = mixture_paths(mp, grid, cfg, n_paths, 2024);
    REQUIRE(static_cast<int>(paths.size()) == n_paths);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& path : paths) {
        CHECK(path.values.front() == 0.0);
        sum += path.values.back();
        sum2 += path.values.back() * path.values.back();
    }
    const double mean = sum / n_paths;
    const double var = sum2 / n_paths - mean * mean;
    const double expect = mp.kappa * 1.0 + mp.mu * cumulant(mp.base, 1);
    CHECK(std::abs(mean - expect) < 4.0 * std::sqrt(var / n_paths));
}

TEST_CASE("path serialization") {
    const AtsParams p{1.0, 1.0, 0.0, 1.0};
    const PathGrid grid = PathGrid::uniform(2, 1.0);
    const EulerPaths ep = euler_paths(p, grid, 2, 5);
    std::ostringstream csv;
    paths_to_csv(csv, ep.paths_x);
    const std::string text = csv.str();
    CHECK(text.rfind("time,path_1,path_2", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    std::ostringstream js;
    paths_to_json(js, ep.paths_x);
    CHECK(js.str().find("\"times\"") != std::string::npos);
}
