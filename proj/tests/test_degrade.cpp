#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ats/degrade.hpp"
#include "ats/dist.hpp"
#include "ats/moments.hpp"
#include "ats/sim.hpp"

using namespace ats;

namespace {
constexpr double kPi = 3.14159265358979323846;

double trigamma(double x) {
    double acc = 0.0;
    while (x < 8.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return acc + inv +
           inv2 * (0.5 + inv * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 / 42.0)));
}

struct FisherSe {
    double se_a = 0.0;
    double se_b = 0.0;
};

FisherSe gamma_fisher_se(double a, double b, const std::vector<double>& dts) {
    double iaa = 0.0, iab = 0.0, ibb = 0.0;
    for (double dt : dts) {
        iaa += dt * dt * trigamma(a * dt);
        iab += -dt / b;
        ibb += a * dt / (b * b);
    }
    const double det = iaa * ibb - iab * iab;
    return {std::sqrt(ibb / det), std::sqrt(iaa / det)};
}

FisherSe ig_fisher_se(double a, double b, const std::vector<double>& dts) {
    double iaa = 0.0, iab = 0.0, ibb = 0.0;
    for (double dt : dts) {
        const double shape = a * dt;
        const double mu = shape * std::sqrt(kPi / b);
        const double lam = 2.0 * kPi * shape * shape;
        const double e_inv = 1.0 / mu + 1.0 / lam;
        iaa += 1.0 / (a * a) + 2.0 * kPi * dt * dt * e_inv;
        iab += -dt * std::sqrt(kPi / b);
        ibb += shape * std::sqrt(kPi) / (2.0 * std::pow(b, 1.5));
    }
    const double det = iaa * ibb - iab * iab;
    return {std::sqrt(ibb / det), std::sqrt(iaa / det)};
}

}  // namespace

TEST_CASE("degradation csv parsing") {
    std::istringstream in(
        "unit_id,time,reading,temperature\n"
        "u1,0.5,0.30,85C\n"
        "u1,1.0,0.52,85C\n"
        "u2,0,0,40C\n"
        "u2,0.4,0.11,40C\n");
    const auto data = parse_degradation_csv(in);
    REQUIRE(data.size() == 2);
    CHECK(data[0].unit_id == "u1");
    REQUIRE(data[0].times.size() == 3);
    CHECK(data[0].times[0] == 0.0);
    CHECK(data[0].readings[0] == 0.0);
    CHECK(data[0].times[1] == doctest::Approx(0.5));
    CHECK(data[0].readings[2] == doctest::Approx(0.52));
    CHECK(data[0].temperature_label == "85C");
    CHECK(data[1].unit_id == "u2");
    REQUIRE(data[1].times.size() == 2);
    CHECK(data[1].readings[1] == doctest::Approx(0.11));
}

TEST_CASE("degradation csv rejects malformed rows with line numbers") {
    {
        std::istringstream in("unit_id,time,reading\nu1,0.5\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(parse_degradation_csv(in)),
                             doctest::Contains("line 2"), std::runtime_error);
    }
    {
        std::istringstream in("unit_id,time,reading\nu1,abc,0.3\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(parse_degradation_csv(in)),
                             doctest::Contains("line 2"), std::runtime_error);
    }
    {
        std::istringstream in("bad,header,row\nu1,0.5,0.3\n");
        CHECK_THROWS_AS(static_cast<void>(parse_degradation_csv(in)),
                        std::runtime_error);
    }
    {
        std::istringstream in("unit_id,time,reading\nu1,0,0.4\n");
        CHECK_THROWS_AS(static_cast<void>(parse_degradation_csv(in)),
                        std::exception);
    }
    {
        std::istringstream in("unit_id,time,reading\nu1,0.5,0.3\nu1,0.4,0.5\n");
        CHECK_THROWS_AS(static_cast<void>(parse_degradation_csv(in)),
                        std::exception);
    }
}

TEST_CASE("model names round trip") {
    CHECK(model_name(DegradeModel::GammaIncrements) == "gamma");
    CHECK(model_name(DegradeModel::AvgGamma) == "ag");
    CHECK(model_name(DegradeModel::AvgIg) == "aig");
    CHECK(model_from_name("gamma") == DegradeModel::GammaIncrements);
    CHECK(model_from_name("ag") == DegradeModel::AvgGamma);
    CHECK(model_from_name("aig") == DegradeModel::AvgIg);
    CHECK_THROWS_AS(static_cast<void>(model_from_name("weibull")), std::exception);
}

TEST_CASE("de-averaging transform by hand") {
    DegradationSeries s;
    s.unit_id = "u";
    s.times = {0.0, 1.0, 2.0, 4.0};
    s.readings = {0.0, 0.6, 0.8, 0.95};
    const TransformResult tr = transform_series(s);
    CHECK(tr.first_average == doctest::Approx(0.6));
    REQUIRE(tr.increments.size() == 2);
    REQUIRE(tr.dts.size() == 2);
    CHECK(tr.dts[0] == doctest::Approx(1.0));
    CHECK(tr.dts[1] == doctest::Approx(2.0));
    const double w1 = (1.0 * 0.6 - 0.0) / 1.0;
    const double w2 = (2.0 * 0.8 - 1.0 * 0.6) / 1.0;
    const double w3 = (4.0 * 0.95 - 2.0 * 0.8) / 2.0;
    CHECK(tr.increments[0] == doctest::Approx(w2 - w1));
    CHECK(tr.increments[1] == doctest::Approx(w3 - w2));
    CHECK(tr.usable);

    s.readings = {0.0, 0.6, 0.8, 0.9};
    const TransformResult flat = transform_series(s);
    CHECK_FALSE(flat.usable);

    s.readings = {0.0, 0.6, 0.25, 0.9};
    const TransformResult bad = transform_series(s);
    CHECK_FALSE(bad.usable);
}

TEST_CASE("gamma-increment likelihood recovers the truth within three standard errors") {
    const double a = 5.0, b = 7.0;
    const int m = 200;
    std::mt19937_64 rng(31415);
    std::vector<double> dts, xs;
    std::uniform_real_distribution<double> u(0.05, 0.4);
    for (int i = 0; i < m; ++i) dts.push_back(u(rng));
    for (double dt : dts) {
        std::gamma_distribution<double> g(a * dt, 1.0 / b);
        xs.push_back(g(rng));
    }
    const FitResult fit = fit_mle(xs, dts, DegradeModel::GammaIncrements);
    CHECK(fit.usable);
    CHECK(fit.aic == doctest::Approx(4.0 - 2.0 * fit.log_likelihood).epsilon(1e-12));
    const FisherSe se = gamma_fisher_se(a, b, dts);
    CHECK(std::abs(fit.a_hat - a) < 3.0 * se.se_a);
    CHECK(std::abs(fit.b_hat - b) < 3.0 * se.se_b);
}

TEST_CASE("inverse-Gaussian likelihood recovers the truth within three standard errors") {
    const double a = 2.0, b = 3.0;
    const int m = 400;
    const AtsParams p{a, b, 0.5, 1.0};
    Rng rng(2718);
    std::vector<double> dts, xs;
    for (int i = 0; i < m; ++i) dts.push_back(0.2 + 0.1 * (i % 3));
    for (double dt : dts) xs.push_back(sample_ts_increment(p, dt, rng));
    const FitResult fit = fit_mle(xs, dts, DegradeModel::AvgIg);
    CHECK(fit.usable);
    const FisherSe se = ig_fisher_se(a, b, dts);
    CHECK(std::abs(fit.a_hat - a) < 3.0 * se.se_a);
    CHECK(std::abs(fit.b_hat - b) < 3.0 * se.se_b);
}

TEST_CASE("gamma fit is scale-equivariant") {
    std::mt19937_64 rng(99);
    std::vector<double> dts, xs;
    for (int i = 0; i < 60; ++i) {
        dts.push_back(0.3);
        std::gamma_distribution<double> g(1.5 * 0.3, 1.0 / 2.0);
        xs.push_back(g(rng));
    }
    const FitResult base = fit_mle(xs, dts, DegradeModel::GammaIncrements);
    const double rho = 3.7;
    std::vector<double> scaled = xs;
    for (double& x : scaled) x *= rho;
    const FitResult fit = fit_mle(scaled, dts, DegradeModel::GammaIncrements);
    CHECK(fit.a_hat == doctest::Approx(base.a_hat).epsilon(1e-5));
    CHECK(fit.b_hat == doctest::Approx(base.b_hat / rho).epsilon(1e-5));
}

TEST_CASE("likelihood input validation") {
    CHECK_THROWS_AS(
        static_cast<void>(fit_mle({0.5}, {0.1}, DegradeModel::GammaIncrements)),
        std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(fit_mle({0.5, -0.1}, {0.1, 0.1},
                                              DegradeModel::GammaIncrements)),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(fit_mle({0.5, 0.4}, {0.1},
                                              DegradeModel::GammaIncrements)),
                    std::invalid_argument);
}

TEST_CASE("barrier validation and headroom") {
    BarrierSpec barrier{2.0, 1.0};
    barrier.validate();
    CHECK(barrier.headroom() == doctest::Approx(1.0));
    CHECK_THROWS_AS((BarrierSpec{1.0, 1.5}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((BarrierSpec{1.0, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("survival probability equals the distribution function at the headroom") {
    const AtsParams p{1.0, 1.0, 0.5, 1.0};
    const BarrierSpec barrier{2.0, 1.0};
    CHECK(survival_probability(p, barrier, 1.0) ==
          doctest::Approx(0.695892556390427919).epsilon(1e-10));
    CHECK(survival_probability(p, barrier, 1.0) ==
          doctest::Approx(cdf(AtsParams{1.0, 1.0, 0.5, 1.0}, 1.0)).epsilon(1e-12));
    const AtsParams g{1.0, 1.0, 0.0, 0.3};
    CHECK(survival_probability(g, BarrierSpec{1.0, 0.5}, 1.0) ==
          doctest::Approx(0.657843630112870681).epsilon(1e-10));
}

TEST_CASE("expected remaining condition") {
    const BarrierSpec ig_barrier{1.0, 0.5};
    CHECK(expected_condition(AtsParams{1.0, 1.0, 0.5, 1.0}, ig_barrier, 1.0) ==
          doctest::Approx(0.271766475815087454).epsilon(1e-9));
    CHECK(expected_condition(AtsParams{1.0, 1.0, 0.5, 1.0}, BarrierSpec{0.5, 0.25},
                             1.0) == doctest::Approx(0.0271997280122329123).epsilon(1e-9));
    CHECK(expected_condition(AtsParams{1.0, 1.0, 0.0, 1.0}, ig_barrier, 1.0) ==
          doctest::Approx(0.589467662320661765).epsilon(1e-9));
    CHECK(expected_condition(AtsParams{2.0, 3.0, 0.25, 1.0}, BarrierSpec{0.6, 0.3},
                             0.7) == doctest::Approx(0.259664179777288424).epsilon(1e-9));
}

TEST_CASE("median lifetime solves the half-survival equation") {
    const AtsParams g{1.0, 1.0, 0.0, 1.0};
    const BarrierSpec gb{1.0, 0.5};
    const double tg = median_lifetime(g, gb);
    CHECK(tg == doctest::Approx(1.41367590521208382).epsilon(1e-8));
    CHECK(cdf(AtsParams{g.a, g.b, g.c, tg}, gb.headroom()) ==
          doctest::Approx(0.5).epsilon(1e-8));

    const AtsParams ig{1.0, 1.0, 0.5, 1.0};
    const BarrierSpec igb{1.772454, 0.886227};
    const double tig = median_lifetime(ig, igb);
    CHECK(tig == doctest::Approx(1.16214404886379015).epsilon(1e-8));
}

TEST_CASE("batch report over mixed units") {
    DegradationSeries ok;
    ok.unit_id = "ok";
    ok.times = {0.0, 0.2, 0.45, 0.7, 1.0, 1.3};
    ok.readings = {0.0, 0.152, 0.306, 0.411, 0.518, 0.600};

    DegradationSeries late;
    late.unit_id = "late";
    late.times = {0.0, 2.5, 3.0, 3.5};
    late.readings = {0.0, 0.40, 0.47, 0.52};

    const BarrierSpec barrier{2.0, 1.0};
    const auto rows =
        batch_report({ok, late}, barrier, 2.0,
                     {DegradeModel::GammaIncrements, DegradeModel::AvgGamma,
                      DegradeModel::AvgIg});
    REQUIRE(rows.size() == 6);
    int usable_ok = 0;
    for (const auto& row : rows) {
        if (row.unit_id == "ok") {
            CHECK(row.usable);
            CHECK(row.survival > 0.0);
            CHECK(row.survival <= 1.0);
            ++usable_ok;
        } else {
            if (row.model == DegradeModel::GammaIncrements) {
                CHECK(row.usable);
            } else {
                CHECK_FALSE(row.usable);
            }
        }
    }
    CHECK(usable_ok == 3);
}
