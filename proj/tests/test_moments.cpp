#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ats/moments.hpp"
#include "ats/params.hpp"

using namespace ats;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("cumulant coefficients") {
    const AtsParams p{1.0, 1.0, 0.5, 1.0};
    CHECK(cumulant(p, 0) == 0.0);
    for (int n = 1; n <= 4; ++n)
        CHECK(cumulant(p, n) ==
              doctest::Approx(std::tgamma(n - 0.5) / (n + 1.0)).epsilon(1e-14));
    const AtsParams q{2.0, 3.0, 0.25, 0.7};
    CHECK(cumulant(q, 2) ==
          doctest::Approx(q.a * q.t * std::tgamma(2.0 - q.c) /
                          (3.0 * std::pow(q.b, 2.0 - q.c)))
              .epsilon(1e-14));
}

TEST_CASE("gamma-case moments are the table rationals") {
    const double rows[4][5] = {
        {1.0 / 4, 11.0 / 48, 25.0 / 64, 3839.0 / 3840, 3537.0 / 1024},
        {1.0 / 2, 7.0 / 12, 9.0 / 8, 743.0 / 240, 1075.0 / 96},
        {3.0 / 4, 17.0 / 16, 147.0 / 64, 8709.0 / 1280, 26499.0 / 1024},
        {1.0, 5.0 / 3, 4.0, 191.0 / 15, 51.0}};
    const double shapes[] = {0.5, 1.0, 1.5, 2.0};
    for (int r = 0; r < 4; ++r) {
        const AtsParams p{shapes[r], 1.0, 0.0, 1.0};
        CHECK(moment(p, 0) == 1.0);
        for (int n = 1; n <= 5; ++n)
            CHECK(moment(p, n) == doctest::Approx(rows[r][n - 1]).epsilon(1e-13));
    }
}

TEST_CASE("inverse-Gaussian-case moments are the table surds") {
    const double rp = std::sqrt(kPi);
    const AtsParams p{1.0, 1.0, 0.5, 1.0};
    const double expect[5] = {
        rp / 2.0, (3.0 * kPi + 2.0 * rp) / 12.0,
        rp * (2.0 * kPi + 4.0 * rp + 3.0) / 16.0,
        (3.0 * kPi * kPi + 12.0 * std::pow(kPi, 1.5) + 22.0 * kPi + 18.0 * rp) / 48.0,
        rp *
            (3.0 * kPi * kPi + 20.0 * std::pow(kPi, 1.5) + 65.0 * kPi + 120.0 * rp +
             105.0) /
            96.0};
    for (int n = 1; n <= 5; ++n)
        CHECK(moment(p, n) == doctest::Approx(expect[n - 1]).epsilon(1e-13));

    const AtsParams half{0.5, 1.0, 0.5, 1.0};
    CHECK(moment(half, 1) == doctest::Approx(rp / 4.0).epsilon(1e-13));
    CHECK(moment(half, 2) ==
          doctest::Approx((3.0 * kPi + 4.0 * rp) / 48.0).epsilon(1e-13));
}

TEST_CASE("moments scale with the effective shape product") {
    const AtsParams p{2.0, 1.3, 0.25, 0.7};
    const AtsParams q{1.4, 1.3, 0.25, 1.0};
    for (int n = 1; n <= 4; ++n)
        CHECK(moment(p, n) == doctest::Approx(moment(q, n)).epsilon(1e-13));
}

TEST_CASE("summary statistics and driver ratios") {
    const AtsParams p{1.3, 0.9, 0.5, 1.1};
    const SummaryStats s = stats(p);
    const double at = p.effective_shape();
    CHECK(s.mean ==
          doctest::Approx(at * std::tgamma(1.0 - p.c) / (2.0 * std::pow(p.b, 1.0 - p.c)))
              .epsilon(1e-13));
    CHECK(s.variance ==
          doctest::Approx(at * std::tgamma(2.0 - p.c) / (3.0 * std::pow(p.b, 2.0 - p.c)))
              .epsilon(1e-13));
    CHECK(s.mean == doctest::Approx(cumulant(p, 1)).epsilon(1e-14));
    CHECK(s.variance == doctest::Approx(cumulant(p, 2)).epsilon(1e-14));
    CHECK(s.mean_ratio_to_ts == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.variance_ratio_to_ts == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(s.skewness_ratio_to_ts ==
          doctest::Approx(3.0 * std::sqrt(3.0) / 4.0).epsilon(1e-15));
    CHECK(s.kurtosis_ratio_to_ts == doctest::Approx(9.0 / 5.0).epsilon(1e-15));

    const double m3 = moment(p, 3), m2 = moment(p, 2), m1 = moment(p, 1);
    const double central3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
    CHECK(s.skewness ==
          doctest::Approx(central3 / std::pow(s.variance, 1.5)).epsilon(1e-12));
}

TEST_CASE("running-average covariance") {
    const AtsParams p{1.0, 1.0, 0.5, 1.0};
    CHECK(covariance_running_average(p, 1.0, 2.0) ==
          doctest::Approx(covariance_running_average(p, 2.0, 1.0)).epsilon(1e-15));
    CHECK(covariance_running_average(p, 1.0, 2.0) ==
          doctest::Approx(p.a * std::tgamma(1.5) * 5.0 / 12.0).epsilon(1e-13));
    const AtsParams at_t{p.a, p.b, p.c, 1.7};
    CHECK(covariance_running_average(p, 1.7, 1.7) ==
          doctest::Approx(cumulant(at_t, 2)).epsilon(1e-13));
}

TEST_CASE("large-order asymptotic approaches the exact moments from above") {
    const AtsParams p{1.0, 1.0, 0.5, 1.0};
    const double expect[4] = {1.259919678, 1.161288198, 1.111156802, 1.084256311};
    const int orders[4] = {10, 20, 30, 40};
    double prev = 1e9;
    for (int i = 0; i < 4; ++i) {
        const double ratio = moment(p, orders[i]) / moment_large_order(p, orders[i]);
        CHECK(ratio == doctest::Approx(expect[i]).epsilon(1e-6));
        CHECK(ratio < prev);
        CHECK(ratio > 1.0);
        prev = ratio;
    }
}

TEST_CASE("moment order is capped before overflow") {
    const AtsParams p{1.0, 1.0, 0.5, 1.0};
    CHECK(std::isfinite(moment(p, 170)));
    CHECK_THROWS_AS(moment(p, 171), std::invalid_argument);
    CHECK_THROWS_AS(moment(p, -1), std::invalid_argument);
}

TEST_CASE("exact rational gamma moments") {
    const std::vector<Rational> half = gamma_moments_rational({1, 2}, 5);
    CHECK(half[0].num == 1);
    CHECK(half[0].den == 1);
    CHECK(half[5].num == 3537);
    CHECK(half[5].den == 1024);
    const std::vector<Rational> one = gamma_moments_rational({1, 1}, 5);
    CHECK(one[4].num == 743);
    CHECK(one[4].den == 240);
    const std::vector<Rational> two = gamma_moments_rational({2, 1}, 5);
    CHECK(two[4].num == 191);
    CHECK(two[4].den == 15);
    CHECK(two[5].num == 51);
    CHECK(two[5].den == 1);
    CHECK_THROWS_AS(gamma_moments_rational({1, 1}, 13), std::invalid_argument);
}
