#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ats/dist.hpp"
#include "ats/moments.hpp"
#include "ats/params.hpp"
#include "ats/quad.hpp"

using namespace ats;

namespace {
constexpr double kPi = 3.14159265358979323846;
const AtsParams kIg{1.0, 1.0, 0.5, 1.0};
const AtsParams kAg{1.0, 1.0, 0.0, 1.0};
}  // namespace

TEST_CASE("density reference values, inverse Gaussian case") {
    CHECK(pdf(kIg, 0.5) == doctest::Approx(1.1503531855354714712).epsilon(1e-10));
    CHECK(pdf(kIg, 1.0) == doctest::Approx(0.60745230977328909913).epsilon(1e-10));
    CHECK(pdf(kIg, 2.0) == doctest::Approx(0.08059476747663858042).epsilon(1e-10));
    CHECK(cdf(kIg, 1.0) == doctest::Approx(0.69589255639042791861).epsilon(1e-10));
    CHECK(cdf(kIg, 2.0) == doctest::Approx(0.9561036621900256461).epsilon(1e-10));
}

TEST_CASE("density reference values, gamma case") {
    CHECK(pdf(kAg, 0.5) == doctest::Approx(0.649276722160178).epsilon(1e-10));
    CHECK(pdf(kAg, 0.7) == doctest::Approx(0.42535897163572677151).epsilon(1e-10));
    CHECK(pdf(kAg, 1.0) == doctest::Approx(0.237467827667004).epsilon(1e-10));
    CHECK(pdf(kAg, 2.0) == doctest::Approx(0.0431731818138652).epsilon(1e-10));
    CHECK(cdf(kAg, 0.5) == doctest::Approx(0.6578436301128706812).epsilon(1e-10));
    CHECK(cdf(kAg, 0.30674805467460489766) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("density reference values, general index") {
    const AtsParams p1{2.0, 3.0, 0.25, 0.7};
    CHECK(pdf(p1, 0.4) == doctest::Approx(1.4595935619829838482).epsilon(1e-10));
    CHECK(cdf(p1, 0.4) == doctest::Approx(0.64359092070336617874).epsilon(1e-10));
    const AtsParams p2{0.5, 1.0, 0.75, 2.0};
    CHECK(pdf(p2, 1.0) == doctest::Approx(0.0970210398218166187).epsilon(1e-10));
    CHECK(cdf(p2, 1.0) == doctest::Approx(0.0054002531541596137463).epsilon(1e-10));
}

TEST_CASE("deep left-tail density stays accurate") {
    // Ratio form: Approx tolerances are absolute at these magnitudes, so a
    // direct comparison of values this small would pass vacuously.
    CHECK(pdf(kIg, 0.044311346272637900682) / 4.4930501083704056044e-11 ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(pdf(kIg, 0.017724538509055160273) / 5.6996515046351319381e-31 ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(pdf(kIg, 0.0088622692545275801365) / 1.0160352215533500939e-64 ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("domain edges") {
    CHECK(pdf(kIg, 0.0) == 0.0);
    CHECK(pdf(kIg, -1.0) == 0.0);
    CHECK(cdf(kIg, 0.0) == 0.0);
    CHECK(cdf(kIg, -0.5) == 0.0);
    const AtsParams degenerate{1.0, 1.0, 0.5, 0.0};
    CHECK_THROWS_AS(pdf(degenerate, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(cdf(degenerate, 1.0), std::invalid_argument);
}

TEST_CASE("driver marginal closed forms") {
    const AtsParams g{1.3, 0.8, 0.0, 0.9};
    const double shape = g.effective_shape();
    for (double x : {0.3, 1.0, 2.5}) {
        const double expect = std::pow(g.b, shape) * std::pow(x, shape - 1.0) *
                              std::exp(-g.b * x) / std::tgamma(shape);
        CHECK(pdf_ts(g, x) == doctest::Approx(expect).epsilon(1e-12));
    }
    const AtsParams ig{0.9, 1.1, 0.5, 1.2};
    const double at = ig.effective_shape();
    for (double x : {0.5, 1.5, 4.0}) {
        const double dev = std::sqrt(ig.b) * x - std::sqrt(kPi) * at;
        const double expect = at * std::exp(-dev * dev / x) / std::pow(x, 1.5);
        CHECK(pdf_ts(ig, x) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK_THROWS_AS(pdf_ts(AtsParams{1.0, 1.0, 0.25, 1.0}, 1.0), std::domain_error);
}

TEST_CASE("driver marginal integrates to one") {
    quad::QuadConfig qc;
    qc.abs_tol = 0.0;
    qc.rel_tol = 1e-10;
    qc.max_subdivisions = 400;
    for (const AtsParams& p : {AtsParams{1.3, 0.8, 0.0, 0.9}, AtsParams{0.9, 1.1, 0.5, 1.2}}) {
        const auto r = quad::integrate_semi_infinite(
            [&](double x) { return x > 0.0 ? pdf_ts(p, x) : 0.0; }, 0.0, qc);
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("right-tail estimate converges along the tail") {
    const double expect_dev[] = {0.1466, 0.0796, 0.0544};
    const double xs[] = {20.0, 40.0, 60.0};
    double prev = 1e9;
    for (int i = 0; i < 3; ++i) {
        const TailEstimate est = pdf_right_tail(kIg, xs[i]);
        CHECK(est.regime == TailRegime::RightTail);
        const double dev = std::abs(pdf(kIg, xs[i]) / est.value - 1.0);
        CHECK(dev == doctest::Approx(expect_dev[i]).epsilon(5e-3));
        CHECK(dev < prev);
        prev = dev;
    }
}

TEST_CASE("right-tail distribution estimate") {
    const double survival_true[] = {3.8287009322806290597e-12, 6.3010329668278734021e-17,
                                    1.3902131351340253858e-21, 1.0359359905041354925e-30};
    const double expect_dev[] = {0.0194, 0.0183, 0.0159, 0.0121};
    const double xs[] = {20.0, 30.0, 40.0, 60.0};
    for (int i = 0; i < 4; ++i) {
        const TailEstimate est = cdf_tails(kIg, xs[i], TailRegime::RightTail);
        CHECK(est.value / survival_true[i] - 1.0 ==
              doctest::Approx(expect_dev[i]).epsilon(0.05));
        CHECK(est.value ==
              doctest::Approx(pdf_right_tail(kIg, xs[i]).value / kIg.b).epsilon(1e-13));
    }
    CHECK(1.0 - cdf(kIg, 20.0) ==
          doctest::Approx(3.8287009322806290597e-12).epsilon(0.02));
}

TEST_CASE("left-tail estimates converge toward the density") {
    const double xs[] = {0.044311346272637900682, 0.017724538509055160273,
                         0.0088622692545275801365};
    const double true_pdf[] = {4.4930501083704056044e-11, 5.6996515046351319381e-31,
                               1.0160352215533500939e-64};
    double prev = 1e9;
    for (int i = 0; i < 3; ++i) {
        const TailEstimate est = pdf_left_tail(kIg, xs[i]);
        const double dev = std::abs(est.value / true_pdf[i] - 1.0);
        CHECK(dev < 0.15);
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev < 0.10);
}

TEST_CASE("left-tail distribution estimate at moderate depth") {
    const double mean = cumulant(kIg, 1);
    const TailEstimate est = cdf_tails(kIg, 0.15 * mean, TailRegime::LeftTail);
    CHECK(est.regime == TailRegime::LeftTail);
    CHECK(est.value / 1.402349277e-4 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(cdf(kIg, 0.15 * mean) / 1.121701862e-4 ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gamma-case left limits") {
    CHECK(pdf(kAg, 1e-6) ==
          doctest::Approx(2.718240406646318).epsilon(1e-9));
    const AtsParams half{0.5, 1.0, 0.0, 1.0};
    CHECK(pdf(half, 1e-4) == doctest::Approx(92.9238396564715).epsilon(1e-9));
    CHECK(pdf(half, 1e-5) == doctest::Approx(294.1154244321807).epsilon(1e-9));
    CHECK(pdf(half, 1e-6) == doctest::Approx(930.1775519369039).epsilon(1e-9));
    const double flat1 = pdf(half, 1e-4) * std::pow(1e-4, 0.5);
    const double flat2 = pdf(half, 1e-5) * std::pow(1e-5, 0.5);
    const double flat3 = pdf(half, 1e-6) * std::pow(1e-6, 0.5);
    CHECK(flat2 / flat1 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(flat3 / flat2 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("mode location") {
    CHECK(mode(kIg) == doctest::Approx(0.529987677164304).epsilon(1e-8));
    CHECK(mode(AtsParams{2.0, 1.0, 0.0, 1.0}) ==
          doctest::Approx(0.37215550360036423).epsilon(1e-8));
    CHECK(mode(kAg) == 0.0);
    CHECK(mode(AtsParams{0.6, 1.0, 0.0, 1.0}) == 0.0);
}

TEST_CASE("degenerate-parameter limits of the transform") {
    const LimitCheckReport rep = limit_checks(kIg);
    CHECK(rep.max_dev_small_a < 1e-6);
    CHECK(rep.max_dev_small_b < 5e-4);
    CHECK(rep.max_dev_small_c < 1e-4);
}
