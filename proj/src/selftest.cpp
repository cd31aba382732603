#include "ats/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ats/detail/oscillatory.hpp"
#include "ats/dist.hpp"
#include "ats/moments.hpp"
#include "ats/params.hpp"
#include "ats/pricing.hpp"
#include "ats/quad.hpp"
#include "ats/sim.hpp"

namespace ats {

namespace {

using detail::kPi;

CheckResult make_result(std::string name, double dev, double tol, std::string detail) {
    CheckResult r;
    r.name = std::move(name);
    r.max_deviation = dev;
    r.passed = std::isfinite(dev) && dev <= tol;
    std::ostringstream os;
    os << detail << " (tolerance " << tol << ")";
    r.detail = os.str();
    return r;
}

const std::vector<AtsParams>& law_sets() {
    static const std::vector<AtsParams> sets = {
        {1.0, 1.0, 0.5, 1.0},
        {2.0, 0.7, 0.25, 0.6},
        {0.5, 1.3, 0.75, 1.4},
        {1.5, 2.0, 0.0, 0.8},
    };
    return sets;
}

CheckResult check_semigroup() {
    double dev = 0.0;
    for (const AtsParams& p : law_sets()) {
        for (double u : {0.3, 1.0, 3.0}) {
            const double t1 = 0.4, t2 = 0.9;
            const double joint =
                laplace_ts(AtsParams{p.a, p.b, p.c, t1 + t2}, u);
            const double split = laplace_ts(AtsParams{p.a, p.b, p.c, t1}, u) *
                                 laplace_ts(AtsParams{p.a, p.b, p.c, t2}, u);
            dev = std::max(dev, std::abs(joint - split));
        }
    }
    return make_result("transform_semigroup_in_time", dev, 1e-12,
                       "laplace_ts multiplicative over time splits");
}

CheckResult check_convolution() {
    double dev = 0.0;
    for (const AtsParams& p : law_sets()) {
        for (double u : {0.3, 1.0, 3.0}) {
            const double a1 = 0.6 * p.a, a2 = 0.4 * p.a;
            const double joint = laplace_ats(p, u);
            const double split = laplace_ats(AtsParams{a1, p.b, p.c, p.t}, u) *
                                 laplace_ats(AtsParams{a2, p.b, p.c, p.t}, u);
            dev = std::max(dev, std::abs(joint - split));
        }
    }
    return make_result("transform_convolution_in_shape", dev, 1e-12,
                       "laplace_ats multiplicative over shape splits");
}

CheckResult check_scaling() {
    double dev = 0.0;
    for (const AtsParams& p : law_sets()) {
        for (double u : {0.3, 1.0, 3.0}) {
            for (double s : {0.5, 2.3}) {
                const AtsParams scaled{p.a * std::pow(s, p.c), p.b / s, p.c, p.t};
                dev = std::max(dev, std::abs(laplace_ts(p, s * u) - laplace_ts(scaled, u)));
                dev = std::max(dev,
                               std::abs(laplace_ats(p, s * u) - laplace_ats(scaled, u)));
            }
        }
    }
    return make_result("transform_scaling_law", dev, 1e-12,
                       "scaling u by s matches (a s^c, b/s) reparametrization");
}

CheckResult check_fredholm() {
    double dev = 0.0;
    quad::QuadConfig qc;
    qc.abs_tol = 0.0;
    qc.rel_tol = 1e-9;
    qc.max_subdivisions = 400;
    for (const AtsParams& p : std::vector<AtsParams>{{1.0, 1.0, 0.5, 1.0},
                                                     {2.0, 1.3, 0.25, 1.0}}) {
        const LevyTriplet trip = levy_triplet_ats(p);
        for (double u : {1.0, 2.0}) {
            const double lhs = laplace_exponent_ats(p, {u, 0.0}).real() / p.t;
            const double small = quad::integrate_finite(
                                     [&](double x) {
                                         return (std::expm1(-u * x) + u * x) *
                                                trip.levy_density(x);
                                     },
                                     0.0, 1.0, qc)
                                     .value;
            const double large = quad::integrate_semi_infinite(
                                     [&](double x) {
                                         return std::expm1(-u * x) * trip.levy_density(x);
                                     },
                                     1.0, qc)
                                     .value;
            const double rhs = -trip.drift * u + small + large;
            dev = std::max(dev, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
    }
    return make_result("levy_triplet_fredholm", dev, 1e-6,
                       "exponent equals drift plus compensated jump integrals");
}

CheckResult check_unimodal() {
    double dev = 0.0;
    for (const AtsParams& p : std::vector<AtsParams>{{1.0, 1.0, 0.5, 1.0},
                                                     {1.0, 1.0, 0.0, 1.0},
                                                     {2.0, 3.0, 0.25, 0.7}}) {
        const double m = cumulant(p, 1);
        std::vector<double> vals;
        for (int i = 0; i < 50; ++i) vals.push_back(pdf(p, m * (0.05 + 4.0 * i / 49.0)));
        const auto peak = std::max_element(vals.begin(), vals.end());
        const double scale = *peak;
        for (auto it = vals.begin(); it + 1 != peak + 1 && it + 1 != vals.end(); ++it)
            dev = std::max(dev, (*it - *(it + 1)) / scale);
        for (auto it = peak; it + 1 != vals.end(); ++it)
            dev = std::max(dev, (*(it + 1) - *it) / scale);
    }
    return make_result("density_unimodal", dev, 1e-9,
                       "density rises to a single peak then falls on a scan grid");
}

CheckResult check_cdf_monotone() {
    double dev = 0.0;
    for (const AtsParams& p : std::vector<AtsParams>{{1.0, 1.0, 0.5, 1.0},
                                                     {1.0, 1.0, 0.0, 1.0},
                                                     {2.0, 3.0, 0.25, 0.7}}) {
        const double m = cumulant(p, 1);
        double prev = 0.0;
        for (int i = 1; i <= 30; ++i) {
            const double f = cdf(p, m * (5.0 * i / 30.0));
            dev = std::max({dev, prev - f, -f, f - 1.0});
            prev = f;
        }
    }
    return make_result("cdf_monotone", dev, 1e-9,
                       "distribution function nondecreasing and inside [0,1]");
}

CheckResult check_paths_monotone() {
    const AtsParams p{1.0, 1.0, 0.5, 1.0};
    const EulerPaths ep = euler_paths(p, PathGrid::uniform(50, 1.0), 8, 7u);
    double dev = 0.0;
    for (const SamplePath& path : ep.paths_x)
        for (std::size_t i = 0; i + 1 < path.values.size(); ++i)
            dev = std::max(dev, path.values[i] - path.values[i + 1]);
    return make_result("subordinator_paths_monotone", dev, 0.0,
                       "simulated driver paths never decrease");
}

CheckResult check_boundary_constant() {
    quad::QuadConfig qc;
    qc.abs_tol = 0.0;
    qc.rel_tol = 1e-10;
    qc.max_subdivisions = 400;
    const double val = quad::integrate_finite(
                           [](double y) {
                               return std::exp((y - 1.0) * std::log(1.0 / y - 1.0)) *
                                      std::sin(kPi * (1.0 - y)) / (y * y);
                           },
                           0.0, 1.0, qc)
                           .value;
    return make_result("boundary_constant_pi", std::abs(val - kPi), 1e-8,
                       "gamma-case kernel integral equals pi");
}

CheckResult check_moment_closed_forms() {
    double dev = 0.0;
    {
        const AtsParams p{1.0, 1.0, 0.0, 1.0};
        const double expect[] = {0.5, 7.0 / 12.0, 9.0 / 8.0, 743.0 / 240.0, 1075.0 / 96.0};
        for (int n = 1; n <= 5; ++n)
            dev = std::max(dev, std::abs(moment(p, n) / expect[n - 1] - 1.0));
    }
    {
        const AtsParams p{1.0, 1.0, 0.5, 1.0};
        const double rp = std::sqrt(kPi);
        const double expect[] = {rp / 2.0, (3.0 * kPi + 2.0 * rp) / 12.0,
                                 rp * (2.0 * kPi + 4.0 * rp + 3.0) / 16.0};
        for (int n = 1; n <= 3; ++n)
            dev = std::max(dev, std::abs(moment(p, n) / expect[n - 1] - 1.0));
    }
    return make_result("moment_recurrence_closed_forms", dev, 1e-12,
                       "recurrence reproduces rational and surd moments");
}

MixtureParams reference_mixture() {
    MixtureParams mp;
    mp.base = AtsParams{1.46874, 0.682686, 0.5, 1.0};
    mp.mu = -0.594359;
    mp.sigma = 0.635236;
    mp.kappa = 0.0;
    return mp;
}

CheckResult check_parity() {
    const MixtureParams mp = reference_mixture();
    MarketContext mkt;
    mkt.spot = 9232.98;
    mkt.rate = 0.02;
    mkt.dividend_yield = 0.01;
    const double strike = 9000.0, maturity = 0.1;
    const double call = price_european(mp, mkt, {strike, maturity, 1.0, true});
    const double put = price_european(mp, mkt, {strike, maturity, 1.0, false});
    const double lhs = call - put;
    const double rhs = mkt.spot * std::exp(-mkt.dividend_yield * maturity) -
                       strike * std::exp(-mkt.rate * maturity);
    return make_result("put_call_parity", std::abs(lhs - rhs) / mkt.spot, 1e-12,
                       "call minus put equals discounted forward minus strike");
}

CheckResult check_duality(int n_sets, int n_u) {
    static const double us[] = {0.5, 1.0, 2.0, 5.0};
    static const std::vector<AtsParams> sets = {{1.0, 1.0, 0.0, 1.0},
                                                {1.0, 1.0, 0.5, 1.0},
                                                {2.0, 1.0, 0.25, 1.0},
                                                {0.5, 1.0, 0.75, 1.0}};
    quad::QuadConfig qc;
    qc.abs_tol = 0.0;
    qc.rel_tol = 1e-8;
    qc.max_subdivisions = 400;
    double dev = 0.0;
    for (int si = 0; si < n_sets; ++si) {
        const AtsParams& p = sets[static_cast<std::size_t>(si)];
        for (int ui = 0; ui < n_u; ++ui) {
            const double u = us[ui];
            const double via_density =
                quad::integrate_semi_infinite(
                    [&](double x) { return std::exp(-u * x) * pdf(p, x); }, 0.0, qc)
                    .value;
            dev = std::max(dev, std::abs(via_density / laplace_ats(p, u) - 1.0));
        }
    }
    return make_result("transform_density_duality", dev, 1e-6,
                       "integrated density reproduces the Laplace transform");
}

CheckResult check_euler_terminal() {
    const AtsParams p{1.46874, 0.682686, 0.5, 1.0};
    const EulerPaths ep = euler_paths(p, PathGrid::uniform(2000, 1.0), 2000, 20260814u);
    std::vector<double> terminal;
    terminal.reserve(ep.paths_avg.size());
    for (const SamplePath& path : ep.paths_avg) terminal.push_back(path.values.back());
    const double ks = ks_distance(terminal, [&](double x) { return cdf(p, x); });
    return make_result("euler_terminal_law", ks, 0.05,
                       "averaged Euler paths terminate with the quadrature law");
}

CheckResult check_cpa_terminal() {
    const AtsParams p{1.46874, 0.682686, 0.5, 1.0};
    CpaConfig cfg;
    const std::vector<SamplePath> paths =
        cpa_lambda_paths(p, PathGrid::uniform(50, 1.0), cfg, 2000, 20260814u);
    std::vector<double> terminal;
    terminal.reserve(paths.size());
    for (const SamplePath& path : paths) terminal.push_back(path.values.back());
    const double ks = ks_distance(terminal, [&](double x) { return cdf(p, x); });
    return make_result("cpa_terminal_law", ks, 0.05,
                       "compound-Poisson terminal values match the quadrature law");
}

CheckResult check_mc_price() {
    const MixtureParams mp = reference_mixture();
    MarketContext mkt;
    mkt.spot = 9232.98;
    const double strike = 9000.0, maturity = 19.0 / 365.0;
    const double fourier = price_european(mp, mkt, {strike, maturity, 1.0, true});
    MixtureParams at_t = mp;
    at_t.base.t = maturity;
    const double fbar1 = laplace_mixture(at_t, -1.0);
    CpaConfig cfg;
    const std::vector<SamplePath> paths = mixture_paths(
        mp, PathGrid::uniform(20, maturity), cfg, 100000, 99173u);
    double sum = 0.0, sum2 = 0.0;
    for (const SamplePath& path : paths) {
        const double payoff =
            std::max(0.0, mkt.spot * std::exp(path.values.back()) / fbar1 - strike);
        sum += payoff;
        sum2 += payoff * payoff;
    }
    const double n = static_cast<double>(paths.size());
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
    std::ostringstream os;
    os << "simulated " << mean << " vs Fourier " << fourier << ", s.e. " << se;
    return make_result("fourier_vs_monte_carlo_price",
                       std::abs(mean - fourier) / se, 3.0, os.str());
}

}  // namespace

std::vector<CheckResult> run_quick() {
    std::vector<CheckResult> out;
    out.push_back(check_semigroup());
    out.push_back(check_convolution());
    out.push_back(check_scaling());
    out.push_back(check_fredholm());
    out.push_back(check_unimodal());
    out.push_back(check_cdf_monotone());
    out.push_back(check_paths_monotone());
    out.push_back(check_boundary_constant());
    out.push_back(check_moment_closed_forms());
    out.push_back(check_parity());
    out.push_back(check_duality(1, 2));
    return out;
}

std::vector<CheckResult> run_full() {
    std::vector<CheckResult> out = run_quick();
    out.pop_back();
    out.push_back(check_duality(4, 4));
    out.push_back(check_euler_terminal());
    out.push_back(check_cpa_terminal());
    out.push_back(check_mc_price());
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed; });
}

}  // namespace ats
