#include "ats/sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ats/quad.hpp"

namespace ats {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::uint64_t splitmix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// i-th member of the stream family rooted at seed; distinct i give
// independent-quality seeds, so path batches can run concurrently.
Rng stream_rng(std::uint64_t seed, std::uint64_t i) {
    return Rng(splitmix64(seed + (i + 1) * 0x9e3779b97f4a7c15ULL));
}

double standard_normal(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return n(rng);
}

double uniform01(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng);
}

// Inverse Gaussian IG(mu, lam) by the Michael-Schucany-Haas transform.
// The smaller root of the quadratic is mu/(1 + w + sqrt(w^2 + 2w)),
// w = mu nu / (2 lam), a cancellation-free form.
double sample_inverse_gaussian(double mu, double lam, Rng& rng) {
    const double z = standard_normal(rng);
    const double w = mu * z * z / (2.0 * lam);
    const double x1 = mu / (1.0 + w + std::sqrt(w * (w + 2.0)));
    return uniform01(rng) <= mu / (mu + x1) ? x1 : mu * mu / x1;
}

// Kanter's representation of the standard positive c-stable law
// (E e^{-uZ} = e^{-u^c}):  Z = (A(U)/W)^{(1-c)/c}, U ~ U(0,pi), W ~ Exp(1),
// A(u) = {sin(cu)^c sin((1-c)u)^{1-c} / sin u}^{1/(1-c)}, evaluated in logs.
double sample_positive_stable(double c, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, kPi);
    std::exponential_distribution<double> expo(1.0);
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    double w = expo(rng);
    while (w <= 0.0) w = expo(rng);
    const double log_a = (c * std::log(std::sin(c * u)) +
                          (1.0 - c) * std::log(std::sin((1.0 - c) * u)) -
                          std::log(std::sin(u))) /
                         (1.0 - c);
    return std::exp((1.0 - c) / c * (log_a - std::log(w)));
}

}  // namespace

PathGrid PathGrid::uniform(int n_steps, double horizon) {
    PathGrid g;
    g.n_steps = n_steps;
    g.horizon = horizon;
    g.times.resize(static_cast<std::size_t>(n_steps) + 1);
    for (int i = 0; i <= n_steps; ++i)
        g.times[static_cast<std::size_t>(i)] =
            horizon * (static_cast<double>(i) / n_steps);
    g.validate();
    return g;
}

void PathGrid::validate() const {
    if (n_steps < 1) throw std::invalid_argument("PathGrid: n_steps must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("PathGrid: horizon must be > 0");
    if (times.size() != static_cast<std::size_t>(n_steps) + 1)
        throw std::invalid_argument("PathGrid: times must have n_steps + 1 entries");
    if (times.front() != 0.0)
        throw std::invalid_argument("PathGrid: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("PathGrid: times must be strictly increasing");
    if (std::abs(times.back() - horizon) > 1e-9 * std::max(1.0, horizon))
        throw std::invalid_argument("PathGrid: times must end at horizon");
}

void CpaConfig::validate() const {
    if (n_bins < 1) throw std::invalid_argument("CpaConfig: n_bins must be >= 1");
    if (!(x_min > 0.0) || !(x_min < x_max))
        throw std::invalid_argument("CpaConfig: need 0 < x_min < x_max");
}

std::vector<double> CpaConfig::edges() const {
    validate();
    std::vector<double> e(static_cast<std::size_t>(n_bins) + 1);
    if (spacing == BinSpacing::Uniform) {
        for (int j = 0; j <= n_bins; ++j)
            e[static_cast<std::size_t>(j)] =
                x_min + (x_max - x_min) * (static_cast<double>(j) / n_bins);
    } else {
        const double l0 = std::log(x_min), l1 = std::log(x_max);
        for (int j = 0; j <= n_bins; ++j)
            e[static_cast<std::size_t>(j)] =
                std::exp(l0 + (l1 - l0) * (static_cast<double>(j) / n_bins));
    }
    e.front() = x_min;
    e.back() = x_max;
    return e;
}

double sample_ts_increment(const AtsParams& p, double dt, Rng& rng) {
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("sample_ts_increment: dt must be > 0");
    const double shape = p.a * dt;
    if (p.c == 0.0) {
        std::gamma_distribution<double> g(shape, 1.0 / p.b);
        return g(rng);
    }
    if (p.c == 0.5) {
        const double mu = shape * std::sqrt(kPi / p.b);
        const double lam = 2.0 * kPi * shape * shape;
        return sample_inverse_gaussian(mu, lam, rng);
    }
    const double delta = std::pow(shape * -gamma_m(p.c), 1.0 / p.c);
    for (int it = 0; it < 1000000; ++it) {
        const double x = delta * sample_positive_stable(p.c, rng);
        if (uniform01(rng) < std::exp(-p.b * x)) return x;
    }
    throw std::runtime_error("sample_ts_increment: rejection cap exceeded");
}

EulerPaths euler_paths(const AtsParams& p, const PathGrid& grid, int n_paths,
                       std::uint64_t seed) {
    p.validate();
    grid.validate();
    if (n_paths < 1) throw std::invalid_argument("euler_paths: n_paths must be >= 1");
    EulerPaths out;
    out.paths_x.reserve(static_cast<std::size_t>(n_paths));
    out.paths_avg.reserve(static_cast<std::size_t>(n_paths));
    const std::size_t n = grid.times.size();
    for (int k = 0; k < n_paths; ++k) {
        Rng rng = stream_rng(seed, static_cast<std::uint64_t>(k));
        SamplePath px{grid, std::vector<double>(n, 0.0)};
        SamplePath pa{grid, std::vector<double>(n, 0.0)};
        double x = 0.0, integral = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double dt = grid.times[i + 1] - grid.times[i];
            x += sample_ts_increment(p, dt, rng);
            integral += x * dt;
            px.values[i + 1] = x;
            pa.values[i + 1] = integral / grid.times[i + 1];
        }
        out.paths_x.push_back(std::move(px));
        out.paths_avg.push_back(std::move(pa));
    }
    return out;
}

namespace {

struct CpaBins {
    std::vector<double> intensity;  // lambda_j
    std::vector<double> jump;       // chi_j
    double drift = 0.0;
};

CpaBins make_cpa_bins(const AtsParams& p, const CpaConfig& cfg) {
    const LevyTriplet tri = levy_triplet_ats(p);
    const std::vector<double> e = cfg.edges();
    quad::QuadConfig qc;
    qc.abs_tol = 0.0;
    qc.rel_tol = 1e-11;
    qc.max_subdivisions = 200;
    auto bin_integral = [&](double lo, double hi, int power, int j) {
        quad::QuadResult r;
        if (hi / lo > 4.0) {
            r = quad::integrate_finite(
                [&](double s) {
                    const double x = std::exp(s);
                    return tri.levy_density(x) * std::pow(x, power + 1);
                },
                std::log(lo), std::log(hi), qc);
        } else {
            r = quad::integrate_finite(
                [&](double x) { return tri.levy_density(x) * std::pow(x, power); },
                lo, hi, qc);
        }
        if (!r.converged &&
            r.error_estimate > std::max(1e-13, 1e-12 * r.abs_integral))
            throw std::runtime_error("cpa_lambda_paths: quadrature failed on bin " +
                                     std::to_string(j));
        return r.value;
    };
    CpaBins bins;
    bins.drift = tri.drift;
    bins.intensity.resize(static_cast<std::size_t>(cfg.n_bins));
    bins.jump.resize(static_cast<std::size_t>(cfg.n_bins));
    for (int j = 0; j < cfg.n_bins; ++j) {
        const double lam = bin_integral(e[j], e[j + 1], 0, j);
        const double m2 = bin_integral(e[j], e[j + 1], 2, j);
        bins.intensity[static_cast<std::size_t>(j)] = lam;
        bins.jump[static_cast<std::size_t>(j)] =
            lam > 0.0 ? std::sqrt(m2 / lam) : 0.0;
    }
    return bins;
}

}  // namespace

std::vector<SamplePath> cpa_lambda_paths(const AtsParams& p, const PathGrid& grid,
                                         const CpaConfig& cfg, int n_paths,
                                         std::uint64_t seed) {
    p.validate();
    grid.validate();
    cfg.validate();
    if (n_paths < 1)
        throw std::invalid_argument("cpa_lambda_paths: n_paths must be >= 1");
    const CpaBins bins = make_cpa_bins(p, cfg);
    const std::size_t n = grid.times.size();
    const std::size_t m = bins.intensity.size();
    std::vector<SamplePath> out;
    out.reserve(static_cast<std::size_t>(n_paths));
    for (int k = 0; k < n_paths; ++k) {
        Rng rng = stream_rng(seed, static_cast<std::uint64_t>(k));
        SamplePath path{grid, std::vector<double>(n, 0.0)};
        double lambda_t = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double dt = grid.times[i + 1] - grid.times[i];
            double d = bins.drift * dt;
            for (std::size_t j = 0; j < m; ++j) {
                const double lam = bins.intensity[j];
                if (lam <= 0.0) continue;
                std::poisson_distribution<long long> pois(lam * dt);
                d += bins.jump[j] * static_cast<double>(pois(rng));
                if (bins.jump[j] < 1.0) d -= bins.jump[j] * lam * dt;
            }
            lambda_t += d;
            path.values[i + 1] = lambda_t;
        }
        out.push_back(std::move(path));
    }
    return out;
}

std::vector<SamplePath> mixture_paths(const MixtureParams& mp, const PathGrid& grid,
                                      const CpaConfig& cfg, int n_paths,
                                      std::uint64_t seed) {
    mp.validate();
    std::vector<SamplePath> lambda =
        cpa_lambda_paths(mp.base, grid, cfg, n_paths, seed);
    const std::uint64_t normal_seed = seed ^ 0x8f1bbcdcbfa53e0bULL;
    for (int k = 0; k < n_paths; ++k) {
        Rng rng = stream_rng(normal_seed, static_cast<std::uint64_t>(k));
        SamplePath& path = lambda[static_cast<std::size_t>(k)];
        double h = 0.0;
        double prev_lambda = 0.0;
        for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
            const double dt = grid.times[i + 1] - grid.times[i];
            const double dl = path.values[i + 1] - prev_lambda;
            prev_lambda = path.values[i + 1];
            h += mp.kappa * dt + mp.mu * dl +
                 mp.sigma * std::sqrt(std::abs(dl)) * standard_normal(rng);
            path.values[i + 1] = h;
        }
    }
    return lambda;
}

double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

void paths_to_csv(std::ostream& os, const std::vector<SamplePath>& paths) {
    if (paths.empty()) throw std::invalid_argument("paths_to_csv: no paths");
    os << std::setprecision(17);
    os << "time";
    for (std::size_t k = 0; k < paths.size(); ++k) os << ",path_" << (k + 1);
    os << "\n";
    const std::vector<double>& times = paths.front().grid.times;
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << times[i];
        for (const SamplePath& p : paths) os << "," << p.values[i];
        os << "\n";
    }
}

void paths_to_json(std::ostream& os, const std::vector<SamplePath>& paths) {
    if (paths.empty()) throw std::invalid_argument("paths_to_json: no paths");
    nlohmann::json j;
    j["times"] = paths.front().grid.times;
    nlohmann::json arr = nlohmann::json::array();
    for (const SamplePath& p : paths) arr.push_back(p.values);
    j["paths"] = std::move(arr);
    os << j.dump(2) << "\n";
}

}  // namespace ats
