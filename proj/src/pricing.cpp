#include "ats/pricing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ats/detail/oscillatory.hpp"
#include "ats/dist.hpp"
#include "ats/quad.hpp"

namespace ats {

namespace {

using detail::kPi;

std::complex<double> mixture_argument(const MixtureParams& mp, std::complex<double> u) {
    return mp.mu * u - 0.5 * mp.sigma * mp.sigma * u * u;
}

}  // namespace

void MixtureParams::validate() const {
    base.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("MixtureParams: sigma must be > 0");
    if (!(mu + 0.5 * sigma * sigma < base.b))
        throw std::invalid_argument(
            "MixtureParams: e^H is not integrable (need mu + sigma^2/2 < b)");
}

std::complex<double> laplace_mixture(const MixtureParams& mp, std::complex<double> u) {
    mp.validate();
    return std::exp(-mp.kappa * mp.base.t * u) * laplace_ats(mp.base, mixture_argument(mp, u));
}

double laplace_mixture(const MixtureParams& mp, double u) {
    mp.validate();
    const double w = mp.mu * u - 0.5 * mp.sigma * mp.sigma * u * u;
    if (!(w > -mp.base.b))
        throw std::domain_error("laplace_mixture: u outside the validity strip");
    return std::exp(-mp.kappa * mp.base.t * u) * laplace_ats(mp.base, w);
}

double pdf_mixture(const MixtureParams& mp, double x) {
    mp.validate();
    if (!(mp.base.t > 0.0))
        throw std::invalid_argument("pdf_mixture: requires t > 0");
    const double z = x - mp.kappa * mp.base.t;
    const double s2 = mp.sigma * mp.sigma;
    const detail::Kernel k = detail::Kernel::make(mp.base);
    const double mu = mp.mu, mu2 = mp.mu * mp.mu, two_b_s2 = 2.0 * k.b * s2;
    const double az = std::abs(z);
    // Near the drift point the contour kernel loses its damping factor: its
    // envelope peaks around sqrt(y) ~ kappa_z/3 after ~n_osc oscillations, and
    // both the peak and the count blow up as z -> 0.  Inside that region mix
    // the conditional normal density over the subordinator's law directly.
    const double kappa_z = az * std::sqrt(two_b_s2) / s2;
    bool mix_directly = (z == 0.0) || kappa_z < 1e-4;
    if (!mix_directly && mp.base.c > 0.0) {
        const double n_osc =
            k.A * k.sin_pc * std::pow(kappa_z / 3.0, -2.0 * mp.base.c) / (2.0 * kPi);
        mix_directly = n_osc > 60.0;
    }
    if (mix_directly) {
        quad::QuadConfig qc;
        qc.abs_tol = 0.0;
        qc.rel_tol = 1e-9;
        qc.max_subdivisions = 100;
        const AtsParams base = mp.base;
        const quad::QuadResult r = quad::integrate_semi_infinite(
            [&](double w) {
                if (w <= 0.0) return 0.0;
                const double dev = z - mu * w;
                return pdf(base, w) * std::exp(-dev * dev / (2.0 * s2 * w)) /
                       std::sqrt(2.0 * kPi * s2 * w);
            },
            0.0, qc);
        return r.value;
    }
    const detail::ExpFn damp = detail::kernel_exponent(k, 0.0, 0.0);
    const detail::ExpFn ex = [damp, mu, mu2, two_b_s2, s2, z, az](double y) {
        const double alpha = std::sqrt(mu2 + two_b_s2 / y);
        return damp(y) + (mu * z - az * alpha) / s2 - 1.5 * std::log(y) -
               0.5 * std::log(mu2 * y + two_b_s2);
    };
    const detail::ShiftedIntegral si =
        detail::integrate_oscillatory(ex, detail::kernel_phase(k));
    const double is = si.shifted.value;
    const double es = si.shifted.error_estimate;
    if (is < -10.0 * es)
        throw std::runtime_error("pdf_mixture: integral negative beyond quadrature noise");
    if (is <= 10.0 * es) return 0.0;
    return k.b / kPi * std::exp(k.neg_k0 + si.log_scale + std::log(is));
}

namespace {

// int_0^inf Im[e^{ium} g(u)] / u du, extended one octave at a time until the
// last octave contributes less than 1e-10 of the accumulated total.
double fourier_tail_integral(const std::function<std::complex<double>(double)>& g,
                             double m) {
    quad::QuadConfig qc;
    qc.abs_tol = 1e-13;
    qc.rel_tol = 1e-10;
    qc.max_subdivisions = 200;
    auto integrand = [&](double u) {
        const std::complex<double> e(std::cos(u * m), std::sin(u * m));
        return (e * g(u)).imag() / u;
    };
    auto piece = [&](double lo, double hi) {
        const quad::QuadResult r = quad::integrate_finite(integrand, lo, hi, qc);
        if (!r.converged &&
            r.error_estimate > std::max(1e-13, 1e-12 * r.abs_integral))
            throw std::runtime_error("itm_probabilities: Fourier integral failed to converge");
        return r.value;
    };
    double total = piece(0.0, 1.0);
    double lo = 1.0;
    for (int k = 0; k < 64; ++k) {
        const double hi = 2.0 * lo;
        const double part = piece(lo, hi);
        total += part;
        lo = hi;
        if (std::abs(part) < 1e-10 * std::max(1.0, std::abs(total))) return total;
    }
    throw std::runtime_error("itm_probabilities: Fourier tail did not decay");
}

double clamp_probability(double p, const char* what) {
    if (p < -1e-6 || p > 1.0 + 1e-6)
        throw std::runtime_error(std::string(what) + " left [0,1] beyond quadrature noise");
    return std::min(1.0, std::max(0.0, p));
}

}  // namespace

ItmProbabilities itm_probabilities(const MixtureParams& mp, const MarketContext& mkt,
                                   double strike, double maturity) {
    if (!(mkt.spot > 0.0)) throw std::invalid_argument("itm_probabilities: spot must be > 0");
    if (!(strike > 0.0)) throw std::invalid_argument("itm_probabilities: strike must be > 0");
    if (!(maturity > 0.0))
        throw std::invalid_argument("itm_probabilities: maturity must be > 0");
    MixtureParams m = mp;
    m.base.t = maturity;
    m.validate();
    const double fbar1 = laplace_mixture(m, -1.0);
    const double log_m = std::log(mkt.spot / (strike * fbar1));
    auto g_star = [&](double u) {
        return laplace_mixture(m, std::complex<double>(0.0, -u));
    };
    auto g_breve = [&](double u) {
        return laplace_mixture(m, std::complex<double>(-1.0, -u)) / fbar1;
    };
    ItmProbabilities out;
    out.p_star = clamp_probability(
        0.5 + fourier_tail_integral(g_star, log_m) / kPi, "p_star");
    out.p_breve = clamp_probability(
        0.5 + fourier_tail_integral(g_breve, log_m) / kPi, "p_breve");
    return out;
}

namespace {

// (b e^{-k0} / pi) Int E sin(S) * [Int e^{tilt z} psi(z, y) dz] weight dy,
// the inner integral running over (z0, inf) for z0 > 0 and (-inf, z0) for
// z0 < 0.  Both branches share the damped form exp((mt z0 - |z0| alpha)/s2)
// with mt = mu + tilt s2; only the positive prefactor 1/(alpha -+ mt) differs.
double exercise_mass(const MixtureParams& mp, double z0, double tilt) {
    const detail::Kernel k = detail::Kernel::make(mp.base);
    const detail::ExpFn damp = detail::kernel_exponent(k, 0.0, 0.0);
    const double s2 = mp.sigma * mp.sigma;
    const double mu = mp.mu, mu2 = mp.mu * mp.mu, two_b_s2 = 2.0 * k.b * s2;
    const double mt = mu + tilt * s2;
    const double sign = z0 > 0.0 ? 1.0 : -1.0;
    const double az0 = std::abs(z0);
    const detail::ExpFn ex = [damp, s2, mu2, two_b_s2, mt, sign, z0, az0](double y) {
        const double alpha = std::sqrt(mu2 + two_b_s2 / y);
        return damp(y) + (mt * z0 - az0 * alpha) / s2 + std::log(s2) -
               std::log(alpha - sign * mt) - 1.5 * std::log(y) -
               0.5 * std::log(mu2 * y + two_b_s2);
    };
    const detail::ShiftedIntegral si =
        detail::integrate_oscillatory(ex, detail::kernel_phase(k));
    const double is = si.shifted.value;
    const double es = si.shifted.error_estimate;
    if (is < -10.0 * es)
        throw std::runtime_error("exercise_mass: integral negative beyond quadrature noise");
    if (is <= 10.0 * es) return 0.0;
    return k.b / kPi * std::exp(k.neg_k0 + si.log_scale + std::log(is));
}

}  // namespace

ItmProbabilities itm_probabilities_by_density(const MixtureParams& mp,
                                              const MarketContext& mkt,
                                              double strike, double maturity) {
    if (!(mkt.spot > 0.0 && strike > 0.0 && maturity > 0.0))
        throw std::invalid_argument(
            "itm_probabilities_by_density: spot, strike, maturity must be > 0");
    MixtureParams m = mp;
    m.base.t = maturity;
    m.validate();
    const double fbar1 = laplace_mixture(m, -1.0);
    const double z0 =
        std::log(strike * fbar1 / mkt.spot) - m.kappa * maturity;
    if (!(std::abs(z0) > 1e-9))
        throw std::invalid_argument(
            "itm_probabilities_by_density: strike sits at the drift point of the "
            "density representation");
    const double mass_star = exercise_mass(m, z0, 0.0);
    const double mass_breve =
        std::exp(m.kappa * maturity) * exercise_mass(m, z0, 1.0) / fbar1;
    ItmProbabilities out;
    if (z0 > 0.0) {
        out.p_star = clamp_probability(mass_star, "p_star");
        out.p_breve = clamp_probability(mass_breve, "p_breve");
    } else {
        out.p_star = clamp_probability(1.0 - mass_star, "p_star");
        out.p_breve = clamp_probability(1.0 - mass_breve, "p_breve");
    }
    return out;
}

double price_european(const MixtureParams& mp, const MarketContext& mkt,
                      const OptionQuote& quote) {
    const ItmProbabilities itm =
        itm_probabilities(mp, mkt, quote.strike, quote.maturity);
    const double df_spot = mkt.spot * std::exp(-mkt.dividend_yield * quote.maturity);
    const double df_strike = quote.strike * std::exp(-mkt.rate * quote.maturity);
    const double call = df_spot * itm.p_breve - df_strike * itm.p_star;
    const double price = quote.is_call ? call : call - df_spot + df_strike;
    const double bound =
        std::max(0.0, quote.is_call ? df_spot - df_strike : df_strike - df_spot);
    const double noise = 1e-8 * (mkt.spot + quote.strike);
    if (price < bound - noise)
        throw std::runtime_error("price_european: price below the no-arbitrage bound");
    return std::max(price, bound);
}

double arpe_of(const MixtureParams& mp, const MarketContext& mkt,
               const std::vector<OptionQuote>& quotes) {
    if (quotes.empty()) throw std::invalid_argument("arpe_of: no quotes");
    double sum = 0.0;
    for (const OptionQuote& q : quotes) {
        if (!(q.market_price > 0.0))
            throw std::invalid_argument("arpe_of: market prices must be > 0");
        sum += std::abs(price_european(mp, mkt, q) - q.market_price) / q.market_price;
    }
    return sum / static_cast<double>(quotes.size());
}

namespace {

using Point = std::array<double, 4>;  // (log a, log b, mu, log sigma)

MixtureParams point_params(const Point& th, double c_fixed) {
    MixtureParams mp;
    mp.kappa = 0.0;
    mp.mu = th[2];
    mp.sigma = std::exp(th[3]);
    mp.base = AtsParams{std::exp(th[0]), std::exp(th[1]), c_fixed, 1.0};
    return mp;
}

double nelder_mead(const std::function<double(const Point&)>& f, Point& x,
                   int max_iter) {
    std::array<Point, 5> simplex;
    std::array<double, 5> fv;
    simplex[0] = x;
    const double deltas[4] = {0.25, 0.25, 0.2, 0.25};
    for (int i = 1; i < 5; ++i) {
        simplex[i] = x;
        simplex[i][i - 1] += deltas[i - 1];
    }
    for (int i = 0; i < 5; ++i) fv[i] = f(simplex[i]);
    auto order = [&] {
        for (int i = 1; i < 5; ++i)
            for (int j = i; j > 0 && fv[j] < fv[j - 1]; --j) {
                std::swap(fv[j], fv[j - 1]);
                std::swap(simplex[j], simplex[j - 1]);
            }
    };
    order();
    for (int it = 0; it < max_iter; ++it) {
        if (fv[4] - fv[0] < 1e-12 && fv[0] < 1e5) break;
        Point centroid{};
        for (int i = 0; i < 4; ++i)
            for (int d = 0; d < 4; ++d) centroid[d] += simplex[i][d] / 4.0;
        auto blend = [&](double t) {
            Point p;
            for (int d = 0; d < 4; ++d)
                p[d] = centroid[d] + t * (simplex[4][d] - centroid[d]);
            return p;
        };
        const Point refl = blend(-1.0);
        const double fr = f(refl);
        if (fr < fv[0]) {
            const Point expa = blend(-2.0);
            const double fe = f(expa);
            if (fe < fr) {
                simplex[4] = expa;
                fv[4] = fe;
            } else {
                simplex[4] = refl;
                fv[4] = fr;
            }
        } else if (fr < fv[3]) {
            simplex[4] = refl;
            fv[4] = fr;
        } else {
            const Point contr = blend(fr < fv[4] ? -0.5 : 0.5);
            const double fc = f(contr);
            if (fc < std::min(fr, fv[4])) {
                simplex[4] = contr;
                fv[4] = fc;
            } else {
                for (int i = 1; i < 5; ++i) {
                    for (int d = 0; d < 4; ++d)
                        simplex[i][d] = simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d]);
                    fv[i] = f(simplex[i]);
                }
            }
        }
        order();
    }
    x = simplex[0];
    return fv[0];
}

}  // namespace

CalibrationResult calibrate(const std::vector<OptionQuote>& quotes,
                            const MarketContext& mkt, double c_fixed,
                            const std::vector<CalibrationSeed>& extra_seeds) {
    if (quotes.size() < 4)
        throw std::invalid_argument("calibrate: need at least 4 quotes");
    if (!(c_fixed >= 0.0 && c_fixed < 1.0))
        throw std::invalid_argument("calibrate: c must lie in [0, 1)");
    auto objective = [&](const Point& th) {
        if (std::abs(th[0]) > 20.0 || std::abs(th[1]) > 20.0 || std::abs(th[2]) > 20.0 ||
            std::abs(th[3]) > 20.0)
            return 1e6;
        const MixtureParams mp = point_params(th, c_fixed);
        const double gap = mp.mu + 0.5 * mp.sigma * mp.sigma - mp.base.b;
        if (gap >= 0.0) return 1e6 * (1.0 + gap);
        try {
            return arpe_of(mp, mkt, quotes);
        } catch (const std::exception&) {
            return 1e6;
        }
    };
    std::vector<CalibrationSeed> seeds = {{1.0, 1.0, -0.5, 0.5},
                                          {0.5, 2.0, 0.0, 0.3},
                                          {2.0, 0.7, -0.3, 0.7},
                                          {1.0, 3.0, 0.3, 0.4}};
    seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());
    double best_val = 1e18;
    Point best{};
    for (const CalibrationSeed& s : seeds) {
        if (!(s.a > 0.0 && s.b > 0.0 && s.sigma > 0.0))
            throw std::invalid_argument("calibrate: seeds need a, b, sigma > 0");
        Point x{std::log(s.a), std::log(s.b), s.mu, std::log(s.sigma)};
        double v = nelder_mead(objective, x, 600);
        v = nelder_mead(objective, x, 600);  // restart from the incumbent
        if (v < best_val) {
            best_val = v;
            best = x;
        }
        if (best_val < 1e-7) break;
    }
    if (best_val >= 1e5)
        throw std::runtime_error("calibrate: every start failed the integrability constraint");
    CalibrationResult out;
    out.params = point_params(best, c_fixed);
    out.params.validate();
    out.arpe = best_val;
    return out;
}

std::vector<OptionQuote> parse_quotes_csv(std::istream& in) {
    auto fail = [](int lineno, const std::string& msg) {
        throw std::runtime_error("quotes csv line " + std::to_string(lineno) + ": " + msg);
    };
    std::string line;
    if (!std::getline(in, line)) fail(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::istringstream hs(line);
        std::string f0, f1, f2, f3;
        std::getline(hs, f0, ',');
        std::getline(hs, f1, ',');
        std::getline(hs, f2, ',');
        std::getline(hs, f3, ',');
        if (f0 != "strike" || f1 != "maturity_days" || f2 != "price" || f3 != "type")
            fail(1, "expected header strike,maturity_days,price,type");
    }
    std::vector<OptionQuote> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = line;
        stripped.erase(std::remove_if(stripped.begin(), stripped.end(),
                                      [](unsigned char ch) { return std::isspace(ch); }),
                       stripped.end());
        if (stripped.empty()) continue;
        std::istringstream ss(stripped);
        std::string fs, fm, fp, ft, extra;
        if (!std::getline(ss, fs, ',') || !std::getline(ss, fm, ',') ||
            !std::getline(ss, fp, ',') || !std::getline(ss, ft, ','))
            fail(lineno, "expected 4 fields");
        if (std::getline(ss, extra, ',')) fail(lineno, "expected 4 fields");
        OptionQuote q;
        try {
            std::size_t pos = 0;
            q.strike = std::stod(fs, &pos);
            if (pos != fs.size()) throw std::invalid_argument("strike");
            q.maturity = std::stod(fm, &pos) / 365.0;
            if (pos != fm.size()) throw std::invalid_argument("maturity");
            q.market_price = std::stod(fp, &pos);
            if (pos != fp.size()) throw std::invalid_argument("price");
        } catch (const std::exception&) {
            fail(lineno, "cannot parse numeric field in '" + line + "'");
        }
        if (ft == "C")
            q.is_call = true;
        else if (ft == "P")
            q.is_call = false;
        else
            fail(lineno, "type must be C or P, got '" + ft + "'");
        if (!(q.strike > 0.0 && q.maturity > 0.0 && q.market_price > 0.0))
            fail(lineno, "strike, maturity and price must be positive");
        out.push_back(q);
    }
    return out;
}

}  // namespace ats
