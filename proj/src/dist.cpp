#include "ats/dist.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ats/detail/oscillatory.hpp"
#include "ats/quad.hpp"

namespace ats::detail {

Kernel Kernel::make(const AtsParams& p) {
    Kernel k;
    k.at = p.effective_shape();
    k.b = p.b;
    k.c = p.c;
    if (p.c > 0.0) {
        k.A = k.at * std::pow(p.b, p.c) * gamma_m1(p.c);
        k.sin_pc = std::sin(kPi * p.c);
        k.cos_pc = std::cos(kPi * p.c);
        k.neg_k0 = -k.at * std::pow(p.b, p.c) * gamma_m(p.c);
    } else {
        k.neg_k0 = k.at;
    }
    return k;
}

ExpFn kernel_exponent(const Kernel& k, double bx, double log_weight) {
    return [k, bx, log_weight](double y) {
        const double omy = 1.0 - y;
        double damp;
        if (k.c == 0.0) {
            damp = (omy <= 0.0) ? 0.0 : -k.at * omy * (std::log(omy) - std::log(y));
        } else {
            const double d = (omy <= 0.0) ? 0.0 : std::pow(omy / y, k.c);
            damp = -k.A * (y + k.cos_pc * omy * d);
        }
        return damp - bx / y + log_weight * std::log(y);
    };
}

ExpFn kernel_phase(const Kernel& k) {
    return [k](double y) {
        const double omy = 1.0 - y;
        if (k.c == 0.0) return kPi * k.at * omy;
        const double d = (omy <= 0.0) ? 0.0 : std::pow(omy / y, k.c);
        return k.A * k.sin_pc * omy * d;
    };
}

ExpFn left_limit_exponent(const Kernel& k, double bx, double log_weight) {
    return [k, bx, log_weight](double y) {
        const double omy = 1.0 - y;
        const double d = (omy <= 0.0) ? 0.0 : std::pow(omy / y, k.c);
        return -k.A * k.cos_pc * d - bx / y + log_weight * std::log(y);
    };
}

ExpFn left_limit_phase(const Kernel& k) {
    return [k](double y) {
        const double omy = 1.0 - y;
        const double d = (omy <= 0.0) ? 0.0 : std::pow(omy / y, k.c);
        return k.A * k.sin_pc * d;
    };
}

const std::vector<double>& scan_grid() {
    static const std::vector<double> grid = [] {
        std::vector<double> g;
        const int n_log = 100, n_top = 30;
        const double lo = std::log(1e-14), hi = std::log(0.9);
        for (int i = 0; i < n_log; ++i)
            g.push_back(std::exp(lo + (hi - lo) * i / (n_log - 1)));
        for (int j = 0; j < n_top; ++j)
            g.push_back(1.0 - std::pow(10.0, -7.0 + 6.0 * j / (n_top - 1)));
        return g;
    }();
    return grid;
}

ShiftedIntegral integrate_oscillatory(const ExpFn& ex, const ExpFn& ph) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double y : scan_grid()) peak = std::max(peak, ex(y));
    if (!std::isfinite(peak))
        throw std::runtime_error("oscillatory integral: envelope scan produced no finite value");

    quad::QuadConfig cfg;
    cfg.abs_tol = 0.0;
    cfg.rel_tol = 1e-11;
    cfg.max_subdivisions = 800;
    cfg.rule = quad::QuadConfig::Rule::GK21;
    const double m = peak;
    auto f = [&ex, &ph, m](double y) { return std::exp(ex(y) - m) * std::sin(ph(y)); };
    ShiftedIntegral out;
    out.log_scale = m;
    out.shifted = quad::integrate_finite(f, 0.0, 1.0, cfg);

    const quad::QuadResult& r = out.shifted;
    if (!r.converged) {
        // Roundoff-floor acceptance: once the error estimate sits at the
        // cancellation floor of the absolute integral, further subdivision
        // cannot help and the value is the best double precision offers.
        const double floor_ = std::max(1e-13, 1e-12 * r.abs_integral);
        if (!(r.error_estimate <= floor_))
            throw std::runtime_error(
                "oscillatory integral failed to converge (error estimate " +
                std::to_string(r.error_estimate) + ", |integral| scale " +
                std::to_string(r.abs_integral) + ")");
    }
    return out;
}

void require_density_domain(const AtsParams& p) {
    p.validate();
    if (!(p.t > 0.0))
        throw std::invalid_argument("density/distribution evaluation requires t > 0");
}

double mean_of(const AtsParams& p) {
    return p.effective_shape() * std::tgamma(1.0 - p.c) /
           (2.0 * std::pow(p.b, 1.0 - p.c));
}

double tail_constant(const AtsParams& p) {
    return p.effective_shape() * std::pow(p.b, p.c) * std::tgamma(1.0 - p.c) /
           (p.c + 1.0);
}

}  // namespace ats::detail

namespace ats {

using detail::Kernel;
using detail::ExpFn;
using detail::ShiftedIntegral;
using detail::kernel_exponent;
using detail::kernel_phase;
using detail::left_limit_exponent;
using detail::left_limit_phase;
using detail::scan_grid;
using detail::integrate_oscillatory;
using detail::require_density_domain;
using detail::mean_of;
using detail::tail_constant;
using detail::kPi;
using detail::kEulerGamma;

namespace {

// Deep left tail: the (0,1) kernel subtracts two O(1) oscillatory pieces whose
// true difference can sit dozens of orders of magnitude below the envelope,
// which no double-precision quadrature can resolve.  The density is instead
// recovered from the transform along the vertical line through the real
// saddle u* of phi(u) = log E e^{-u X} + u x.  On that line |e^{phi}| is
// maximal at v = 0 (|E e^{-sX}| <= E e^{-Re s X}) and the phase is stationary
// there, so the integrand is a bounded bump with additive digits; the result
// is assembled in log space to survive magnitudes far below DBL_MIN range.
double pdf_saddle(const AtsParams& p, double x) {
    const auto phi = [&p, x](std::complex<double> s) {
        return laplace_exponent_ats(p, s) + s * x;
    };
    const auto phi_re = [&phi](double u) {
        return phi(std::complex<double>(u, 0.0)).real();
    };

    // phi is convex on (0, inf) with phi'(0) = x - mean < 0; the large-u
    // slope of the exponent gives the starting scale for the minimum search.
    const double at = p.effective_shape();
    double hi = std::pow(at * std::tgamma(1.0 - p.c) / ((p.c + 1.0) * x),
                         1.0 / (1.0 - p.c));
    if (!(hi > 0.0) || !std::isfinite(hi)) return 0.0;
    int expand = 0;
    while (phi_re(hi * 1.000001) <= phi_re(hi)) {
        hi *= 4.0;
        if (++expand > 400 || !(hi < 1e200)) return 0.0;
    }
    double lo = 0.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = hi - gr * hi, c2 = gr * hi;
    double f1 = phi_re(c1), f2 = phi_re(c2);
    for (int it = 0; it < 240 && hi - lo > 1e-10 * hi; ++it) {
        if (f1 < f2) {
            hi = c2;
            c2 = c1;
            f2 = f1;
            c1 = hi - gr * (hi - lo);
            f1 = phi_re(c1);
        } else {
            lo = c1;
            c1 = c2;
            f1 = f2;
            c2 = lo + gr * (hi - lo);
            f2 = phi_re(c2);
        }
    }
    const double us = 0.5 * (lo + hi);
    const double phi0 = phi_re(us);

    const double h = 1e-4 * us;
    double curv = (phi_re(us + h) - 2.0 * phi0 + phi_re(us - h)) / (h * h);
    if (!(curv > 0.0) || !std::isfinite(curv)) curv = 1.0 / (us * us);
    const double sv = 1.0 / std::sqrt(curv);

    quad::QuadConfig cfg;
    cfg.abs_tol = 1e-13;
    cfg.rel_tol = 1e-9;
    cfg.max_subdivisions = 400;
    cfg.rule = quad::QuadConfig::Rule::GK21;
    auto bump = [&phi, phi0, us, sv](double w) {
        const std::complex<double> d =
            phi(std::complex<double>(us, sv * w)) - phi0;
        if (d.real() < -745.0) return 0.0;
        return std::exp(d.real()) * std::cos(d.imag());
    };
    const quad::QuadResult r = quad::integrate_semi_infinite(bump, 0.0, cfg);
    if (!(r.value > 0.0)) return 0.0;
    const double lp = phi0 + std::log(sv * r.value / kPi);
    if (lp < -745.0) return 0.0;
    return std::exp(lp);
}

}  // namespace

double pdf(const AtsParams& p, double x) {
    require_density_domain(p);
    if (!(x > 0.0)) return 0.0;
    const Kernel k = Kernel::make(p);
    const ShiftedIntegral si =
        integrate_oscillatory(kernel_exponent(k, p.b * x, -2.0), kernel_phase(k));
    const double is = si.shifted.value;
    const double es = si.shifted.error_estimate;
    const bool noisy = (is <= 10.0 * es) || (es > 1e-8 * std::abs(is));
    if (noisy && x < mean_of(p)) return pdf_saddle(p, x);
    if (is < -10.0 * es)
        throw std::runtime_error("density integral negative beyond quadrature noise");
    if (is <= 10.0 * es) return 0.0;  // below the double-precision cancellation floor
    const double expo = k.neg_k0 + si.log_scale + std::log(is);
    if (expo > 700.0)
        throw std::runtime_error("density evaluation overflowed (inconsistent state)");
    return k.b / kPi * std::exp(expo);
}

double cdf(const AtsParams& p, double x) {
    require_density_domain(p);
    if (!(x > 0.0)) return 0.0;
    const Kernel k = Kernel::make(p);
    const ShiftedIntegral si =
        integrate_oscillatory(kernel_exponent(k, p.b * x, -1.0), kernel_phase(k));
    const double is = si.shifted.value;
    const double es = si.shifted.error_estimate;
    if (is < -10.0 * es)
        throw std::runtime_error("distribution integral negative beyond quadrature noise");
    double term, term_err;
    if (is <= 10.0 * es) {
        // Integral lost to cancellation: only acceptable if the whole term is
        // provably negligible.
        const double log_unc = k.neg_k0 + si.log_scale + std::log(std::max(10.0 * es, 1e-300));
        if (log_unc > std::log(1e-9))
            throw std::runtime_error(
                "distribution function: cancellation exceeds double precision at x = " +
                std::to_string(x));
        term = 0.0;
        term_err = std::exp(log_unc);
    } else {
        term = std::exp(k.neg_k0 + si.log_scale + std::log(is)) / kPi;
        term_err = std::exp(k.neg_k0 + si.log_scale + std::log(es)) / kPi;
    }
    double v = 1.0 - term;
    if (v < 0.0) {
        if (-v <= 10.0 * term_err) return 0.0;
        throw std::runtime_error("distribution function negative beyond quadrature noise");
    }
    return v;
}

double pdf_ts(const AtsParams& p, double x) {
    require_density_domain(p);
    if (!(x > 0.0)) return 0.0;
    const double at = p.effective_shape();
    if (p.is_gamma_case()) {
        return std::exp(at * std::log(p.b) + (at - 1.0) * std::log(x) - p.b * x -
                        std::lgamma(at));
    }
    if (p.is_ig_case()) {
        const double mu = at * std::sqrt(kPi / p.b);
        const double lambda = 2.0 * kPi * at * at;
        const double dev = x - mu;
        return std::sqrt(lambda / (2.0 * kPi * x * x * x)) *
               std::exp(-lambda * dev * dev / (2.0 * mu * mu * x));
    }
    throw std::domain_error(
        "pdf_ts: closed-form subordinator density exists only for c = 0 and c = 1/2");
}

TailEstimate pdf_right_tail(const AtsParams& p, double x) {
    require_density_domain(p);
    if (!(x > 0.0)) throw std::invalid_argument("pdf_right_tail: need x > 0");
    const double at = p.effective_shape();
    const double logv = std::log(at) + tail_constant(p) - p.b * x -
                        (p.c + 2.0) * std::log(x) - std::log(p.b);
    return {std::exp(logv), TailRegime::RightTail, true};
}

TailEstimate pdf_left_tail(const AtsParams& p, double x) {
    require_density_domain(p);
    if (!(x > 0.0)) throw std::invalid_argument("pdf_left_tail: need x > 0");
    const double at = p.effective_shape();
    TailEstimate out{0.0, TailRegime::LeftTail, true};
    if (p.is_gamma_case()) {
        if (std::fabs(at - 1.0) <= 1e-9) {
            const double bx = p.b * x;
            out.value = std::exp(1.0) * p.b *
                        (1.0 + bx * (kEulerGamma - 1.0 + std::log(bx)));
        } else {
            out.value = std::exp(at * (1.0 + std::log(p.b)) + (at - 1.0) * std::log(x) -
                                 std::lgamma(at));
        }
        return out;
    }
    if (p.is_ig_case()) {
        out.value = 2.0 * at / (3.0 * std::pow(x, 1.5)) *
                    std::exp(2.0 * at * std::sqrt(kPi * p.b) - p.b * x -
                             4.0 * kPi * at * at / (9.0 * x));
        return out;
    }
    const Kernel k = Kernel::make(p);
    const ShiftedIntegral si =
        integrate_oscillatory(left_limit_exponent(k, p.b * x, -2.0), left_limit_phase(k));
    const double is = si.shifted.value;
    const double es = si.shifted.error_estimate;
    if (is <= 10.0 * es) return out;  // underflow / cancellation floor: estimate ~ 0
    out.value = k.b / kPi * std::exp(k.neg_k0 + si.log_scale + std::log(is));
    return out;
}

TailEstimate cdf_tails(const AtsParams& p, double x, TailRegime regime) {
    require_density_domain(p);
    if (!(x > 0.0)) throw std::invalid_argument("cdf_tails: need x > 0");
    if (regime == TailRegime::RightTail) {
        TailEstimate t = pdf_right_tail(p, x);
        t.regime = TailRegime::RightTail;
        t.value /= p.b;
        return t;
    }
    TailEstimate out{0.0, TailRegime::LeftTail, true};
    const double at = p.effective_shape();
    if (p.is_gamma_case()) {
        out.value = std::exp(at * (1.0 + std::log(p.b)) + at * std::log(x) -
                             std::lgamma(at + 1.0));
        return out;
    }
    const Kernel k = Kernel::make(p);
    const ShiftedIntegral si =
        integrate_oscillatory(left_limit_exponent(k, p.b * x, -1.0), left_limit_phase(k));
    const double is = si.shifted.value;
    const double es = si.shifted.error_estimate;
    const double constant = std::exp(tail_constant(p));
    if (is <= 10.0 * es) return out;  // cancellation floor
    const double term = std::exp(k.neg_k0 + si.log_scale + std::log(is)) / kPi;
    const double term_err = std::exp(k.neg_k0 + si.log_scale + std::log(es)) / kPi;
    double v = constant - term;
    if (v < 0.0) {
        if (-v <= 10.0 * term_err) return out;
        throw std::runtime_error("cdf_tails: left estimate negative beyond quadrature noise");
    }
    out.value = v;
    return out;
}

double mode(const AtsParams& p) {
    require_density_domain(p);
    // Gamma case with effective shape <= 1: the density decreases from its
    // (possibly infinite) value at the origin, so the mode sits at 0.
    if (p.is_gamma_case() && p.effective_shape() <= 1.0) return 0.0;
    const Kernel k = Kernel::make(p);
    const double mean = mean_of(p);

    auto scan_peak = [&k](double x) {
        const ExpFn ex = kernel_exponent(k, k.b * x, -3.0);
        double peak = -std::numeric_limits<double>::infinity();
        for (double y : scan_grid()) peak = std::max(peak, ex(y));
        return peak;
    };
    // Derivative sign integral: positive right of the mode, negative left of
    // it.  The shifted value preserves the sign.
    auto deriv_full = [&k](double x) {
        return integrate_oscillatory(kernel_exponent(k, k.b * x, -3.0), kernel_phase(k));
    };
    auto deriv = [&deriv_full](double x) { return deriv_full(x).shifted.value; };

    double lo = mean / 100.0, hi = mean * 10.0;
    // Deep in the left tail the derivative integral drowns in oscillatory
    // cancellation (its sign becomes quadrature noise), and for c > 1/2 the
    // envelope can exceed double range outright; raise the bracket floor
    // until the value is significant against its own error estimate.
    for (int i = 0; i < 200 && lo < hi / 4.0; ++i) {
        if (scan_peak(lo) > 50.0) {
            lo *= 1.4;
            continue;
        }
        const ShiftedIntegral si = deriv_full(lo);
        if (std::fabs(si.shifted.value) <= 10.0 * si.shifted.error_estimate) {
            lo *= 1.4;
            continue;
        }
        break;
    }
    double flo = deriv(lo), fhi = deriv(hi);
    if ((flo > 0.0) == (fhi > 0.0)) {
        lo = std::max(lo / 10.0, mean / 1000.0);
        hi = mean * 100.0;
        flo = deriv(lo);
        fhi = deriv(hi);
        if ((flo > 0.0) == (fhi > 0.0))
            throw std::runtime_error(
                "mode: no sign change of the derivative integral inside the bracket "
                "[mean/100, mean*10] = [" +
                std::to_string(mean / 100.0) + ", " + std::to_string(mean * 10.0) +
                "] or its tenfold widening; the mode may sit at the origin "
                "(shape barely above 1) or outside the searched range");
    }
    return quad::find_root(deriv, lo, hi, 1e-10 * std::max(1.0, mean));
}

LimitCheckReport limit_checks(const AtsParams& p) {
    p.validate();
    LimitCheckReport rep;
    std::vector<double> us;
    for (int i = 0; i < 20; ++i)
        us.push_back(0.1 * std::pow(50.0, i / 19.0));  // log grid on [0.1, 5]

    AtsParams pa = p;
    pa.a = 1e-8;
    for (double u : us)
        rep.max_dev_small_a = std::max(
            rep.max_dev_small_a, std::abs(laplace_exponent_ats(pa, std::complex<double>(u))));

    if (p.c > 0.0) {
        AtsParams pb = p;
        pb.b = 1e-8;
        for (double u : us) {
            const double limit = -p.a * p.t * gamma_m1(p.c) * std::pow(u, p.c);
            const double got = laplace_exponent_ats(pb, std::complex<double>(u)).real();
            rep.max_dev_small_b = std::max(rep.max_dev_small_b, std::fabs(got - limit));
        }
    }

    AtsParams pc = p, p0 = p;
    pc.c = 1e-6;
    p0.c = 0.0;
    for (double u : us) {
        const double dev = std::fabs(laplace_ats(pc, u) - laplace_ats(p0, u));
        rep.max_dev_small_c = std::max(rep.max_dev_small_c, dev);
    }
    return rep;
}

}  // namespace ats
