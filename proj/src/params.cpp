#include "ats/params.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace ats {

void AtsParams::validate() const {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("AtsParams: a must be positive, got " + std::to_string(a));
    if (!(b > 0.0) || !std::isfinite(b))
        throw std::invalid_argument("AtsParams: b must be positive, got " + std::to_string(b));
    if (!(c >= 0.0 && c < 1.0))
        throw std::invalid_argument("AtsParams: c must lie in [0,1), got " + std::to_string(c));
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument("AtsParams: t must be nonnegative, got " + std::to_string(t));
}

void to_json(nlohmann::json& j, const AtsParams& p) {
    j = nlohmann::json{{"a", p.a}, {"b", p.b}, {"c", p.c}, {"t", p.t}};
}

void from_json(const nlohmann::json& j, AtsParams& p) {
    j.at("a").get_to(p.a);
    j.at("b").get_to(p.b);
    j.at("c").get_to(p.c);
    j.at("t").get_to(p.t);
}

double gamma_m(double c) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("gamma_m: need c in (0,1)");
    return -std::tgamma(1.0 - c) / c;
}

double gamma_m1(double c) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("gamma_m1: need c in (0,1)");
    return std::tgamma(1.0 - c) / (c * (c + 1.0));
}

double upper_gamma(double s, double z) {
    if (!(z > 0.0)) throw std::domain_error("upper_gamma: need z > 0");
    if (!(s > -2.0)) throw std::domain_error("upper_gamma: need s > -2");
    if (s > 0.0) return boost::math::tgamma(s, z);
    if (s == 0.0) return boost::math::expint(1, z);
    // Gamma(s, z) = (Gamma(s+1, z) - z^s e^{-z}) / s, one or two steps down.
    return (upper_gamma(s + 1.0, z) - std::pow(z, s) * std::exp(-z)) / s;
}

namespace {

using cd = std::complex<double>;

void check_off_branch_cut(const AtsParams& p, cd u) {
    if (u.imag() == 0.0 && u.real() <= -p.b)
        throw std::domain_error("laplace transform: u on the branch ray (-inf, -b]");
}

// Cumulant series of log E exp(-u X~_t) around u = 0:
//   sum_{n>=1} C(n) (-u)^n / n!,   C(n) = a t Gamma(n-c) / ((n+1) b^{n-c}).
cd exponent_series(const AtsParams& p, cd u) {
    cd acc = 0.0, upow = 1.0;
    double fact = 1.0;
    for (int n = 1; n <= 10; ++n) {
        upow *= -u;
        fact *= n;
        const double cn = p.a * p.t * std::tgamma(n - p.c) / ((n + 1) * std::pow(p.b, n - p.c));
        acc += cn * upow / fact;
    }
    return acc;
}

}  // namespace

std::complex<double> laplace_exponent_ats(const AtsParams& p, cd u) {
    p.validate();
    check_off_branch_cut(p, u);
    if (u == cd(0.0)) return 0.0;
    if (std::abs(u) < 1e-4 * p.b) return exponent_series(p, u);
    const double at = p.a * p.t;
    if (p.c == 0.0) {
        const cd w = std::log(1.0 + u / p.b);
        return at * (1.0 - (1.0 + p.b / u) * w);
    }
    const double c = p.c;
    const cd num = std::pow(p.b + u, c + 1.0) - std::pow(p.b, c) * (p.b + (c + 1.0) * u);
    return at * gamma_m(c) * num / ((c + 1.0) * u);
}

std::complex<double> laplace_ats(const AtsParams& p, cd u) {
    return std::exp(laplace_exponent_ats(p, u));
}

std::complex<double> laplace_ts(const AtsParams& p, cd u) {
    p.validate();
    check_off_branch_cut(p, u);
    const double at = p.a * p.t;
    if (p.c == 0.0) return std::pow(1.0 + u / p.b, -at);
    return std::exp(at * gamma_m(p.c) * (std::pow(p.b + u, p.c) - std::pow(p.b, p.c)));
}

double laplace_ts(const AtsParams& p, double u) { return laplace_ts(p, cd(u)).real(); }
double laplace_ats(const AtsParams& p, double u) { return laplace_ats(p, cd(u)).real(); }

LevyTriplet levy_triplet_ts(const AtsParams& p) {
    p.validate();
    const double a = p.a, b = p.b, c = p.c;
    LevyTriplet tr;
    tr.drift = a * std::pow(b, c - 1.0) * (std::tgamma(1.0 - c) - upper_gamma(1.0 - c, b));
    tr.brownian = 0.0;
    tr.levy_density = [a, b, c](double x) {
        if (!(x > 0.0)) throw std::domain_error("levy density: need x > 0");
        return a * std::exp(-b * x - (c + 1.0) * std::log(x));
    };
    return tr;
}

LevyTriplet levy_triplet_ats(const AtsParams& p) {
    p.validate();
    const double a = p.a, b = p.b, c = p.c;
    LevyTriplet tr;
    tr.drift = a / (2.0 * std::pow(b, 1.0 - c)) *
               (std::tgamma(1.0 - c) +
                (upper_gamma(2.0 - c, b) - 2.0 * upper_gamma(1.0 - c, b) -
                 b * b * upper_gamma(-c, b)) /
                    (c + 1.0));
    tr.brownian = 0.0;
    tr.levy_density = [a, b, c](double x) {
        if (!(x > 0.0)) throw std::domain_error("levy density: need x > 0");
        const double direct = std::exp(-b * x - (c + 1.0) * std::log(x));
        return a / (c + 1.0) * (direct - std::pow(b, c + 1.0) * upper_gamma(-c, b * x));
    };
    return tr;
}

double tempering_function(const AtsParams& p, double x) {
    p.validate();
    if (x < 0.0) throw std::domain_error("tempering_function: need x >= 0");
    const double c = p.c;
    if (x == 0.0) return 1.0 / (c + 1.0);
    const double z = p.b * x;
    return (std::exp(-z) - std::pow(z, c + 1.0) * upper_gamma(-c, z)) / (c + 1.0);
}

double bg_index(ProcessKind, const AtsParams& p) {
    p.validate();
    return p.c;
}

}  // namespace ats
