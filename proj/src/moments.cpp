#include "ats/moments.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ats {

namespace {

// Gamma(n-c) overflows double near n = 170.
constexpr int kMaxOrder = 170;

void check_order(int n) {
    if (n < 0) throw std::invalid_argument("moment order must be nonnegative");
    if (n > kMaxOrder)
        throw std::invalid_argument("moment order " + std::to_string(n) +
                                    " exceeds double range (max " +
                                    std::to_string(kMaxOrder) + ")");
}

Rational reduced(long long num, long long den) {
    if (den == 0) throw std::overflow_error("rational moment: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    return {g ? num / g : num, g ? den / g : den};
}

Rational mul(const Rational& x, const Rational& y) {
    // Cross-reduce first to delay overflow.
    const Rational xy = reduced(x.num, y.den);
    const Rational yx = reduced(y.num, x.den);
    return reduced(xy.num * yx.num, xy.den * yx.den);
}

Rational add(const Rational& x, const Rational& y) {
    const long long g = std::gcd(x.den, y.den);
    const long long den = x.den / g * y.den;
    return reduced(x.num * (y.den / g) + y.num * (x.den / g), den);
}

}  // namespace

double cumulant(const AtsParams& p, int n) {
    p.validate();
    check_order(n);
    if (n == 0) return 0.0;
    return p.effective_shape() * std::tgamma(n - p.c) /
           ((n + 1.0) * std::pow(p.b, n - p.c));
}

double moment(const AtsParams& p, int n) {
    p.validate();
    check_order(n);
    std::vector<double> m(n + 1, 0.0);
    m[0] = 1.0;
    std::vector<double> cum(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) cum[k] = cumulant(p, k);
    for (int j = 1; j <= n; ++j) {
        double binom = 1.0;  // binom(j-1, k), updated multiplicatively
        double s = 0.0;
        for (int k = 0; k <= j - 1; ++k) {
            s += binom * cum[k + 1] * m[j - 1 - k];
            binom *= static_cast<double>(j - 1 - k) / (k + 1.0);
        }
        m[j] = s;
    }
    return m[n];
}

SummaryStats stats(const AtsParams& p) {
    p.validate();
    if (!(p.t > 0.0)) throw std::invalid_argument("stats: requires t > 0");
    const double c1 = cumulant(p, 1);
    const double c2 = cumulant(p, 2);
    const double c3 = cumulant(p, 3);
    const double c4 = cumulant(p, 4);

    const double at = p.effective_shape();
    auto ts_cumulant = [&](int n) {
        return at * std::tgamma(n - p.c) / std::pow(p.b, n - p.c);
    };
    const double k1 = ts_cumulant(1);
    const double k2 = ts_cumulant(2);
    const double k3 = ts_cumulant(3);
    const double k4 = ts_cumulant(4);

    SummaryStats s;
    s.mean = c1;
    s.variance = c2;
    s.skewness = c3 / std::pow(c2, 1.5);
    s.excess_kurtosis = c4 / (c2 * c2);
    s.mean_ratio_to_ts = s.mean / k1;
    s.variance_ratio_to_ts = s.variance / k2;
    s.skewness_ratio_to_ts = s.skewness / (k3 / std::pow(k2, 1.5));
    s.kurtosis_ratio_to_ts = s.excess_kurtosis / (k4 / (k2 * k2));
    return s;
}

double covariance_running_average(const AtsParams& p, double t1, double t2) {
    p.validate();
    if (!(t1 >= 0.0) || !(t2 >= 0.0))
        throw std::invalid_argument("covariance: horizons must be nonnegative");
    if (t1 == 0.0 || t2 == 0.0) return 0.0;
    const double lo = std::min(t1, t2);
    const double hi = std::max(t1, t2);
    return p.a * std::tgamma(2.0 - p.c) * (3.0 * hi - lo) * lo /
           (6.0 * std::pow(p.b, 2.0 - p.c) * hi);
}

double moment_large_order(const AtsParams& p, int n) {
    p.validate();
    check_order(n);
    if (n < 2) throw std::invalid_argument("moment_large_order: needs n >= 2");
    const double at = p.effective_shape();
    const double k = at * std::pow(p.b, p.c) * std::tgamma(1.0 - p.c) / (p.c + 1.0);
    return at * std::exp(k) * std::tgamma(n - p.c - 1.0) / std::pow(p.b, n - p.c);
}

std::vector<Rational> gamma_moments_rational(const Rational& effective_shape, int n_max) {
    if (effective_shape.num <= 0 || effective_shape.den <= 0)
        throw std::invalid_argument("gamma_moments_rational: effective shape must be positive");
    if (n_max < 0 || n_max > 12)
        throw std::invalid_argument("gamma_moments_rational: order out of supported range");

    const Rational at = reduced(effective_shape.num, effective_shape.den);
    // C(k) = a t (k-1)! / (k+1)  for c = 0, b = 1.
    std::vector<Rational> cum(n_max + 1, Rational{0, 1});
    long long fact = 1;
    for (int k = 1; k <= n_max; ++k) {
        if (k >= 2) fact *= (k - 1);
        cum[k] = mul(at, reduced(fact, k + 1));
    }

    std::vector<Rational> m(n_max + 1, Rational{0, 1});
    m[0] = {1, 1};
    for (int j = 1; j <= n_max; ++j) {
        Rational s{0, 1};
        long long binom = 1;  // binom(j-1, k)
        for (int k = 0; k <= j - 1; ++k) {
            s = add(s, mul(reduced(binom, 1), mul(cum[k + 1], m[j - 1 - k])));
            binom = binom * (j - 1 - k) / (k + 1);
        }
        m[j] = s;
    }
    return m;
}

}  // namespace ats
