#pragma once

#include <vector>

#include "ats/params.hpp"

namespace ats {

// n-th coefficient of the cumulant expansion of the running-average law:
// C(n) = a t Gamma(n-c) / ((n+1) b^{n-c}) for n >= 1, C(0) = 0.  C(1) is the
// mean and C(2) the variance.
double cumulant(const AtsParams& p, int n);

// n-th raw moment, from the recurrence
//   M(n) = sum_{k=0}^{n-1} binom(n-1, k) C(k+1) M(n-1-k),   M(0) = 1.
double moment(const AtsParams& p, int n);

// Summary statistics of the running-average law, together with their ratios
// to the same statistics of the underlying subordinator marginal X_t (these
// ratios are parameter-free constants: 1/2, 1/3, 3 sqrt(3)/4, 9/5).
struct SummaryStats {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double mean_ratio_to_ts = 0.0;
    double variance_ratio_to_ts = 0.0;
    double skewness_ratio_to_ts = 0.0;
    double kurtosis_ratio_to_ts = 0.0;
};

SummaryStats stats(const AtsParams& p);

// Cov(X~_t1, X~_t2) = a Gamma(2-c) (3 hi - lo) lo / (6 b^{2-c} hi) with
// lo = min(t1,t2), hi = max(t1,t2).  Reduces to the variance at t1 = t2.
double covariance_running_average(const AtsParams& p, double t1, double t2);

// Large-order asymptotic M(n) ~ a t e^{K} Gamma(n-c-1) / b^{n-c} with
// K = a t b^c Gamma(1-c)/(c+1); n >= 2.
double moment_large_order(const AtsParams& p, int n);

// Exact rational arithmetic for the gamma case (c = 0) with b = 1: the
// moment recurrence closes over the rationals when the effective shape a*t
// is rational.  Returns M(0..n_max) as reduced fractions.
struct Rational {
    long long num = 0;
    long long den = 1;
};

std::vector<Rational> gamma_moments_rational(const Rational& effective_shape, int n_max);

}  // namespace ats
