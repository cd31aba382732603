#pragma once

#include <complex>
#include <functional>
#include <json.hpp>

namespace ats {

// Parameter set of the tempered stable subordinator X_t and of its running
// average X~_t = (1/t) int_0^t X_s ds.  a: jump intensity scale, b: tempering
// rate, c: stability/self-similarity index (c = 0 gamma case, c = 1/2 inverse
// Gaussian case), t: horizon.  The distribution of X~_t depends on (a, t)
// only through the product a*t.
struct AtsParams {
    double a = 1.0;
    double b = 1.0;
    double c = 0.5;
    double t = 1.0;

    // Throws std::invalid_argument if outside a > 0, b > 0, 0 <= c < 1, t >= 0.
    void validate() const;

    double effective_shape() const { return a * t; }

    bool is_gamma_case() const { return c == 0.0; }
    bool is_ig_case() const { return c == 0.5; }
};

void to_json(nlohmann::json& j, const AtsParams& p);
void from_json(const nlohmann::json& j, AtsParams& p);

// Levy triplet (drift, Brownian coefficient, jump density on (0, inf)) of a
// subordinator.  Both processes here are driftless-Brownian (sigma = 0); the
// running average acquires a positive deterministic drift.
struct LevyTriplet {
    double drift = 0.0;
    double brownian = 0.0;
    std::function<double(double)> levy_density;
};

enum class ProcessKind { TemperedStable, AverageTemperedStable };

// Gamma function at the negative non-integer arguments that appear throughout:
// gamma_m(c)  = Gamma(-c)   for c in (0,1), negative,
// gamma_m1(c) = Gamma(-c-1) for c in (0,1), positive.
double gamma_m(double c);
double gamma_m1(double c);

// Upper incomplete gamma Gamma(s, z) for z > 0 and s > -2, including the
// negative and zero first arguments (via the downward recurrence
// Gamma(s, z) = (Gamma(s+1, z) - z^s e^{-z}) / s and Gamma(0, z) = E_1(z))
// that library routines usually refuse.
double upper_gamma(double s, double z);

// Laplace transform E exp(-u X_t) of the tempered stable subordinator,
// analytic on C minus the branch ray (-inf, -b].  Principal branch.
std::complex<double> laplace_ts(const AtsParams& p, std::complex<double> u);

// Laplace transform E exp(-u X~_t) of the running average, same domain.
std::complex<double> laplace_ats(const AtsParams& p, std::complex<double> u);

// log E exp(-u X~_t).  The u = 0 removable singularity is crossed with a
// cumulant series once |u| < 1e-4 * b.
std::complex<double> laplace_exponent_ats(const AtsParams& p, std::complex<double> u);

// Real-argument conveniences (u > -b).
double laplace_ts(const AtsParams& p, double u);
double laplace_ats(const AtsParams& p, double u);

LevyTriplet levy_triplet_ts(const AtsParams& p);
LevyTriplet levy_triplet_ats(const AtsParams& p);

// Tempering factor Q~ of the running-average jump density,
// levy_density_ats(x) = a * Q~(x) / x^{c+1};  Q~(0+) = 1/(c+1), Q~ decreasing.
double tempering_function(const AtsParams& p, double x);

// Blumenthal-Getoor index (equals c for both processes).
double bg_index(ProcessKind kind, const AtsParams& p);

}  // namespace ats
