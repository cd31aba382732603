#pragma once

#include "ats/params.hpp"

namespace ats {

enum class TailRegime { RightTail, LeftTail };

// Leading-order asymptotic value of the density or distribution function in
// one tail.  value >= 0 always; leading_order_only flags that no correction
// terms are included.
struct TailEstimate {
    double value = 0.0;
    TailRegime regime = TailRegime::RightTail;
    bool leading_order_only = true;
};

// Maximum absolute deviations of the three degenerate-parameter limits of the
// transform, each measured on a fixed u-grid in [0.1, 5]:
//   small_a: log-transform -> 0 as a -> 0,
//   small_b: log-transform -> -a t Gamma(-c-1) u^c as b -> 0 (c > 0 only),
//   small_c: transform -> the gamma-average closed form as c -> 0.
struct LimitCheckReport {
    double max_dev_small_a = 0.0;
    double max_dev_small_b = 0.0;
    double max_dev_small_c = 0.0;
};

// Density of the running-average law at x > 0, by adaptive Gauss-Kronrod
// quadrature of the oscillatory integral representation over (0,1).  Tiny
// negative quadrature noise (within 10x the error estimate) clamps to 0.
// For c > 1/2 the integrand envelope grows beyond double range deep in the
// left tail; there the density underflows and 0 is returned.
double pdf(const AtsParams& p, double x);

// Distribution function at x > 0, same machinery (the integrand differs from
// the density one by a factor y).  Clamped to [0,1] against quadrature noise.
double cdf(const AtsParams& p, double x);

// Density of the underlying subordinator marginal X_t in the two closed-form
// families: gamma (c = 0) and inverse Gaussian (c = 1/2).  Throws
// std::domain_error for other c.
double pdf_ts(const AtsParams& p, double x);

// Right-tail estimate  a t e^{K - b x} / (b x^{c+2}),
// K = a t b^c Gamma(1-c)/(c+1).  Valid for x well above the mean.
TailEstimate pdf_right_tail(const AtsParams& p, double x);

// Left-tail estimate near 0.  Gamma case: closed forms branching on at != 1
// vs at = 1; inverse Gaussian case: explicit saddle-point form; general c:
// quadrature of the limiting integral representation.
TailEstimate pdf_left_tail(const AtsParams& p, double x);

// Tail estimates of the distribution function.  RIGHT: pdf_right_tail / b.
// LEFT: constant e^{K} minus the limiting integral, evaluated by quadrature;
// severe cancellation makes the LEFT form meaningful only for moderately
// small x in double precision.
TailEstimate cdf_tails(const AtsParams& p, double x, TailRegime regime);

// Unique mode of the (unimodal) law: the root in x of the derivative
// integral, which carries weight 1/y^3 in place of the density's 1/y^2.
double mode(const AtsParams& p);

LimitCheckReport limit_checks(const AtsParams& p);

}  // namespace ats
