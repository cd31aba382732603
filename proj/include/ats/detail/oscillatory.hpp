#pragma once

#include <functional>
#include <vector>

#include "ats/params.hpp"
#include "ats/quad.hpp"

// Internal machinery shared by the density/distribution evaluators and the
// Gaussian-mixture pricing integrals.  Not part of the public interface.
namespace ats::detail {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// Shared pieces of the contour-derived integral representations over (0,1).
//
//   density(x) = (b e^{neg_k0} / pi) * int_0^1 exp(damp(y) - b x / y) *
//                sin(phase(y)) dy / y^2,
//
// the distribution function carries 1/y instead of 1/y^2 and the mode
// equation 1/y^3.  For c > 0:
//   damp(y)  = -A (y + cos(pi c) (1-y) D(y)),   D(y) = ((1-y)/y)^c,
//   phase(y) =  A sin(pi c) (1-y) D(y),         A = a t b^c Gamma(-c-1) > 0,
//   neg_k0   = -a t b^c Gamma(-c) > 0.
// For c = 0 the gamma-average limit:
//   damp(y)  = -a t (1-y) log((1-y)/y),  phase(y) = pi a t (1-y),
//   neg_k0   = a t.
struct Kernel {
    double at = 0.0;
    double b = 0.0;
    double c = 0.0;
    double A = 0.0;
    double sin_pc = 0.0;
    double cos_pc = 1.0;
    double neg_k0 = 0.0;

    static Kernel make(const AtsParams& p);
};

using ExpFn = std::function<double(double)>;

// Exponent and phase of the exact-representation integrand at weight
// y^{log_weight} (log_weight = -2 density, -1 distribution, -3 mode).
ExpFn kernel_exponent(const Kernel& k, double bx, double log_weight);
ExpFn kernel_phase(const Kernel& k);

// Small-x limiting kernel (the (1-y) factors drop out of the radical):
// dhat(y) = (1/y - 1)^c, used by the left-tail estimates for c > 0.
ExpFn left_limit_exponent(const Kernel& k, double bx, double log_weight);
ExpFn left_limit_phase(const Kernel& k);

// Fixed scan grid on (0,1): log-spaced body plus a cluster at 1^- where the
// right-tail mass concentrates.
const std::vector<double>& scan_grid();

struct ShiftedIntegral {
    double log_scale = 0.0;  // peak exponent factored out of the integrand
    quad::QuadResult shifted;
};

// Integrate exp(ex(y)) sin(ph(y)) over (0,1) with the peak exponent factored
// out, so that integrands whose envelope overflows or underflows the double
// range in absolute terms are still handled; the caller reassembles the value
// in log space.
ShiftedIntegral integrate_oscillatory(const ExpFn& ex, const ExpFn& ph);

void require_density_domain(const AtsParams& p);

double mean_of(const AtsParams& p);

// K = a t b^c Gamma(1-c)/(c+1), the pole-free form of the tail-exponent
// constant a t b^c c Gamma(-c-1); equals a t at c = 0.
double tail_constant(const AtsParams& p);

}  // namespace ats::detail
