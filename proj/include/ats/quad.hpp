#pragma once

#include <functional>

namespace ats::quad {

// Adaptive Gauss-Kronrod quadrature.  Subdivision is worst-error-first and
// fully deterministic: identical inputs produce bit-identical results.
struct QuadConfig {
    enum class Rule { GK15, GK21, GK61 };
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 200;
    Rule rule = Rule::GK21;
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    // Estimate of int |f|, the natural scale against which roundoff-limited
    // error estimates should be judged for strongly cancelling integrands.
    double abs_integral = 0.0;
    int subdivisions_used = 0;
    bool converged = false;
};

using Integrand = std::function<double(double)>;

// Integral over (lo, hi).  Open-rule behaviour: the endpoints are never
// evaluated (all Kronrod abscissae are interior), so integrable endpoint
// singularities are tolerated.  NaN or infinity from the integrand throws
// std::runtime_error.
QuadResult integrate_finite(const Integrand& f, double lo, double hi,
                            const QuadConfig& cfg = {});

// Integral over (lo, inf) via the rational map u = lo + s/(1-s), s in (0,1).
// The integrand must decay fast enough for the mapped integrand to stay
// bounded (exponential or better is safe).
QuadResult integrate_semi_infinite(const Integrand& f, double lo,
                                   const QuadConfig& cfg = {});

// Brent root bracketing on [lo, hi]; requires f(lo) and f(hi) of opposite
// sign (throws std::invalid_argument otherwise).  Stops once the bracket is
// narrower than tol.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-12);

}  // namespace ats::quad
