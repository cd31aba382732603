#pragma once

#include <complex>
#include <istream>
#include <vector>

#include "ats/params.hpp"

namespace ats {

// Gaussian mixture H_t = kappa t + mu Lambda_t + sigma W_{Lambda_t}: Brownian
// motion with drift run on the running-average subordinator clock Lambda.
// base.t is the default horizon; pricing routines override it with each
// quote's maturity.
struct MixtureParams {
    double kappa = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    AtsParams base;

    // Throws std::invalid_argument unless sigma > 0, base validates, and
    // E e^{H_t} is finite, i.e. u = -1 lies inside the strip
    // ((mu - s)/sigma^2, (mu + s)/sigma^2), s = sqrt(mu^2 + 2 b sigma^2);
    // equivalently mu + sigma^2/2 < b.
    void validate() const;
};

struct OptionQuote {
    double strike = 0.0;
    double maturity = 0.0;  // years
    double market_price = 0.0;
    bool is_call = true;
};

struct MarketContext {
    double spot = 0.0;
    double rate = 0.0;
    double dividend_yield = 0.0;
};

// Laplace transform E exp(-u H_t) = e^{-kappa t u} laplace_ats(mu u - sigma^2 u^2/2).
// The characteristic function of H_t is laplace_mixture(mp, -i v), v real.
std::complex<double> laplace_mixture(const MixtureParams& mp, std::complex<double> u);

// Real-argument form; throws std::domain_error outside the strip.
double laplace_mixture(const MixtureParams& mp, double u);

// Density of H_t at x, by the definite-integral representation over (0,1)
// whose weight exp((mu z - |z| sqrt(mu^2 + 2 b sigma^2 / y)) / sigma^2),
// z = x - kappa t, damps the oscillatory kernel superexponentially as y -> 0.
// At z = 0 that damping vanishes and the representation stops being
// absolutely convergent; in a small neighbourhood of z = 0 the density is
// recovered instead from the mixture integral over the subordinator's value.
double pdf_mixture(const MixtureParams& mp, double x);

// In-the-money probabilities of a European call under the mean-corrected
// exponential model log S_T = log(S0 / E e^{H_T}) + H_T:
//   p_star  = P{S_T > K}                      (risk-neutral measure)
//   p_breve = E[S_T 1{S_T > K}] / E[S_T]      (share measure)
struct ItmProbabilities {
    double p_star = 0.0;
    double p_breve = 0.0;
};

// Alternative route to the same probabilities: integrate the density
// representation in closed form over the exercise region.  The inner integral
// over the payoff variable has an exponential-linear antiderivative on either
// side of the drift point, so the route is evaluated piecewise in the sign of
// z0 = log(K Ee^H / S0) - kappa t (complement taken when z0 < 0, keeping the
// remaining contour integral absolutely convergent).  Used as a cross-check
// of the Fourier inversion; requires z0 != 0.
ItmProbabilities itm_probabilities_by_density(const MixtureParams& mp,
                                              const MarketContext& mkt,
                                              double strike, double maturity);

// Fourier inversion p = 1/2 + (1/pi) int_0^inf Im[e^{ium} g(u)]/u du with
// m = log(S0 / (K E e^{H_T})), g(u) = E e^{iuH} for p_star and
// E e^{(iu+1)H} / E e^{H} for p_breve; upper limit extended by octaves until
// the last octave contributes < 1e-10 relative.  Results clamped to [0,1]
// against quadrature noise.
ItmProbabilities itm_probabilities(const MixtureParams& mp, const MarketContext& mkt,
                                   double strike, double maturity);

// Discounted European price: call = S0 e^{-qT} p_breve - K e^{-rT} p_star,
// put from put-call parity.  Values below the no-arbitrage lower bound by
// more than quadrature noise throw std::runtime_error; within noise they
// clamp to the bound.
double price_european(const MixtureParams& mp, const MarketContext& mkt,
                      const OptionQuote& quote);

// Average relative pricing error (1/N) sum |model - market| / market.
double arpe_of(const MixtureParams& mp, const MarketContext& mkt,
               const std::vector<OptionQuote>& quotes);

struct CalibrationSeed {
    double a = 1.0;
    double b = 1.0;
    double mu = 0.0;
    double sigma = 1.0;
};

struct CalibrationResult {
    MixtureParams params;
    double arpe = 0.0;
};

// Fits (a, b, mu, sigma) with c fixed and kappa = 0 by Nelder-Mead on the
// ARPE objective in (log a, log b, mu, log sigma), from four built-in starts
// plus any extra seeds; strip violations and pricing failures incur a large
// penalty.  Throws std::runtime_error if every start fails.
CalibrationResult calibrate(const std::vector<OptionQuote>& quotes,
                            const MarketContext& mkt, double c_fixed,
                            const std::vector<CalibrationSeed>& extra_seeds = {});

// CSV with header strike,maturity_days,price,type (type C or P); maturities
// are converted to years (/365).  Malformed rows throw std::runtime_error
// naming the line number.
std::vector<OptionQuote> parse_quotes_csv(std::istream& in);

}  // namespace ats
