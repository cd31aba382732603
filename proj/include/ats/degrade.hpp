#pragma once

#include <istream>
#include <string>
#include <vector>

#include "ats/params.hpp"

namespace ats {

// One inspected unit: cumulative degradation readings on a strictly
// increasing time grid anchored at (0, 0).
struct DegradationSeries {
    std::string unit_id;
    std::vector<double> times;
    std::vector<double> readings;
    std::string temperature_label;  // optional metadata column

    void validate() const;  // throws std::invalid_argument
};

// CSV with header unit_id,time,reading[,temperature].  Rows group by unit in
// file order; a unit whose first row has time > 0 gets the (0, 0) anchor
// prepended.  Malformed rows throw std::runtime_error naming the line.
std::vector<DegradationSeries> parse_degradation_csv(std::istream& in);

// GammaIncrements: gamma process fitted to raw first differences of the
// readings.  AvgGamma / AvgIg: gamma (c = 0) or inverse Gaussian (c = 1/2)
// law fitted to the transformed increments of transform_series.
enum class DegradeModel { GammaIncrements, AvgGamma, AvgIg };

std::string model_name(DegradeModel m);              // gamma / ag / aig
DegradeModel model_from_name(const std::string& s);  // throws on unknown

struct FitResult {
    DegradeModel model = DegradeModel::GammaIncrements;
    double a_hat = 0.0;
    double b_hat = 0.0;
    double log_likelihood = 0.0;
    double aic = 0.0;  // 4 - 2 log_likelihood
    bool usable = false;
};

// Failure barrier: condition starts at initial_condition (l) and the unit is
// dead once cumulative degradation exceeds the headroom l - alert_level.
struct BarrierSpec {
    double initial_condition = 0.0;
    double alert_level = 0.0;

    void validate() const;  // requires 0 < alert_level < initial_condition
    double headroom() const { return initial_condition - alert_level; }
};

// De-averaging of readings observed as running averages: recovers the
// underlying level at each time by differencing time * reading, then takes
// increments from the second observation on (the first has the averaged,
// not the incremental, law).  usable flips to false if any increment <= 0.
struct TransformResult {
    std::vector<double> increments;  // m = 2..M
    std::vector<double> dts;         // matching t_m - t_{m-1}
    double first_average = 0.0;      // reading at t_1
    bool usable = true;
};

TransformResult transform_series(const DegradationSeries& s);

// Maximizes the increment log-likelihood over (a, b) with the model's c
// fixed, by BFGS in (log a, log b) from a moment-matched start plus three
// perturbations.  Throws std::runtime_error with a per-start trace if no
// start converges; std::invalid_argument on fewer than 2 increments or
// nonpositive data.
FitResult fit_mle(const std::vector<double>& increments,
                  const std::vector<double>& dts, DegradeModel model);

// P{barrier not crossed by T} = F_{X~_T}(headroom); p.t is replaced by T.
double survival_probability(const AtsParams& p, const BarrierSpec& barrier, double T);

// E[max(l - X~_T, 0)], the mean remaining condition at T: evaluated as
// (l - mean) plus the stop-loss integral, an absolutely convergent form of
// the defining l F(l) - int_0^l x f(x) dx.
double expected_condition(const AtsParams& p, const BarrierSpec& barrier, double T);

// Root T of F_{X~_T}(headroom) = 1/2.  F is nonincreasing in T (the running
// average is pathwise nondecreasing), so the bracket expands geometrically
// from the mean-matching horizon until the sign flips.
double median_lifetime(const AtsParams& p, const BarrierSpec& barrier);

struct ReportRow {
    std::string unit_id;
    DegradeModel model = DegradeModel::GammaIncrements;
    double a_hat = 0.0;
    double b_hat = 0.0;
    double aic = 0.0;
    double survival = 0.0;
    bool usable = false;
};

// Fits every requested model to every unit and attaches the survival
// probability at horizon T.  The average models use the post-first-inspection
// window: horizon T - t_1 and headroom reduced by the first reading; the raw
// gamma model uses the full horizon.  Unusable fits yield usable = false rows
// rather than aborting the batch.
std::vector<ReportRow> batch_report(const std::vector<DegradationSeries>& data,
                                    const BarrierSpec& barrier, double T,
                                    const std::vector<DegradeModel>& models);

}  // namespace ats
