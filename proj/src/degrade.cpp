#include "ats/degrade.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ats/detail/oscillatory.hpp"
#include "ats/dist.hpp"
#include "ats/quad.hpp"

namespace ats {

namespace {

using detail::kPi;

double digamma(double x) {
    double r = 0.0;
    while (x < 6.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    return r + std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12.0 -
                   inv2 * (1.0 / 120.0 -
                           inv2 * (1.0 / 252.0 -
                                   inv2 * (1.0 / 240.0 - inv2 / 132.0))));
}

// Regularized lower incomplete gamma P(s, x): series for x < s + 1,
// Lentz continued fraction for the complement otherwise.
double igamma_p(double s, double x) {
    if (!(s > 0.0)) throw std::invalid_argument("igamma_p: s must be > 0");
    if (x <= 0.0) return 0.0;
    const double log_front = -x + s * std::log(x) - std::lgamma(s);
    if (x < s + 1.0) {
        double term = 1.0 / s, sum = term;
        for (int k = 1; k < 10000; ++k) {
            term *= x / (s + k);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(log_front);
    }
    const double tiny = 1e-300;
    double bb = x + 1.0 - s, cc = 1.0 / tiny, dd = 1.0 / bb, h = dd;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        bb += 2.0;
        dd = an * dd + bb;
        if (std::abs(dd) < tiny) dd = tiny;
        cc = bb + an / cc;
        if (std::abs(cc) < tiny) cc = tiny;
        dd = 1.0 / dd;
        const double delta = dd * cc;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(log_front) * h;
}

struct LogLik {
    const std::vector<double>* xi;
    const std::vector<double>* dts;
    bool ig;

    // Log-likelihood and its gradient in (log a, log b).
    double eval(double a, double b, double& g_loga, double& g_logb) const {
        double loglik = 0.0, ga = 0.0, gb = 0.0;
        if (!ig) {
            const double logb = std::log(b);
            for (std::size_t i = 0; i < xi->size(); ++i) {
                const double s = a * (*dts)[i], x = (*xi)[i], lx = std::log(x);
                loglik += s * logb + (s - 1.0) * lx - b * x - std::lgamma(s);
                ga += (*dts)[i] * (logb + lx - digamma(s));
                gb += s / b - x;
            }
        } else {
            const double sqpb = std::sqrt(kPi * b);
            for (std::size_t i = 0; i < xi->size(); ++i) {
                const double s = a * (*dts)[i], x = (*xi)[i];
                loglik += std::log(s) - 1.5 * std::log(x) - b * x + 2.0 * s * sqpb -
                          kPi * s * s / x;
                ga += 1.0 / a + 2.0 * (*dts)[i] * sqpb - 2.0 * kPi * s * (*dts)[i] / x;
                gb += -x + s * std::sqrt(kPi / b);
            }
        }
        g_loga = a * ga;
        g_logb = b * gb;
        return loglik;
    }
};

struct BfgsResult {
    double a = 0.0, b = 0.0, loglik = 0.0, grad_norm = 0.0;
    bool converged = false;
};

BfgsResult bfgs_maximize(const LogLik& ll, double a0, double b0) {
    double th[2] = {std::log(a0), std::log(b0)};
    double g[2];  // gradient of -loglik
    double L = ll.eval(a0, b0, g[0], g[1]);
    g[0] = -g[0];
    g[1] = -g[1];
    double H[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
    BfgsResult out;
    for (int it = 0; it < 300; ++it) {
        const double gnorm = std::max(std::abs(g[0]), std::abs(g[1]));
        if (gnorm <= 1e-10 * std::max(1.0, std::abs(L))) {
            out.converged = true;
            break;
        }
        double d[2] = {-(H[0][0] * g[0] + H[0][1] * g[1]),
                       -(H[1][0] * g[0] + H[1][1] * g[1])};
        double gd = g[0] * d[0] + g[1] * d[1];
        if (!(gd < 0.0)) {
            H[0][0] = H[1][1] = 1.0;
            H[0][1] = H[1][0] = 0.0;
            d[0] = -g[0];
            d[1] = -g[1];
            gd = -(g[0] * g[0] + g[1] * g[1]);
        }
        double step = 1.0, thn[2], gn[2], Ln = L;
        bool ls_ok = false;
        for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
            thn[0] = th[0] + step * d[0];
            thn[1] = th[1] + step * d[1];
            if (std::abs(thn[0]) > 50.0 || std::abs(thn[1]) > 50.0) continue;
            double ga, gb;
            Ln = ll.eval(std::exp(thn[0]), std::exp(thn[1]), ga, gb);
            if (std::isfinite(Ln) && -Ln <= -L + 1e-4 * step * gd) {
                gn[0] = -ga;
                gn[1] = -gb;
                ls_ok = true;
                break;
            }
        }
        if (!ls_ok) break;
        const double s[2] = {thn[0] - th[0], thn[1] - th[1]};
        const double y[2] = {gn[0] - g[0], gn[1] - g[1]};
        const double sy = s[0] * y[0] + s[1] * y[1];
        if (sy > 1e-14) {
            const double rho = 1.0 / sy;
            const double Hy[2] = {H[0][0] * y[0] + H[0][1] * y[1],
                                  H[1][0] * y[0] + H[1][1] * y[1]};
            const double yHy = y[0] * Hy[0] + y[1] * Hy[1];
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    H[i][j] += (1.0 + rho * yHy) * rho * s[i] * s[j] -
                               rho * (s[i] * Hy[j] + Hy[i] * s[j]);
        }
        th[0] = thn[0];
        th[1] = thn[1];
        g[0] = gn[0];
        g[1] = gn[1];
        L = Ln;
    }
    out.a = std::exp(th[0]);
    out.b = std::exp(th[1]);
    out.loglik = L;
    out.grad_norm = std::max(std::abs(g[0]), std::abs(g[1]));
    return out;
}

std::string trim(const std::string& s) {
    std::size_t lo = 0, hi = s.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
    return s.substr(lo, hi - lo);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_number(const std::string& s, int lineno, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("degradation csv line " + std::to_string(lineno) +
                                 ": cannot parse " + what + " '" + s + "'");
    }
}

[[noreturn]] void csv_error(int lineno, const std::string& msg) {
    throw std::runtime_error("degradation csv line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

void DegradationSeries::validate() const {
    if (times.size() != readings.size())
        throw std::invalid_argument("DegradationSeries: times/readings length mismatch");
    if (times.size() < 2)
        throw std::invalid_argument("DegradationSeries: need at least one observation");
    if (times.front() != 0.0 || readings.front() != 0.0)
        throw std::invalid_argument("DegradationSeries: series must start at (0, 0)");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("DegradationSeries: times must be strictly increasing");
    for (double r : readings)
        if (r < 0.0)
            throw std::invalid_argument("DegradationSeries: readings must be nonnegative");
}

std::vector<DegradationSeries> parse_degradation_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) csv_error(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv(line);
    const bool has_temp = header.size() == 4;
    if (!(header.size() == 3 || has_temp) || header[0] != "unit_id" ||
        header[1] != "time" || header[2] != "reading" ||
        (has_temp && header[3] != "temperature"))
        csv_error(1, "expected header unit_id,time,reading[,temperature]");

    std::vector<DegradationSeries> out;
    std::map<std::string, std::size_t> index;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> f = split_csv(line);
        if (f.size() != header.size())
            csv_error(lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(f.size()));
        if (f[0].empty()) csv_error(lineno, "empty unit_id");
        const double t = parse_number(f[1], lineno, "time");
        const double r = parse_number(f[2], lineno, "reading");
        if (t < 0.0) csv_error(lineno, "time must be nonnegative");
        if (r < 0.0) csv_error(lineno, "reading must be nonnegative");

        auto it = index.find(f[0]);
        if (it == index.end()) {
            it = index.emplace(f[0], out.size()).first;
            DegradationSeries s;
            s.unit_id = f[0];
            if (has_temp) s.temperature_label = f[3];
            if (t > 0.0) {
                s.times.push_back(0.0);
                s.readings.push_back(0.0);
            } else if (r != 0.0) {
                csv_error(lineno, "reading at time 0 must be 0");
            }
            out.push_back(std::move(s));
        }
        DegradationSeries& s = out[it->second];
        if (!s.times.empty() && !(t > s.times.back()))
            csv_error(lineno, "times must be strictly increasing within unit '" + f[0] + "'");
        s.times.push_back(t);
        s.readings.push_back(r);
    }
    for (const DegradationSeries& s : out) s.validate();
    return out;
}

std::string model_name(DegradeModel m) {
    switch (m) {
        case DegradeModel::GammaIncrements: return "gamma";
        case DegradeModel::AvgGamma: return "ag";
        case DegradeModel::AvgIg: return "aig";
    }
    throw std::logic_error("model_name: bad enum");
}

DegradeModel model_from_name(const std::string& s) {
    if (s == "gamma") return DegradeModel::GammaIncrements;
    if (s == "ag") return DegradeModel::AvgGamma;
    if (s == "aig") return DegradeModel::AvgIg;
    throw std::invalid_argument("unknown degradation model '" + s +
                                "' (expected gamma, ag, or aig)");
}

void BarrierSpec::validate() const {
    if (!(initial_condition > 0.0) || !(alert_level > 0.0) ||
        !(alert_level < initial_condition))
        throw std::invalid_argument("BarrierSpec: need 0 < alert_level < initial_condition");
}

TransformResult transform_series(const DegradationSeries& s) {
    s.validate();
    if (s.times.size() < 4)
        throw std::invalid_argument(
            "transform_series: need at least 3 observations after time 0");
    const std::size_t m_count = s.times.size() - 1;
    std::vector<double> level(m_count + 1, 0.0);
    for (std::size_t m = 1; m <= m_count; ++m)
        level[m] = (s.times[m] * s.readings[m] - s.times[m - 1] * s.readings[m - 1]) /
                   (s.times[m] - s.times[m - 1]);
    TransformResult tr;
    tr.first_average = s.readings[1];
    for (std::size_t m = 2; m <= m_count; ++m) {
        const double inc = level[m] - level[m - 1];
        tr.increments.push_back(inc);
        tr.dts.push_back(s.times[m] - s.times[m - 1]);
        if (!(inc > 0.0)) tr.usable = false;
    }
    return tr;
}

FitResult fit_mle(const std::vector<double>& increments,
                  const std::vector<double>& dts, DegradeModel model) {
    if (increments.size() != dts.size())
        throw std::invalid_argument("fit_mle: increments/dts length mismatch");
    if (increments.size() < 2)
        throw std::invalid_argument("fit_mle: need at least 2 increments for 2 parameters");
    double sum_x = 0.0, sum_dt = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        if (!(increments[i] > 0.0))
            throw std::invalid_argument("fit_mle: increments must be positive");
        if (!(dts[i] > 0.0)) throw std::invalid_argument("fit_mle: dts must be positive");
        sum_x += increments[i];
        sum_dt += dts[i];
    }
    const bool ig = model == DegradeModel::AvgIg;
    const double rate = sum_x / sum_dt;
    double var_rate = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        const double dev = increments[i] - rate * dts[i];
        var_rate += dev * dev;
    }
    var_rate /= sum_dt;
    double a0, b0;
    if (var_rate > 0.0) {
        if (!ig) {
            b0 = rate / var_rate;
            a0 = rate * b0;
        } else {
            b0 = rate / (2.0 * var_rate);
            a0 = rate * std::sqrt(b0 / kPi);
        }
    } else {
        b0 = 1.0;
        a0 = ig ? rate / std::sqrt(kPi) : rate;
    }

    const LogLik ll{&increments, &dts, ig};
    const double factors[4][2] = {{1.0, 1.0}, {1.6, 0.6}, {0.5, 1.8}, {2.5, 2.5}};
    BfgsResult best;
    bool have = false;
    std::string trace;
    for (const auto& f : factors) {
        const BfgsResult r = bfgs_maximize(ll, a0 * f[0], b0 * f[1]);
        trace += "start (" + std::to_string(a0 * f[0]) + ", " + std::to_string(b0 * f[1]) +
                 ") -> grad_norm " + std::to_string(r.grad_norm) +
                 (r.converged ? " converged; " : " not converged; ");
        if (r.converged && (!have || r.loglik > best.loglik)) {
            best = r;
            have = true;
        }
    }
    if (!have)
        throw std::runtime_error("fit_mle: no start converged: " + trace);
    FitResult out;
    out.model = model;
    out.a_hat = best.a;
    out.b_hat = best.b;
    out.log_likelihood = best.loglik;
    out.aic = 4.0 - 2.0 * best.loglik;
    out.usable = true;
    return out;
}

double survival_probability(const AtsParams& p, const BarrierSpec& barrier, double T) {
    barrier.validate();
    if (!(T > 0.0)) throw std::invalid_argument("survival_probability: T must be > 0");
    return cdf(AtsParams{p.a, p.b, p.c, T}, barrier.headroom());
}

double expected_condition(const AtsParams& p, const BarrierSpec& barrier, double T) {
    barrier.validate();
    if (!(T > 0.0)) throw std::invalid_argument("expected_condition: T must be > 0");
    const AtsParams q{p.a, p.b, p.c, T};
    q.validate();
    const double level = barrier.initial_condition;
    // E max(l - X, 0) = (l - E X) + E max(X - l, 0); the stop-loss term is the
    // integrated survival function, whose kernel weight e^{-b l / y} keeps the
    // integrand absolutely convergent for every c.
    const detail::Kernel k = detail::Kernel::make(q);
    const detail::ShiftedIntegral si = detail::integrate_oscillatory(
        detail::kernel_exponent(k, q.b * level, 0.0), detail::kernel_phase(k));
    const double is = si.shifted.value;
    const double es = si.shifted.error_estimate;
    double stop_loss = 0.0;
    if (is < -10.0 * es)
        throw std::runtime_error("expected_condition: integral negative beyond noise");
    if (is > 10.0 * es)
        stop_loss = std::exp(k.neg_k0 + si.log_scale + std::log(is)) / (kPi * q.b);
    return std::max(0.0, level - detail::mean_of(q) + stop_loss);
}

double median_lifetime(const AtsParams& p, const BarrierSpec& barrier) {
    barrier.validate();
    p.validate();
    const double h = barrier.headroom();
    const double t0 =
        2.0 * h * std::pow(p.b, 1.0 - p.c) / (p.a * std::tgamma(1.0 - p.c));
    // The running average is pathwise nondecreasing in T, so F_{X~_T}(h) is
    // nonincreasing in T and the bracket can expand geometrically from the
    // mean-matching horizon.  Far above the root the distribution integral
    // can drown in cancellation and throws; there F(h) is already far below
    // 1/2, so the evaluation maps to a negative sign.
    auto f = [&](double T) {
        try {
            return cdf(AtsParams{p.a, p.b, p.c, T}, h) - 0.5;
        } catch (const std::runtime_error&) {
            return -0.5;
        }
    };
    double lo = t0, hi = t0;
    double flo = f(lo), fhi = flo;
    int budget = 60;
    while (flo < 0.0 && budget-- > 0) {
        hi = lo;
        fhi = flo;
        lo /= 2.0;
        flo = f(lo);
    }
    while (fhi > 0.0 && budget-- > 0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi);
    }
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!(flo > 0.0 && fhi < 0.0))
        throw std::runtime_error("median_lifetime: failed to bracket the root");
    return quad::find_root(f, lo, hi);
}

std::vector<ReportRow> batch_report(const std::vector<DegradationSeries>& data,
                                    const BarrierSpec& barrier, double T,
                                    const std::vector<DegradeModel>& models) {
    barrier.validate();
    if (!(T > 0.0)) throw std::invalid_argument("batch_report: T must be > 0");
    std::vector<ReportRow> rows;
    for (const DegradationSeries& s : data) {
        for (DegradeModel model : models) {
            ReportRow row;
            row.unit_id = s.unit_id;
            row.model = model;
            try {
                std::vector<double> incs, dts;
                double horizon = T, head = barrier.headroom();
                if (model == DegradeModel::GammaIncrements) {
                    for (std::size_t m = 1; m < s.times.size(); ++m) {
                        incs.push_back(s.readings[m] - s.readings[m - 1]);
                        dts.push_back(s.times[m] - s.times[m - 1]);
                    }
                } else {
                    const TransformResult tr = transform_series(s);
                    if (!tr.usable) {
                        rows.push_back(row);
                        continue;
                    }
                    incs = tr.increments;
                    dts = tr.dts;
                    horizon = T - s.times[1];
                    head -= tr.first_average;
                    if (!(horizon > 0.0))
                        throw std::invalid_argument(
                            "batch_report: horizon does not reach past the first inspection");
                }
                bool positive = true;
                for (double v : incs)
                    if (!(v > 0.0)) positive = false;
                if (!positive) {
                    rows.push_back(row);
                    continue;
                }
                const FitResult fit = fit_mle(incs, dts, model);
                row.a_hat = fit.a_hat;
                row.b_hat = fit.b_hat;
                row.aic = fit.aic;
                if (model == DegradeModel::GammaIncrements) {
                    row.survival = igamma_p(fit.a_hat * horizon, fit.b_hat * head);
                } else if (head <= 0.0) {
                    row.survival = 0.0;
                } else {
                    const double c = model == DegradeModel::AvgIg ? 0.5 : 0.0;
                    row.survival = cdf(AtsParams{fit.a_hat, fit.b_hat, c, horizon}, head);
                }
                row.usable = true;
            } catch (const std::exception&) {
                row.usable = false;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace ats
