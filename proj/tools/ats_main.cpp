#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ats/degrade.hpp"
#include "ats/dist.hpp"
#include "ats/moments.hpp"
#include "ats/params.hpp"
#include "ats/pricing.hpp"
#include "ats/quad.hpp"
#include "ats/selftest.hpp"
#include "ats/sim.hpp"

namespace {

using nlohmann::ordered_json;

struct GridSpec {
    std::string spec;
    int points = 0;
};

std::vector<double> parse_grid(const GridSpec& g, const char* flag) {
    const auto dots = g.spec.find("..");
    auto to_num = [&](const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != s.size())
            throw std::runtime_error(std::string(flag) + ": cannot parse number '" + s + "'");
        return v;
    };
    if (dots == std::string::npos) return {to_num(g.spec)};
    const double lo = to_num(g.spec.substr(0, dots));
    const double hi = to_num(g.spec.substr(dots + 2));
    if (!(hi > lo))
        throw std::runtime_error(std::string(flag) + ": range needs lo < hi, got '" +
                                 g.spec + "'");
    const int n = std::max(2, g.points);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

std::ostream& value_stream() {
    std::cout << std::setprecision(17);
    return std::cout;
}

void emit_columns(bool as_json, const std::vector<std::string>& names,
                  const std::vector<std::vector<double>>& columns) {
    if (as_json) {
        ordered_json j;
        for (std::size_t c = 0; c < names.size(); ++c) j[names[c]] = columns[c];
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ostream& os = value_stream();
    for (std::size_t c = 0; c < names.size(); ++c)
        os << (c ? "," : "") << names[c];
    os << "\n";
    for (std::size_t r = 0; r < columns.front().size(); ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << (c ? "," : "") << columns[c][r];
        os << "\n";
    }
}

std::string rational_str(const ats::Rational& r) {
    std::string s = std::to_string(r.num);
    if (r.den != 1) s += "/" + std::to_string(r.den);
    return s;
}

bool rational_shape(double shape, ats::Rational& out) {
    for (long long den = 1; den <= 64; ++den) {
        const double scaled = shape * static_cast<double>(den);
        const double num = std::round(scaled);
        if (std::abs(scaled - num) < 1e-12 && std::abs(num) < 1e15) {
            out.num = static_cast<long long>(num);
            out.den = den;
            return true;
        }
    }
    return false;
}

unsigned long long default_seed() {
    if (const char* env = std::getenv("ATS_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::runtime_error(std::string("ATS_SEED is not an integer: ") + env);
        }
    }
    return 12345ull;
}

std::vector<std::string> inject_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config file " + path + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        const std::string flag = "--" + key;
        const bool present = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (present) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else {
            args.push_back(flag);
            args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    return args;
}

struct DistFlags {
    double a = 1.0, b = 1.0, c = 0.0, t = 1.0;
    ats::AtsParams params() const { return {a, b, c, t}; }
};

void emit_table1(bool as_json) {
    using ats::AtsParams;
    const double shapes[] = {0.5, 1.0, 1.5, 2.0};
    ordered_json rows = ordered_json::array();
    std::ostringstream csv;
    csv << std::setprecision(17) << "a,c,M0,M1,M2,M3,M4,M5\n";
    for (double a : shapes) {
        ats::Rational shape;
        rational_shape(a, shape);
        const std::vector<ats::Rational> m = ats::gamma_moments_rational(shape, 5);
        ordered_json row;
        row["a"] = a;
        row["c"] = 0.0;
        csv << a << ",0";
        for (int n = 0; n <= 5; ++n) {
            const std::string s = rational_str(m[static_cast<std::size_t>(n)]);
            row["M" + std::to_string(n)] = s;
            csv << "," << s;
        }
        csv << "\n";
        rows.push_back(row);
    }
    for (double a : shapes) {
        const AtsParams p{a, 1.0, 0.5, 1.0};
        ordered_json row;
        row["a"] = a;
        row["c"] = 0.5;
        csv << a << ",0.5";
        for (int n = 0; n <= 5; ++n) {
            const double v = ats::moment(p, n);
            row["M" + std::to_string(n)] = v;
            csv << "," << v;
        }
        csv << "\n";
        rows.push_back(row);
    }
    if (as_json)
        std::cout << rows.dump(2) << "\n";
    else
        std::cout << csv.str();
}

void emit_moments(const ats::AtsParams& p, int n_max, bool as_json) {
    std::vector<double> ns, values;
    for (int n = 0; n <= n_max; ++n) {
        ns.push_back(n);
        values.push_back(ats::moment(p, n));
    }
    ats::Rational shape;
    const bool exact = p.c == 0.0 && p.b == 1.0 && n_max <= 12 &&
                       rational_shape(p.effective_shape(), shape);
    std::vector<std::string> exact_strs;
    if (exact) {
        const std::vector<ats::Rational> m = ats::gamma_moments_rational(shape, n_max);
        for (const ats::Rational& r : m) exact_strs.push_back(rational_str(r));
    }
    if (as_json) {
        ordered_json j;
        j["n"] = ns;
        j["moment"] = values;
        if (exact) j["exact"] = exact_strs;
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ostream& os = value_stream();
    os << "n,moment" << (exact ? ",exact" : "") << "\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
        os << static_cast<int>(ns[i]) << "," << values[i];
        if (exact) os << "," << exact_strs[i];
        os << "\n";
    }
}

void emit_named_values(bool as_json,
                       const std::vector<std::pair<std::string, double>>& rows) {
    if (as_json) {
        ordered_json j;
        for (const auto& [k, v] : rows) j[k] = v;
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ostream& os = value_stream();
    os << "statistic,value\n";
    for (const auto& [k, v] : rows) os << k << "," << v << "\n";
}

int run(std::vector<std::string> args) {
    CLI::App app{"average-tempered-stable distribution toolkit"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "emit JSON instead of CSV");
    std::string config_path;
    app.add_option("--config", config_path, "JSON file supplying default flags");
    int rc = 0;

    // ---- dist ----------------------------------------------------------
    auto* dist = app.add_subcommand("dist", "distribution evaluations")->fallthrough();
    dist->require_subcommand(1);
    auto df = std::make_shared<DistFlags>();
    dist->add_option("--a", df->a, "jump intensity scale a > 0")->capture_default_str();
    dist->add_option("--b", df->b, "tempering rate b > 0")->capture_default_str();
    dist->add_option("--c", df->c, "stability index c in [0,1)")->capture_default_str();
    dist->add_option("--t", df->t, "horizon t")->capture_default_str();

    auto add_grid = [](CLI::App* cmd, GridSpec* g, const char* flag, const char* what,
                       std::string dflt, int dflt_points) {
        g->spec = std::move(dflt);
        g->points = dflt_points;
        cmd->add_option(flag, g->spec, what)->capture_default_str();
        cmd->add_option("--points", g->points, "grid size for range specs")
            ->capture_default_str();
    };

    {
        auto* sub = dist->add_subcommand("pdf", "density on a grid")->fallthrough();
        auto grid = std::make_shared<GridSpec>();
        add_grid(sub, grid.get(), "--x", "evaluation points, value or lo..hi", "0.05..5", 200);
        sub->callback([df, grid, &as_json] {
            const ats::AtsParams p = df->params();
            std::vector<double> xs = parse_grid(*grid, "--x"), vals;
            for (double x : xs) vals.push_back(ats::pdf(p, x));
            emit_columns(as_json, {"x", "pdf"}, {xs, vals});
        });
    }
    {
        auto* sub = dist->add_subcommand("cdf", "distribution function on a grid")
                        ->fallthrough();
        auto grid = std::make_shared<GridSpec>();
        add_grid(sub, grid.get(), "--x", "evaluation points, value or lo..hi", "0.05..5", 200);
        sub->callback([df, grid, &as_json] {
            const ats::AtsParams p = df->params();
            std::vector<double> xs = parse_grid(*grid, "--x"), vals;
            for (double x : xs) vals.push_back(ats::cdf(p, x));
            emit_columns(as_json, {"x", "cdf"}, {xs, vals});
        });
    }
    {
        auto* sub = dist->add_subcommand("mgf", "moment generating function E e^{uX}")
                        ->fallthrough();
        auto grid = std::make_shared<GridSpec>();
        add_grid(sub, grid.get(), "--u", "evaluation points, value or lo..hi (u < b)",
                 "-0.5..0.9", 50);
        sub->callback([df, grid, &as_json] {
            const ats::AtsParams p = df->params();
            std::vector<double> us = parse_grid(*grid, "--u"), vals;
            for (double u : us) vals.push_back(ats::laplace_ats(p, -u));
            emit_columns(as_json, {"u", "mgf"}, {us, vals});
        });
    }
    {
        auto* sub = dist->add_subcommand("moments", "raw moments M(0..n)")->fallthrough();
        auto n_max = std::make_shared<int>(5);
        auto table1 = std::make_shared<bool>(false);
        sub->add_option("--n", *n_max, "highest moment order")->capture_default_str();
        sub->add_flag("--table1", *table1,
                      "moment table for a in {1/2,1,3/2,2}, c in {0,1/2}, b = t = 1");
        sub->callback([df, n_max, table1, &as_json] {
            if (*table1)
                emit_table1(as_json);
            else
                emit_moments(df->params(), *n_max, as_json);
        });
    }
    {
        auto* sub = dist->add_subcommand("stats", "summary statistics and ratios")
                        ->fallthrough();
        sub->callback([df, &as_json] {
            const ats::SummaryStats s = ats::stats(df->params());
            emit_named_values(as_json,
                              {{"mean", s.mean},
                               {"variance", s.variance},
                               {"skewness", s.skewness},
                               {"excess_kurtosis", s.excess_kurtosis},
                               {"mean_ratio_to_ts", s.mean_ratio_to_ts},
                               {"variance_ratio_to_ts", s.variance_ratio_to_ts},
                               {"skewness_ratio_to_ts", s.skewness_ratio_to_ts},
                               {"kurtosis_ratio_to_ts", s.kurtosis_ratio_to_ts}});
        });
    }
    {
        auto* sub = dist->add_subcommand("mode", "mode of the density")->fallthrough();
        sub->callback([df, &as_json] {
            emit_named_values(as_json, {{"mode", ats::mode(df->params())}});
        });
    }
    {
        auto* sub = dist->add_subcommand("tails", "tail asymptotics of pdf and cdf")
                        ->fallthrough();
        auto grid = std::make_shared<GridSpec>();
        auto side = std::make_shared<std::string>("right");
        add_grid(sub, grid.get(), "--x", "evaluation points, value or lo..hi", "20..60", 5);
        sub->add_option("--side", *side, "right or left tail")
            ->check(CLI::IsMember({"right", "left"}))
            ->capture_default_str();
        sub->callback([df, grid, side, &as_json] {
            const ats::AtsParams p = df->params();
            const ats::TailRegime regime = *side == "right" ? ats::TailRegime::RightTail
                                                            : ats::TailRegime::LeftTail;
            std::vector<double> xs = parse_grid(*grid, "--x"), pdfs, cdfs;
            for (double x : xs) {
                pdfs.push_back((regime == ats::TailRegime::RightTail
                                    ? ats::pdf_right_tail(p, x)
                                    : ats::pdf_left_tail(p, x))
                                   .value);
                cdfs.push_back(ats::cdf_tails(p, x, regime).value);
            }
            emit_columns(as_json, {"x", "pdf_tail", "cdf_tail"}, {xs, pdfs, cdfs});
        });
    }

    // ---- sim -----------------------------------------------------------
    auto* sim = app.add_subcommand("sim", "path simulation")->fallthrough();
    struct SimFlags {
        std::string model = "avg";
        int n_paths = 100;
        int n_steps = 200;
        double horizon = 1.0;
        int bins = 100;
        double x_min = 1e-10;
        double x_max = 7.0 + 1e-10;
        std::string spacing = "log";
        unsigned long long seed = 0;
        double a = 1.0, b = 1.0, c = 0.0, t = 1.0;
        double kappa = 0.0, mu = 0.0, sigma = 1.0;
        bool figure7 = false;
    };
    auto sf = std::make_shared<SimFlags>();
    sf->seed = default_seed();
    sim->add_option("--model", sf->model, "ts | avg | lambda | mixture")
        ->check(CLI::IsMember({"ts", "avg", "lambda", "mixture"}))
        ->capture_default_str();
    sim->add_option("--n-paths", sf->n_paths, "number of paths")->capture_default_str();
    sim->add_option("--n-steps", sf->n_steps, "time steps")->capture_default_str();
    sim->add_option("--horizon", sf->horizon, "terminal time")->capture_default_str();
    sim->add_option("--bins", sf->bins, "jump-size bins (lambda/mixture)")
        ->capture_default_str();
    sim->add_option("--x-min", sf->x_min, "smallest retained jump size")
        ->capture_default_str();
    sim->add_option("--x-max", sf->x_max, "largest retained jump size")->capture_default_str();
    sim->add_option("--spacing", sf->spacing, "bin spacing: log | uniform")
        ->check(CLI::IsMember({"log", "uniform"}))
        ->capture_default_str();
    sim->add_option("--seed", sf->seed, "RNG seed (default from ATS_SEED)")
        ->capture_default_str();
    sim->add_option("--a", sf->a, "jump intensity scale")->capture_default_str();
    sim->add_option("--b", sf->b, "tempering rate")->capture_default_str();
    sim->add_option("--c", sf->c, "stability index")->capture_default_str();
    sim->add_option("--kappa", sf->kappa, "mixture drift per unit time")
        ->capture_default_str();
    sim->add_option("--mu", sf->mu, "mixture location loading")->capture_default_str();
    sim->add_option("--sigma", sf->sigma, "mixture volatility loading")
        ->capture_default_str();
    sim->add_flag("--figure7", sf->figure7,
                  "preset: 2000 steps, 100 uniform bins on [1e-10, 7+1e-10]");
    sim->callback([sf, &as_json] {
        SimFlags f = *sf;
        if (f.figure7) {
            f.n_steps = 2000;
            f.bins = 100;
            f.x_min = 1e-10;
            f.x_max = 7.0 + 1e-10;
            f.spacing = "uniform";
        }
        const ats::AtsParams p{f.a, f.b, f.c, f.horizon};
        const ats::PathGrid grid = ats::PathGrid::uniform(f.n_steps, f.horizon);
        ats::CpaConfig cfg;
        cfg.n_bins = f.bins;
        cfg.x_min = f.x_min;
        cfg.x_max = f.x_max;
        cfg.spacing =
            f.spacing == "log" ? ats::BinSpacing::Log : ats::BinSpacing::Uniform;
        std::vector<ats::SamplePath> paths;
        if (f.model == "ts" || f.model == "avg") {
            ats::EulerPaths ep = ats::euler_paths(
                p, grid, static_cast<std::size_t>(f.n_paths), f.seed);
            paths = f.model == "ts" ? std::move(ep.paths_x) : std::move(ep.paths_avg);
        } else if (f.model == "lambda") {
            paths = ats::cpa_lambda_paths(p, grid, cfg,
                                          static_cast<std::size_t>(f.n_paths), f.seed);
        } else {
            ats::MixtureParams mp;
            mp.base = p;
            mp.kappa = f.kappa;
            mp.mu = f.mu;
            mp.sigma = f.sigma;
            paths = ats::mixture_paths(mp, grid, cfg,
                                       static_cast<std::size_t>(f.n_paths), f.seed);
        }
        if (as_json)
            ats::paths_to_json(std::cout, paths);
        else
            ats::paths_to_csv(std::cout, paths);
    });

    // ---- degrade -------------------------------------------------------
    auto* degrade = app.add_subcommand("degrade", "degradation-data fitting")->fallthrough();
    degrade->require_subcommand(1);
    {
        auto* fit = degrade->add_subcommand("fit", "fit models and report survival")
                        ->fallthrough();
        struct FitFlags {
            std::string input;
            std::string models = "gamma,ag,aig";
            double barrier = 0.0;
            double horizon = 1.0;
        };
        auto ff = std::make_shared<FitFlags>();
        fit->add_option("--input", ff->input, "degradation CSV (unit_id,time,reading)")
            ->required();
        fit->add_option("--models", ff->models, "comma list of gamma, ag, aig")
            ->capture_default_str();
        fit->add_option("--barrier", ff->barrier, "alert level (headroom below start)")
            ->required();
        fit->add_option("--horizon", ff->horizon, "survival horizon T")
            ->capture_default_str();
        fit->callback([ff, &as_json, &rc] {
            std::ifstream in(ff->input);
            if (!in) throw std::runtime_error("cannot open " + ff->input);
            const std::vector<ats::DegradationSeries> data = ats::parse_degradation_csv(in);
            std::vector<ats::DegradeModel> models;
            std::stringstream ss(ff->models);
            for (std::string tok; std::getline(ss, tok, ',');)
                if (!tok.empty()) models.push_back(ats::model_from_name(tok));
            if (models.empty()) throw std::runtime_error("--models named no model");
            const ats::BarrierSpec barrier{2.0 * ff->barrier, ff->barrier};
            barrier.validate();
            const std::vector<ats::ReportRow> rows =
                ats::batch_report(data, barrier, ff->horizon, models);
            for (const ats::ReportRow& r : rows)
                if (!r.usable) {
                    std::cerr << "warning: unit " << r.unit_id << " model "
                              << ats::model_name(r.model) << " unusable\n";
                    rc = 1;
                }
            if (as_json) {
                ordered_json j = ordered_json::array();
                for (const ats::ReportRow& r : rows)
                    j.push_back({{"unit_id", r.unit_id},
                                 {"model", ats::model_name(r.model)},
                                 {"a_hat", r.a_hat},
                                 {"b_hat", r.b_hat},
                                 {"aic", r.aic},
                                 {"survival", r.survival},
                                 {"usable", r.usable}});
                std::cout << j.dump(2) << "\n";
            } else {
                std::ostream& os = value_stream();
                os << "unit_id,model,a_hat,b_hat,aic,survival,usable\n";
                for (const ats::ReportRow& r : rows)
                    os << r.unit_id << "," << ats::model_name(r.model) << "," << r.a_hat
                       << "," << r.b_hat << "," << r.aic << "," << r.survival << ","
                       << (r.usable ? "true" : "false") << "\n";
            }
        });
    }

    // ---- price ---------------------------------------------------------
    auto* price = app.add_subcommand("price", "option pricing and calibration")
                      ->fallthrough();
    price->require_subcommand(1);
    struct MarketFlags {
        double spot = 0.0, rate = 0.0, div_yield = 0.0;
    };
    auto mf = std::make_shared<MarketFlags>();
    price->add_option("--spot", mf->spot, "spot price S0")->required();
    price->add_option("--rate", mf->rate, "continuously compounded rate")
        ->capture_default_str();
    price->add_option("--div-yield", mf->div_yield, "continuous dividend yield")
        ->capture_default_str();
    {
        auto* quote = price->add_subcommand("quote", "price European options")
                          ->fallthrough();
        struct QuoteFlags {
            double a = 1.0, b = 1.0, c = 0.5;
            double kappa = 0.0, mu = 0.0, sigma = 1.0;
            std::string input;
            double strike = 0.0;
            double maturity_days = 0.0;
            std::string type = "C";
        };
        auto qf = std::make_shared<QuoteFlags>();
        quote->add_option("--a", qf->a, "jump intensity scale")->capture_default_str();
        quote->add_option("--b", qf->b, "tempering rate")->capture_default_str();
        quote->add_option("--c", qf->c, "stability index")->capture_default_str();
        quote->add_option("--kappa", qf->kappa, "drift per unit time")
            ->capture_default_str();
        quote->add_option("--mu", qf->mu, "location loading")->capture_default_str();
        quote->add_option("--sigma", qf->sigma, "volatility loading")
            ->capture_default_str();
        quote->add_option("--input", qf->input,
                          "quote CSV strike,maturity_days,price,type");
        quote->add_option("--strike", qf->strike, "single-quote strike");
        quote->add_option("--maturity-days", qf->maturity_days, "single-quote maturity");
        quote->add_option("--type", qf->type, "single-quote type C | P")
            ->check(CLI::IsMember({"C", "P"}))
            ->capture_default_str();
        quote->callback([qf, mf, &as_json, &rc] {
            ats::MixtureParams mp;
            mp.base = ats::AtsParams{qf->a, qf->b, qf->c, 1.0};
            mp.kappa = qf->kappa;
            mp.mu = qf->mu;
            mp.sigma = qf->sigma;
            const ats::MarketContext mkt{mf->spot, mf->rate, mf->div_yield};
            std::vector<ats::OptionQuote> quotes;
            bool batch = !qf->input.empty();
            if (batch) {
                std::ifstream in(qf->input);
                if (!in) throw std::runtime_error("cannot open " + qf->input);
                quotes = ats::parse_quotes_csv(in);
            } else {
                if (!(qf->strike > 0.0 && qf->maturity_days > 0.0))
                    throw std::runtime_error(
                        "need --input, or --strike with --maturity-days");
                quotes.push_back({qf->strike, qf->maturity_days / 365.0, 0.0,
                                  qf->type == "C"});
            }
            ordered_json j = ordered_json::array();
            std::ostringstream csv;
            csv << std::setprecision(17)
                << "strike,maturity_days,type,price"
                << (batch ? ",market_price,rel_err" : "") << "\n";
            for (std::size_t i = 0; i < quotes.size(); ++i) {
                const ats::OptionQuote& q = quotes[i];
                try {
                    const double v = ats::price_european(mp, mkt, q);
                    ordered_json row{{"strike", q.strike},
                                     {"maturity_days", q.maturity * 365.0},
                                     {"type", q.is_call ? "C" : "P"},
                                     {"price", v}};
                    csv << q.strike << "," << q.maturity * 365.0 << ","
                        << (q.is_call ? "C" : "P") << "," << v;
                    if (batch) {
                        const double rel = std::abs(v - q.market_price) / q.market_price;
                        row["market_price"] = q.market_price;
                        row["rel_err"] = rel;
                        csv << "," << q.market_price << "," << rel;
                    }
                    csv << "\n";
                    j.push_back(row);
                } catch (const std::exception& e) {
                    std::cerr << "error: quote " << (i + 1) << " (strike " << q.strike
                              << "): " << e.what() << "\n";
                    rc = 1;
                }
            }
            if (as_json)
                std::cout << j.dump(2) << "\n";
            else
                std::cout << csv.str();
        });
    }
    {
        auto* cal = price->add_subcommand("calibrate", "fit (a,b,mu,sigma) to quotes")
                        ->fallthrough();
        struct CalFlags {
            std::string input;
            double c = 0.5;
        };
        auto cf = std::make_shared<CalFlags>();
        cal->add_option("--input", cf->input, "quote CSV strike,maturity_days,price,type")
            ->required();
        cal->add_option("--c", cf->c, "fixed stability index")->capture_default_str();
        cal->callback([cf, mf, &rc] {
            std::ifstream in(cf->input);
            if (!in) throw std::runtime_error("cannot open " + cf->input);
            const std::vector<ats::OptionQuote> quotes = ats::parse_quotes_csv(in);
            const ats::MarketContext mkt{mf->spot, mf->rate, mf->div_yield};
            const ats::CalibrationResult res = ats::calibrate(quotes, mkt, cf->c);
            ordered_json j;
            j["params"] = {{"a", res.params.base.a},   {"b", res.params.base.b},
                           {"c", res.params.base.c},   {"mu", res.params.mu},
                           {"sigma", res.params.sigma}, {"kappa", res.params.kappa}};
            j["arpe"] = res.arpe;
            ordered_json per = ordered_json::array();
            for (const ats::OptionQuote& q : quotes) {
                ordered_json row{{"strike", q.strike},
                                 {"maturity", q.maturity},
                                 {"market_price", q.market_price}};
                try {
                    const double v = ats::price_european(res.params, mkt, q);
                    row["model_price"] = v;
                    row["rel_err"] = std::abs(v - q.market_price) / q.market_price;
                } catch (const std::exception& e) {
                    row["error"] = e.what();
                    rc = 1;
                }
                per.push_back(row);
            }
            j["per_quote"] = per;
            std::cout << j.dump(2) << "\n";
        });
    }

    // ---- selftest ------------------------------------------------------
    auto* selftest = app.add_subcommand("selftest", "run the invariant suites")
                         ->fallthrough();
    auto quick = std::make_shared<bool>(false);
    auto full = std::make_shared<bool>(false);
    CLI::Option* quick_opt = selftest->add_flag("--quick", *quick, "fast checks only");
    selftest->add_flag("--full", *full, "include Monte Carlo checks")
        ->excludes(quick_opt);
    selftest->callback([quick, full, &rc] {
        const std::vector<ats::CheckResult> results =
            *full ? ats::run_full() : ats::run_quick();
        (void)quick;
        std::size_t failures = 0;
        for (const ats::CheckResult& r : results) {
            if (!r.passed) ++failures;
            std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << std::left
                      << std::setw(34) << r.name << " max_deviation="
                      << std::setprecision(3) << std::scientific << r.max_deviation
                      << std::defaultfloat << "  " << r.detail << "\n";
        }
        std::cout << (failures == 0 ? "all checks passed" : "CHECKS FAILED") << " ("
                  << results.size() - failures << "/" << results.size() << ")\n";
        if (failures) rc = 1;
    });

    try {
        args = inject_config(std::move(args));
        std::vector<const char*> argv;
        argv.push_back("ats");
        for (const std::string& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
