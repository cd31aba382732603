#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <vector>

#include "ats/params.hpp"
#include "ats/pricing.hpp"

namespace ats {

using Rng = std::mt19937_64;

struct PathGrid {
    int n_steps = 0;
    double horizon = 0.0;
    std::vector<double> times;  // size n_steps + 1, strictly increasing from 0

    static PathGrid uniform(int n_steps, double horizon);

    // Throws std::invalid_argument on inconsistent fields.
    void validate() const;
};

enum class BinSpacing { Uniform, Log };

// Jump-size binning for the compound-Poisson approximation of Lambda.
struct CpaConfig {
    int n_bins = 100;
    double x_min = 1e-10;
    double x_max = 7.0 + 1e-10;
    BinSpacing spacing = BinSpacing::Log;

    void validate() const;
    std::vector<double> edges() const;  // n_bins + 1 bin edges
};

struct SamplePath {
    PathGrid grid;
    std::vector<double> values;  // size n_steps + 1, values[0] = 0
};

// One increment X_{t+dt} - X_t of the tempered stable subordinator:
// gamma sampler at c = 0, inverse Gaussian (Michael-Schucany-Haas) at
// c = 1/2, and for other c rejection from the positive stable law with
// acceptance weight e^{-b x} (acceptance rate exp(-a dt |Gamma(-c)| b^c)).
// Throws std::runtime_error if the rejection loop exceeds 10^6 iterations.
double sample_ts_increment(const AtsParams& p, double dt, Rng& rng);

struct EulerPaths {
    std::vector<SamplePath> paths_x;    // the subordinator X
    std::vector<SamplePath> paths_avg;  // its running average
};

// Simulates X by cumulative TS increments and the running average by the
// rectangle-rule integral divided by elapsed time (0 at time 0).  Paths draw
// from independent streams derived from seed, so batches are reproducible
// and parallelizable.
EulerPaths euler_paths(const AtsParams& p, const PathGrid& grid, int n_paths,
                       std::uint64_t seed);

// Compound-Poisson approximation of the subordinator Lambda induced by the
// running average: per-bin Poisson streams with intensity int_bin l(x) dx,
// jump size chi_j = sqrt(int_bin x^2 l / int_bin l), compensated for bins
// with chi_j < 1, plus the drift of the Levy triplet.  Throws
// std::runtime_error naming the bin if a bin integral fails.
std::vector<SamplePath> cpa_lambda_paths(const AtsParams& p, const PathGrid& grid,
                                         const CpaConfig& cfg, int n_paths,
                                         std::uint64_t seed);

// Gaussian mixture paths H_i+1 = H_i + kappa dt + mu dLambda
// + sigma sqrt(|dLambda|) N(0,1) over CPA increments of Lambda (compensation
// can make a dLambda negative, hence the absolute value).
std::vector<SamplePath> mixture_paths(const MixtureParams& mp, const PathGrid& grid,
                                      const CpaConfig& cfg, int n_paths,
                                      std::uint64_t seed);

// Kolmogorov-Smirnov distance between the sample and a distribution function.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

// time,path_1,...,path_n columns; all paths must share one grid.
void paths_to_csv(std::ostream& os, const std::vector<SamplePath>& paths);
void paths_to_json(std::ostream& os, const std::vector<SamplePath>& paths);

}  // namespace ats
