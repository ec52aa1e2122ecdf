#pragma once

#include "wishart/hypergeom.hpp"
#include "wishart/rng.hpp"
#include "wishart/sampler.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace wishart {

// Experiment harness: empirical CDFs, Kolmogorov-Smirnov distances, the
// extreme-eigenvalue comparisons against the analytic CDFs, and the
// free-probability product experiment with a beta = 1 dense-matrix
// reference.  Everything is deterministic given (seed, params): draws are
// addressed by RngStream stream id, so the thread count never changes the
// output.

struct EmpiricalCdf {
    std::vector<double> sorted_samples;
    std::size_t count = 0;

    double operator()(double x) const; // P(sample <= x)
    double lower(double x) const;      // left limit P(sample < x)
    // Order statistic at probability level p in [0, 1].
    double quantile(double p) const;
};

// Sorted copy of the samples; throws std::invalid_argument when empty.
EmpiricalCdf empirical_cdf(std::vector<double> samples);

// sup over sample points of max(|F_n(x) - F(x)|, |F_n(x^-) - F(x^-)|),
// the left limit of the analytic side probed just below x; for continuous
// F the two probes coincide, for a step reference (two-sample use) the
// distance of an empirical cdf to itself is 0.
double ks_distance(const EmpiricalCdf& e,
                   const std::function<double(double)>& analytic);

// Worker count used by the experiment drivers: `requested` if positive,
// else the WISHART_THREADS environment variable, else the hardware count.
int worker_thread_count(int requested = 0);

enum class ExtremeKind { max, min };

struct ExperimentReport {
    std::vector<double> grid;
    std::vector<double> empirical; // empirical CDF at grid
    std::vector<double> analytic;  // analytic CDF at grid (clamped)
    double ks = 0.0;               // max |empirical - analytic| over grid
    int draws = 0;
    std::uint64_t seed = 0;
};

// Draw `draws` extreme eigenvalues, evaluate the analytic CDF on the grid,
// and report both curves.  An empty grid defaults to the empirical
// quantiles at the 99 evenly spaced probability levels 0.01..0.99, which
// adapts to the support without tuning.  Errors from the analytic side
// (e.g. the lambda_min integrality condition) propagate.
ExperimentReport run_extreme_experiment(const WishartParams& p,
                                        ExtremeKind which, int draws,
                                        std::vector<double> grid,
                                        std::uint64_t seed,
                                        const SeriesTruncation& truncation = {},
                                        int threads = 0);

// Draw with density (2/(pi r^2)) sqrt(r^2 - (x-c)^2) on [c-r, c+r]
// (radius > 0), via a symmetric Beta(3/2, 3/2) variate.
double semicircle_sample(RngStream& rng, double center, double radius);

// Semicircle law of width 2 sqrt(2) centered at 3 unless overridden.
struct SemicirclePrior {
    double center = 3.0;
    double radius = 1.4142135623730951;
};

struct FreeProbabilityConfig {
    double m = 500.0;
    int n = 50;
    double beta = 3.0;
    int draws = 200;
    SemicirclePrior prior;
    std::uint64_t seed = 0;
    int bins = 50;
    // Replace the recursive sampler with explicit Gaussian matrices
    // (requires beta = 1 and integral m): eigenvalues of X^T X D / m.
    bool dense_beta1_oracle = false;
    int threads = 0;
};

struct FreeProbabilityReport {
    std::vector<double> samples;   // all scaled eigenvalues, draw-major
    std::vector<double> bin_edges; // bins + 1 edges spanning the samples
    std::vector<double> bin_mass;  // sums to 1
    std::array<double, 4> moments{};   // mean over draws of per-draw moments
    std::array<double, 4> moment_se{}; // standard error over draws
    int draws = 0;
    std::uint64_t seed = 0;
    std::string assumption; // covariance-prior structure note
};

// Per draw: D with i.i.d. semicircle diagonal entries, eigenvalues of
// W(D, m, n) scaled by 1/(m beta); aggregates a normalized histogram and
// the first four spectral moments.  A nonpositive covariance draw (possible
// only when center - radius <= 0) throws std::invalid_argument.
FreeProbabilityReport
run_free_probability_experiment(const FreeProbabilityConfig& cfg);

// One beta = 1 draw via an explicit m x n standard Gaussian matrix:
// eigenvalues of X^T X D (descending, unscaled) from a dense symmetric
// eigensolver.  Reference implementation for cross-checks.
std::vector<double> dense_product_eigenvalues(RngStream& rng, int m, int n,
                                              const std::vector<double>& cov);

} // namespace wishart
