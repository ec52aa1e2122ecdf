// Experiment drivers.  Determinism contract: every Monte Carlo draw owns
// the RngStream addressed by (seed, draw index), and aggregation walks
// draw indices in order, so results are independent of how draws are
// partitioned across threads.

#include "wishart/montecarlo.hpp"

#include "wishart/densities.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace wishart {

namespace {

// Runs fn(draw) for draw in [0, draws) across workers; rethrows the first
// worker exception.  fn must only touch per-draw slots.
void for_each_draw(int draws, int threads,
                   const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, draws));
    if (threads == 1) {
        for (int i = 0; i < draws; ++i) fn(i);
        return;
    }
    std::mutex mu;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    const int chunk = (draws + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(draws, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_samples.begin(),
                                     sorted_samples.end(), x);
    return static_cast<double>(it - sorted_samples.begin()) /
           static_cast<double>(count);
}

double EmpiricalCdf::lower(double x) const {
    const auto it = std::lower_bound(sorted_samples.begin(),
                                     sorted_samples.end(), x);
    return static_cast<double>(it - sorted_samples.begin()) /
           static_cast<double>(count);
}

double EmpiricalCdf::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("EmpiricalCdf::quantile: p outside [0,1]");
    const double idx = std::ceil(p * static_cast<double>(count)) - 1.0;
    const auto i = static_cast<std::size_t>(
        std::max(0.0, std::min(idx, static_cast<double>(count - 1))));
    return sorted_samples[i];
}

EmpiricalCdf empirical_cdf(std::vector<double> samples) {
    if (samples.empty())
        throw std::invalid_argument("empirical_cdf: no samples");
    EmpiricalCdf e;
    e.count = samples.size();
    e.sorted_samples = std::move(samples);
    std::sort(e.sorted_samples.begin(), e.sorted_samples.end());
    return e;
}

double ks_distance(const EmpiricalCdf& e,
                   const std::function<double(double)>& analytic) {
    const auto& s = e.sorted_samples;
    const double n = static_cast<double>(e.count);
    const double neg_inf = -std::numeric_limits<double>::infinity();
    double ks = 0.0;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j + 1 < s.size() && s[j + 1] == s[i]) ++j;
        // Left limits on both sides: the analytic cdf is probed just below
        // the sample so step-function references (two-sample use) compare
        // jump against jump instead of jump against plateau.
        ks = std::max(ks, std::fabs((j + 1) / n - analytic(s[i])));
        ks = std::max(ks,
                      std::fabs(i / n - analytic(std::nextafter(s[i], neg_inf))));
        i = j + 1;
    }
    return ks;
}

int worker_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("WISHART_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

ExperimentReport run_extreme_experiment(const WishartParams& p,
                                        ExtremeKind which, int draws,
                                        std::vector<double> grid,
                                        std::uint64_t seed,
                                        const SeriesTruncation& truncation,
                                        int threads) {
    p.validate();
    truncation.validate();
    if (draws < 1)
        throw std::invalid_argument("run_extreme_experiment: draws must be >= 1");

    DensityQuery q;
    q.params = p;
    q.truncation = truncation;
    // Surfaces the lambda_min validity condition before any sampling.
    if (which == ExtremeKind::min) cdf_lambda_min(0.0, q);

    std::vector<double> samples(draws);
    for_each_draw(draws, worker_thread_count(threads), [&](int i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        const auto ev = sample_eigenvalues(rng, p);
        samples[i] = which == ExtremeKind::max ? ev.front() : ev.back();
    });

    ExperimentReport rep;
    rep.draws = draws;
    rep.seed = seed;
    const EmpiricalCdf ecdf = empirical_cdf(std::move(samples));
    if (grid.empty()) {
        grid.reserve(99);
        for (int i = 1; i <= 99; ++i)
            grid.push_back(ecdf.quantile(i / 100.0));
    }
    rep.grid = std::move(grid);

    // Evaluate the largest x first: the cached series coefficients grow
    // with x, so this builds them once for the whole grid.
    const auto cdf = [&](double x) {
        return which == ExtremeKind::max ? cdf_lambda_max(x, q)
                                         : cdf_lambda_min(x, q);
    };
    cdf(*std::max_element(rep.grid.begin(), rep.grid.end()));

    rep.empirical.resize(rep.grid.size());
    rep.analytic.resize(rep.grid.size());
    for (std::size_t j = 0; j < rep.grid.size(); ++j) {
        rep.empirical[j] = ecdf(rep.grid[j]);
        rep.analytic[j] = cdf(rep.grid[j]).clamped;
        rep.ks = std::max(rep.ks,
                          std::fabs(rep.empirical[j] - rep.analytic[j]));
    }
    return rep;
}

double semicircle_sample(RngStream& rng, double center, double radius) {
    if (!(radius > 0.0))
        throw std::invalid_argument("semicircle_sample: radius must be positive");
    // Beta(3/2, 3/2) stretched to [c - r, c + r].
    const double g1 = rng.gamma(1.5);
    const double g2 = rng.gamma(1.5);
    return center + radius * (2.0 * g1 / (g1 + g2) - 1.0);
}

std::vector<double> dense_product_eigenvalues(RngStream& rng, int m, int n,
                                              const std::vector<double>& cov) {
    if (n < 1 || m < n)
        throw std::invalid_argument(
            "dense_product_eigenvalues: need m >= n >= 1");
    if (static_cast<int>(cov.size()) != n)
        throw std::invalid_argument(
            "dense_product_eigenvalues: cov size mismatch");
    Eigen::MatrixXd x(m, n);
    for (int j = 0; j < n; ++j) // column order fixed: part of determinism
        for (int i = 0; i < m; ++i) x(i, j) = rng.normal();
    const Eigen::MatrixXd gram = x.transpose() * x;
    // X^T X D is similar to D^{1/2} X^T X D^{1/2}; keep it symmetric.
    Eigen::VectorXd sq(n);
    for (int i = 0; i < n; ++i) {
        if (!(cov[i] > 0.0))
            throw std::invalid_argument(
                "dense_product_eigenvalues: cov entries must be positive");
        sq[i] = std::sqrt(cov[i]);
    }
    const Eigen::MatrixXd sym =
        sq.asDiagonal() * gram * sq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw std::runtime_error(
            "dense_product_eigenvalues: eigensolver failed");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[n - 1 - i];
    return out;
}

FreeProbabilityReport
run_free_probability_experiment(const FreeProbabilityConfig& cfg) {
    if (cfg.n < 1)
        throw std::invalid_argument("free probability: n must be >= 1");
    if (!(cfg.m >= cfg.n))
        throw std::invalid_argument("free probability: m must be >= n");
    if (cfg.draws < 1)
        throw std::invalid_argument("free probability: draws must be >= 1");
    if (cfg.bins < 1)
        throw std::invalid_argument("free probability: bins must be >= 1");
    if (!(cfg.beta > 0.0))
        throw std::invalid_argument("free probability: beta must be positive");
    if (!(cfg.prior.radius > 0.0))
        throw std::invalid_argument("free probability: radius must be positive");
    if (cfg.dense_beta1_oracle) {
        if (cfg.beta != 1.0)
            throw std::invalid_argument(
                "free probability: the dense reference requires beta = 1");
        if (cfg.m != std::floor(cfg.m))
            throw std::invalid_argument(
                "free probability: the dense reference requires integral m");
    }

    FreeProbabilityReport rep;
    rep.draws = cfg.draws;
    rep.seed = cfg.seed;
    rep.assumption =
        "covariance prior: i.i.d. semicircle diagonal entries "
        "(independence assumed; joint structure unspecified upstream)";
    rep.samples.assign(static_cast<std::size_t>(cfg.draws) * cfg.n, 0.0);
    std::vector<std::array<double, 4>> draw_moments(cfg.draws);

    const double scale = 1.0 / (cfg.m * cfg.beta);
    for_each_draw(cfg.draws, worker_thread_count(cfg.threads), [&](int d) {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(d));
        std::vector<double> cov(cfg.n);
        for (int i = 0; i < cfg.n; ++i) {
            cov[i] = semicircle_sample(rng, cfg.prior.center, cfg.prior.radius);
            if (!(cov[i] > 0.0))
                throw std::invalid_argument(
                    "free probability: drew a nonpositive covariance entry; "
                    "center - radius must be positive");
        }
        std::vector<double> ev;
        if (cfg.dense_beta1_oracle) {
            ev = dense_product_eigenvalues(rng, static_cast<int>(cfg.m),
                                           cfg.n, cov);
        } else {
            WishartParams p;
            p.m = cfg.m;
            p.n = cfg.n;
            p.beta = cfg.beta;
            p.cov = cov;
            ev = sample_eigenvalues(rng, p);
        }
        std::array<double, 4> mom{};
        for (int k = 0; k < cfg.n; ++k) {
            const double lam = ev[k] * scale;
            rep.samples[static_cast<std::size_t>(d) * cfg.n + k] = lam;
            double pw = 1.0;
            for (int j = 0; j < 4; ++j) {
                pw *= lam;
                mom[j] += pw / cfg.n;
            }
        }
        draw_moments[d] = mom;
    });

    for (int j = 0; j < 4; ++j) {
        double mean = 0.0;
        for (const auto& mom : draw_moments) mean += mom[j];
        mean /= cfg.draws;
        rep.moments[j] = mean;
        if (cfg.draws > 1) {
            double var = 0.0;
            for (const auto& mom : draw_moments)
                var += (mom[j] - mean) * (mom[j] - mean);
            var /= (cfg.draws - 1.0);
            rep.moment_se[j] = std::sqrt(var / cfg.draws);
        }
    }

    double lo = rep.samples[0], hi = rep.samples[0];
    for (double s : rep.samples) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    rep.bin_edges.resize(cfg.bins + 1);
    for (int b = 0; b <= cfg.bins; ++b)
        rep.bin_edges[b] = lo + (hi - lo) * b / cfg.bins;
    rep.bin_mass.assign(cfg.bins, 0.0);
    const double w = 1.0 / static_cast<double>(rep.samples.size());
    for (double s : rep.samples) {
        int b = static_cast<int>((s - lo) / (hi - lo) * cfg.bins);
        b = std::max(0, std::min(b, cfg.bins - 1)); // top edge inclusive
        rep.bin_mass[b] += w;
    }
    return rep;
}

} // namespace wishart
