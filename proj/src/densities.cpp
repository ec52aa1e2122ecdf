// Analytic eigenvalue densities and extreme-eigenvalue CDFs.
//
// Both CDFs are power series in x once the covariance is factored out:
// with yhat = D^{-1}/(2 s0), s0 = tr(D^{-1})/2, every partition term obeys
// C_kappa(x D^{-1}/2) = (x s0)^{|kappa|} C_kappa(yhat), so the per-degree
// coefficients depend on the parameter set only.  We build them once
// (cached, mutex-guarded) and each evaluation is a log-scaled power series
// in tau = x s0.  Normalizing to sum(yhat) = 1 also keeps every
// intermediate Jack value inside [0, 1], so the builder never overflows
// regardless of the scale of D.
//
// The lambda_max series is evaluated in Kummer form
//   1F1(a; b; -Z) = etr(-Z) 1F1(b-a; b; Z),
// which makes all terms positive (no cancellation) at the cost of needing
// degrees past tau; the builder sizes the degree from tau and extends
// geometrically when the measured tail is still above tail_tol.

#include "wishart/densities.hpp"

#include "wishart/jack.hpp"
#include "wishart/jack_eval.hpp"
#include "wishart/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace wishart {

namespace {

// Degree cap of the branching evaluator; beyond it we report an
// unconverged result rather than silently truncating tighter.
constexpr int kMaxSeriesDegree = 255;
// The monomial-table route (used only when n > 8 forces us off the
// branching evaluator) is practical to much lower degree.
constexpr int kMaxTableDegree = 24;

double pi_const() { return std::acos(-1.0); }

// C_kappa layers at yhat for degrees 0..max_degree, aligned with
// partitions_of(k, n).  Dispatches between the two evaluators.
std::vector<std::vector<double>> c_layers(const std::vector<double>& yhat,
                                          double beta, int max_degree) {
    const int n = static_cast<int>(yhat.size());
    if (std::min(n, max_degree) <= 8)
        return jack_C_all_layers(yhat, beta, max_degree);
    std::vector<std::vector<double>> layers(max_degree + 1);
    layers[0] = {1.0};
    for (int k = 1; k <= max_degree; ++k)
        layers[k] = jack_C_weight_layer(k, beta, yhat);
    return layers;
}

int degree_cap(int n) { return n <= 8 ? kMaxSeriesDegree : kMaxTableDegree; }

// Cached per-degree series coefficients for one parameter set.
struct SeriesCoef {
    int degree = -1;
    double s0 = 0.0;         // tr(D^{-1}) / 2
    double sum_log_y0 = 0.0; // sum log(1 / (2 D_i))
    // log sum_kappa w_kappa C_kappa(yhat) per degree; w_kappa is the
    // Pochhammer ratio (lambda_max) or the indicator kappa_1 <= t
    // (lambda_min).
    std::vector<double> logc;
};

// kind (0 = max, 1 = min), m, n, beta, cov.
using CoefKey = std::tuple<int, double, int, double, std::vector<double>>;

std::mutex g_coef_mutex;
std::map<CoefKey, std::shared_ptr<const SeriesCoef>> g_coef_cache;

void fill_scale(const WishartParams& p, SeriesCoef& c) {
    c.s0 = 0.0;
    c.sum_log_y0 = 0.0;
    for (double d : p.cov) {
        c.s0 += 0.5 / d;
        c.sum_log_y0 += std::log(0.5 / d);
    }
}

// Pochhammer ratio (b - a)_kappa / (b)_kappa as a product of per-box
// factors, each in (0, 1); safe at any degree.
double poch_ratio(const Partition& kappa, double a, double b, double beta) {
    double r = 1.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        const double base = -0.5 * beta * static_cast<double>(i);
        for (int j = 0; j < kappa[i]; ++j)
            r *= (b - a + base + j) / (b + base + j);
    }
    return r;
}

std::shared_ptr<const SeriesCoef> build_max_coef(const WishartParams& p,
                                                 int degree) {
    auto c = std::make_shared<SeriesCoef>();
    c->degree = degree;
    fill_scale(p, *c);
    std::vector<double> yhat(p.cov.size());
    for (std::size_t i = 0; i < yhat.size(); ++i)
        yhat[i] = 0.5 / p.cov[i] / c->s0;
    const double a = p.m * p.beta / 2.0;
    const double b = (p.m + p.n - 1.0) * p.beta / 2.0 + 1.0;
    const auto layers = c_layers(yhat, p.beta, degree);
    c->logc.assign(degree + 1, 0.0);
    for (int k = 1; k <= degree; ++k) {
        const auto parts = partitions_of(k, p.n);
        if (parts.size() != layers[k].size())
            throw std::logic_error("cdf_lambda_max: layer misalignment");
        double acc = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i)
            acc += poch_ratio(parts[i], a, b, p.beta) * layers[k][i];
        c->logc[k] = std::log(acc);
    }
    return c;
}

std::shared_ptr<const SeriesCoef> build_min_coef(const WishartParams& p,
                                                 int t) {
    auto c = std::make_shared<SeriesCoef>();
    const int degree = p.n * t;
    if (p.n > 8 && degree > kMaxTableDegree)
        throw std::invalid_argument(
            "cdf_lambda_min: n * t exceeds the supported series size for "
            "n > 8");
    c->degree = degree;
    fill_scale(p, *c);
    c->logc.assign(degree + 1, 0.0);
    if (degree == 0) return c; // t = 0: only the empty partition survives
    std::vector<double> yhat(p.cov.size());
    for (std::size_t i = 0; i < yhat.size(); ++i)
        yhat[i] = 0.5 / p.cov[i] / c->s0;
    const auto layers = c_layers(yhat, p.beta, degree);
    for (int k = 1; k <= degree; ++k) {
        const auto parts = partitions_of(k, p.n);
        if (parts.size() != layers[k].size())
            throw std::logic_error("cdf_lambda_min: layer misalignment");
        double acc = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (parts[i][0] <= t) acc += layers[k][i];
        c->logc[k] = std::log(acc);
    }
    return c;
}

// log sum_k exp(term_k) with max-term scaling; also reports the index and
// scaled weight of the last term for the tail heuristics.
struct LogSum {
    double log_sum = 0.0;
    int argmax = 0;
};

LogSum log_sum_terms(const std::vector<double>& term) {
    LogSum r;
    double mx = term[0];
    for (std::size_t k = 1; k < term.size(); ++k)
        if (term[k] > mx) {
            mx = term[k];
            r.argmax = static_cast<int>(k);
        }
    double s = 0.0;
    for (double t : term) s += std::exp(t - mx);
    r.log_sum = mx + std::log(s);
    return r;
}

std::vector<double> series_terms(const SeriesCoef& c, double log_tau) {
    std::vector<double> term(c.degree + 1);
    double lg = 0.0; // log k!
    for (int k = 0; k <= c.degree; ++k) {
        if (k > 0) lg += std::log(static_cast<double>(k));
        term[k] = k * log_tau + c.logc[k] - lg;
    }
    return term;
}

// Relative size of the truncated tail, estimated from the last two terms
// by geometric extension.  Returns a pessimistic value when the terms are
// not yet decaying.
double tail_of(const std::vector<double>& term, const LogSum& ls) {
    const std::size_t K = term.size() - 1;
    if (K == 0) return 0.0;
    const double last = std::exp(term[K] - ls.log_sum);
    if (ls.argmax == static_cast<int>(K)) return std::max(last, 1.0);
    const double r = std::exp(term[K] - term[K - 1]);
    if (r < 0.95) return last * r / (1.0 - r);
    return last * 20.0;
}

} // namespace

void DensityQuery::validate() const {
    params.validate();
    truncation.validate();
}

double normalization_logK(double m, int n, double beta) {
    if (n < 1) throw std::invalid_argument("normalization_logK: n must be >= 1");
    if (beta <= 0.0)
        throw std::invalid_argument("normalization_logK: beta must be positive");
    if (!(m > n - 1.0))
        throw std::invalid_argument("normalization_logK: m must exceed n - 1");
    const double nn = static_cast<double>(n);
    const LogValue gm = gamma_n_log(m * beta / 2.0, n, beta);
    const LogValue gn = gamma_n_log(nn * beta / 2.0, n, beta);
    return m * nn * beta / 2.0 * std::log(2.0) -
           nn * (nn - 1.0) * beta / 2.0 * std::log(pi_const()) + gm.log_abs +
           gn.log_abs - nn * std::lgamma(beta / 2.0);
}

JointDensityValue log_joint_eigen_density(const std::vector<double>& lambda,
                                          const DensityQuery& q) {
    q.validate();
    const WishartParams& p = q.params;
    const int n = p.n;
    if (static_cast<int>(lambda.size()) != n)
        throw std::invalid_argument(
            "log_joint_eigen_density: lambda must have exactly n entries");
    for (int i = 0; i < n; ++i) {
        if (!(lambda[i] > 0.0))
            throw std::invalid_argument(
                "log_joint_eigen_density: eigenvalues must be strictly positive");
        if (i > 0 && !(lambda[i - 1] > lambda[i]))
            throw std::invalid_argument(
                "log_joint_eigen_density: eigenvalues must be strictly "
                "decreasing");
    }

    double log_det_d = 0.0;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        log_det_d += std::log(p.cov[i]);
        x[i] = -0.5 * lambda[i];
        y[i] = 1.0 / p.cov[i];
    }

    double lv = -p.m * p.beta / 2.0 * log_det_d -
                normalization_logK(p.m, n, p.beta);
    const double expo = (p.m - n + 1.0) * p.beta / 2.0 - 1.0;
    for (int i = 0; i < n; ++i) lv += expo * std::log(lambda[i]);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            lv += p.beta * std::log(lambda[i] - lambda[j]);

    const SeriesResult f = hyp0f0_shifted(x, y, p.beta, q.truncation);
    JointDensityValue out;
    out.tail_estimate = f.tail_estimate;
    if (f.value > 0.0) {
        out.log_density = lv + std::log(f.value);
        out.converged = f.converged;
    } else {
        // Cancellation ate the series; report rather than fake.
        out.log_density = -std::numeric_limits<double>::infinity();
        out.converged = false;
    }
    return out;
}

CdfValue cdf_lambda_max(double x, const DensityQuery& q) {
    q.validate();
    if (x < 0.0)
        throw std::invalid_argument("cdf_lambda_max: x must be nonnegative");
    const WishartParams& p = q.params;
    CdfValue out;
    if (x == 0.0) {
        out.converged = true;
        return out;
    }

    const double a = p.m * p.beta / 2.0;
    const double b = (p.m + p.n - 1.0) * p.beta / 2.0 + 1.0;
    const LogValue gtop = gamma_n_log(1.0 + (p.n - 1.0) * p.beta / 2.0, p.n,
                                      p.beta);
    const LogValue gbot = gamma_n_log(b, p.n, p.beta);
    const double log_pref = gtop.log_abs - gbot.log_abs;

    const int cap = degree_cap(p.n);
    const CoefKey key{0, p.m, p.n, p.beta, p.cov};
    std::shared_ptr<const SeriesCoef> coef;
    {
        std::lock_guard<std::mutex> lock(g_coef_mutex);
        auto it = g_coef_cache.find(key);
        if (it != g_coef_cache.end()) coef = it->second;
    }

    // Lean first-stage degree; the Pochhammer ratios push the true tail
    // well below the Poisson crossover, so start near tau and extend from
    // the measured decay instead of padding up front (builder cost grows
    // steeply with the degree).
    double s0 = 0.0;
    for (double d : p.cov) s0 += 0.5 / d;
    const double tau = x * s0;
    int needed = static_cast<int>(std::ceil(tau + 2.0 * std::sqrt(tau))) + 10;
    needed = std::max(needed, q.truncation.max_degree);
    needed = std::min(needed, cap);

    auto ensure = [&](int deg) {
        if (coef && coef->degree >= deg) return;
        // Mild headroom so an ascending grid of x values triggers only
        // O(log) rebuilds.
        const int build = std::min(cap, deg + deg / 8 + 4);
        std::lock_guard<std::mutex> lock(g_coef_mutex);
        auto it = g_coef_cache.find(key);
        if (it != g_coef_cache.end() && it->second->degree >= deg) {
            coef = it->second;
            return;
        }
        coef = build_max_coef(p, build);
        g_coef_cache[key] = coef;
    };

    ensure(needed);
    const double log_tau = std::log(tau);
    std::vector<double> term = series_terms(*coef, log_tau);
    LogSum ls = log_sum_terms(term);
    double tail = tail_of(term, ls);
    while (tail > q.truncation.tail_tol && coef->degree < cap) {
        // Extrapolate how many extra degrees the measured geometric decay
        // needs to reach the target; the true decay only accelerates.
        const int K = coef->degree;
        const double r = std::exp(term[K] - term[K - 1]);
        int step;
        if (r < 0.999)
            step = static_cast<int>(std::ceil(
                       std::log(q.truncation.tail_tol / tail) / std::log(r))) +
                   8;
        else
            step = K / 4 + 16; // terms not yet decaying: jump past the peak
        step = std::max(step, 8);
        ensure(std::min(cap, K + step));
        term = series_terms(*coef, log_tau);
        ls = log_sum_terms(term);
        tail = tail_of(term, ls);
    }

    const double log_raw = log_pref +
                           a * (p.n * std::log(x) + coef->sum_log_y0) - tau +
                           ls.log_sum;
    out.raw = std::exp(log_raw);
    out.clamped = std::min(1.0, std::max(0.0, out.raw));
    out.tail_estimate = tail;
    out.converged = tail <= q.truncation.tail_tol;
    return out;
}

CdfValue cdf_lambda_min(double x, const DensityQuery& q) {
    q.validate();
    if (x < 0.0)
        throw std::invalid_argument("cdf_lambda_min: x must be nonnegative");
    const WishartParams& p = q.params;
    const double traw = (p.m - p.n + 1.0) * p.beta / 2.0 - 1.0;
    const long tl = std::lround(traw);
    if (tl < 0 || std::fabs(traw - static_cast<double>(tl)) > 1e-9) {
        std::ostringstream msg;
        msg << "cdf_lambda_min: (m - n + 1) * beta / 2 - 1 must be a "
               "nonnegative integer, got "
            << traw;
        throw std::invalid_argument(msg.str());
    }
    const int t = static_cast<int>(tl);

    CdfValue out;
    out.converged = true;
    if (x == 0.0) return out;

    const CoefKey key{1, p.m, p.n, p.beta, p.cov};
    std::shared_ptr<const SeriesCoef> coef;
    {
        std::lock_guard<std::mutex> lock(g_coef_mutex);
        auto it = g_coef_cache.find(key);
        if (it != g_coef_cache.end()) coef = it->second;
    }
    if (!coef) {
        std::lock_guard<std::mutex> lock(g_coef_mutex);
        auto it = g_coef_cache.find(key);
        if (it == g_coef_cache.end()) {
            coef = build_min_coef(p, t);
            g_coef_cache[key] = coef;
        } else {
            coef = it->second;
        }
    }

    const double tau = x * coef->s0;
    const std::vector<double> term = series_terms(*coef, std::log(tau));
    const LogSum ls = log_sum_terms(term);
    // exp(log_sum - tau) <= 1: the truncated sum is dominated by e^tau.
    out.raw = 1.0 - std::exp(ls.log_sum - tau);
    out.clamped = std::min(1.0, std::max(0.0, out.raw));
    return out;
}

} // namespace wishart
