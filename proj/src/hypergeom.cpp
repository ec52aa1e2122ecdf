// Degree-layered summation of 0F0 and 1F1 of matrix argument.  Each weight
// layer is one pass over the partitions of k with at most n rows; the Jack
// values come from the shared table cache and C_kappa(I_n) from the jack
// module.  Summation stops once a full layer contributes less than the
// requested relative tolerance, and the relative size of the last layer is
// returned so callers can judge the truncation themselves.

#include "wishart/hypergeom.hpp"

#include "wishart/jack.hpp"
#include "wishart/partition.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace wishart {

namespace {

double safe_abs_floor(double v) {
    const double a = std::abs(v);
    return a > 1e-300 ? a : 1e-300;
}

std::string partition_to_string(const Partition& kappa) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        if (i) os << ',';
        os << kappa[i];
    }
    os << ')';
    return os.str();
}

void validate_common(std::size_t n, double beta, const SeriesTruncation& t) {
    if (n == 0)
        throw std::invalid_argument("hypergeometric series: empty argument vector");
    if (!(beta > 0.0))
        throw std::invalid_argument("hypergeometric series: beta must be positive");
    t.validate();
}

} // namespace

void SeriesTruncation::validate() const {
    if (max_degree < 1)
        throw std::invalid_argument("SeriesTruncation: max_degree must be >= 1");
    if (!(tail_tol > 0.0) || !(tail_tol < 1.0))
        throw std::invalid_argument("SeriesTruncation: tail_tol must lie in (0, 1)");
}

SeriesResult hyp0f0(const std::vector<double>& x, const std::vector<double>& y,
                    double beta, const SeriesTruncation& t) {
    if (x.size() != y.size())
        throw std::invalid_argument("hyp0f0: argument dimensions differ");
    validate_common(x.size(), beta, t);
    const int n = static_cast<int>(x.size());

    SeriesResult r;
    r.value = 1.0; // the empty partition
    long double kfact = 1.0L;
    int small_run = 0;
    for (int k = 1; k <= t.max_degree; ++k) {
        kfact *= k;
        const auto cx = jack_C_weight_layer(k, beta, x);
        const auto cy = jack_C_weight_layer(k, beta, y);
        const auto& parts = jack_table(k, n, beta).parts;
        long double layer = 0.0L;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (cx[i] == 0.0 || cy[i] == 0.0) continue;
            layer += static_cast<long double>(cx[i]) * cy[i] /
                     jack_C_identity(parts[i], beta, n);
        }
        const double term = static_cast<double>(layer / kfact);
        r.value += term;
        r.degree_used = k;
        r.tail_estimate = std::abs(term) / safe_abs_floor(r.value);
        // a single tiny layer can be structural (e.g. a centered argument
        // zeroes the trace layer); demand two in a row before stopping
        small_run = r.tail_estimate < t.tail_tol ? small_run + 1 : 0;
        if (small_run >= 2) {
            r.converged = true;
            break;
        }
    }
    return r;
}

ShiftPlan shift_regularize(const std::vector<double>& x,
                           const std::vector<double>& y, double beta) {
    (void)x;
    (void)beta;
    ShiftPlan p;
    if (!y.empty()) {
        double s = 0.0;
        for (double v : y) s += v;
        p.s = s / static_cast<double>(y.size());
    }
    std::ostringstream os;
    os << "0F0(x, y) = exp(" << p.s << " * sum(x)) * 0F0(x, y - " << p.s << ')';
    p.description = os.str();
    return p;
}

SeriesResult hyp0f0_shifted(const std::vector<double>& x,
                            const std::vector<double>& y, double beta,
                            const SeriesTruncation& t) {
    if (x.size() != y.size())
        throw std::invalid_argument("hyp0f0_shifted: argument dimensions differ");
    validate_common(x.size(), beta, t);
    const ShiftPlan plan = shift_regularize(x, y, beta);
    std::vector<double> yc(y);
    for (double& v : yc) v -= plan.s;
    SeriesResult r = hyp0f0(x, yc, beta, t);
    double sx = 0.0;
    for (double v : x) sx += v;
    r.value *= std::exp(plan.s * sx);
    return r;
}

SeriesResult hyp1f1(double a, double b, const std::vector<double>& x,
                    double beta, const SeriesTruncation& t) {
    validate_common(x.size(), beta, t);
    const int n = static_cast<int>(x.size());

    SeriesResult r;
    r.value = 1.0;
    long double kfact = 1.0L;
    int small_run = 0;
    for (int k = 1; k <= t.max_degree; ++k) {
        kfact *= k;
        const auto cx = jack_C_weight_layer(k, beta, x);
        const auto& parts = jack_table(k, n, beta).parts;
        long double layer = 0.0L;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const double pb = pochhammer_general(b, parts[i], beta);
            if (pb == 0.0)
                throw std::invalid_argument(
                    "hyp1f1: (b)_kappa vanishes at kappa = " +
                    partition_to_string(parts[i]) +
                    " (b lies in the discrete pole set)");
            if (cx[i] == 0.0) continue;
            layer += static_cast<long double>(pochhammer_general(a, parts[i], beta)) /
                     pb * cx[i];
        }
        const double term = static_cast<double>(layer / kfact);
        r.value += term;
        r.degree_used = k;
        r.tail_estimate = std::abs(term) / safe_abs_floor(r.value);
        small_run = r.tail_estimate < t.tail_tol ? small_run + 1 : 0;
        if (small_run >= 2) {
            r.converged = true;
            break;
        }
    }
    return r;
}

} // namespace wishart
