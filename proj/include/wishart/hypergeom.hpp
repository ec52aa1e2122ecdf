// Truncated hypergeometric functions of matrix argument (0F0 with two
// vector arguments, 1F1 with one), summed layer by layer over partition
// weight with an explicit tail estimate, plus the exponential shift
// identity used to center the second 0F0 argument.
#pragma once

#include <string>
#include <vector>

namespace wishart {

struct SeriesTruncation {
    int max_degree = 30;   // bound on |kappa|
    double tail_tol = 1e-9; // stop once a degree layer is this small relative

    void validate() const; // throws std::invalid_argument
};

struct SeriesResult {
    double value = 0.0;
    double tail_estimate = 0.0; // |last included layer| / |partial sum|
    int degree_used = 0;        // weight of the last included layer
    // two consecutive layers fell below tail_tol before the degree bound
    // (a single tiny layer can be structural, e.g. a centered argument)
    bool converged = false;
};

// sum_k sum_{|kappa|=k, l(kappa)<=n} C_kappa(x) C_kappa(y) / (k! C_kappa(I_n)).
// x and y must have equal length n >= 1.
SeriesResult hyp0f0(const std::vector<double>& x, const std::vector<double>& y,
                    double beta, const SeriesTruncation& t = {});

// The identity 0F0(X, Y) = exp(s tr X) 0F0(X, Y - sI) holds for any s;
// choosing s = mean(y) centers the second argument, which shrinks the
// largest |y_i - s| driving layer growth.
struct ShiftPlan {
    double s = 0.0;
    std::string description;
};
ShiftPlan shift_regularize(const std::vector<double>& x,
                           const std::vector<double>& y, double beta);

// hyp0f0 with shift_regularize applied end to end: the series is summed at
// the centered second argument and the exponential prefactor restored.
SeriesResult hyp0f0_shifted(const std::vector<double>& x,
                            const std::vector<double>& y, double beta,
                            const SeriesTruncation& t = {});

// sum_k sum_{|kappa|=k, l(kappa)<=n} [(a)_kappa / (b)_kappa] C_kappa(x) / k!
// with generalized Pochhammer symbols.  Throws std::invalid_argument when
// (b)_kappa vanishes for an included kappa, naming the partition.
SeriesResult hyp1f1(double a, double b, const std::vector<double>& x,
                    double beta, const SeriesTruncation& t = {});

} // namespace wishart
