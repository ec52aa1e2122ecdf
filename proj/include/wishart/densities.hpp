#pragma once

#include "wishart/hypergeom.hpp"
#include "wishart/sampler.hpp"

#include <vector>

namespace wishart {

// Analytic densities and extreme-eigenvalue distributions of the
// beta-Wishart ensemble with diagonal covariance D.  Everything here is
// deterministic; the Monte Carlo counterparts live in montecarlo.hpp.

// Bundles the ensemble parameters with the series controls used by the
// hypergeometric evaluations inside the density formulas.
struct DensityQuery {
    WishartParams params;
    SeriesTruncation truncation;

    void validate() const;
};

// log K where K is the normalization constant of the joint eigenvalue
// density written with the covariance factored out:
//   K = 2^{m n beta/2} / pi^{n(n-1) beta/2}
//       * Gamma_n(m beta/2) Gamma_n(n beta/2) / Gamma(beta/2)^n.
// For n = 1 this collapses to 2^{m beta/2} Gamma(m beta/2).  Throws
// std::invalid_argument when a Gamma argument hits the pole set (only
// possible when m <= n - 1, which WishartParams already forbids).
double normalization_logK(double m, int n, double beta);

struct JointDensityValue {
    double log_density = 0.0;
    double tail_estimate = 0.0; // relative tail of the 0F0 series
    bool converged = false;
};

// Log of the joint eigenvalue density at lambda (strictly decreasing,
// strictly positive, size n):
//   det(D)^{-m beta/2} / K * prod_i lambda_i^{(m-n+1) beta/2 - 1}
//   * prod_{i<j} (lambda_i - lambda_j)^beta * 0F0(-lambda/2, 1/D).
// The 0F0 factor is evaluated through the shifted form to keep the
// alternating series tame.  Throws on malformed lambda.
JointDensityValue log_joint_eigen_density(const std::vector<double>& lambda,
                                          const DensityQuery& q);

struct CdfValue {
    double raw = 0.0;     // series value as computed (may stray outside [0,1])
    double clamped = 0.0; // raw clipped to [0,1] for reporting
    double tail_estimate = 0.0;
    bool converged = false;
};

// P(lambda_max < x) for x >= 0:
//   Gamma_n(1 + (n-1) beta/2) / Gamma_n(1 + (m+n-1) beta/2)
//   * det(x D^{-1} / 2)^{m beta/2}
//   * 1F1(m beta/2; (m+n-1) beta/2 + 1; -x D^{-1}/2).
// The 1F1 is evaluated in Kummer form etr(-x D^{-1}/2) 1F1(b-a; b; x D^{-1}/2)
// so every series term is positive.  Degree-homogeneity lets the partition
// coefficients be built once per parameter set and cached; each call then
// costs one log-scaled power series in x.  truncation.max_degree acts as a
// floor on the cached degree and tail_tol as the stopping target; the
// actual degree is sized from x tr(D^{-1})/2 (capped at 255, with the cap
// reported through converged/tail_estimate rather than hidden).
CdfValue cdf_lambda_max(double x, const DensityQuery& q);

// P(lambda_min < x) for x >= 0, valid when t = (m-n+1) beta/2 - 1 is a
// nonnegative integer (checked to 1e-9; otherwise std::invalid_argument):
//   1 - etr(-x D^{-1}/2) * sum_{k <= n t} sum_{kappa |- k, kappa_1 <= t}
//         C_kappa(x D^{-1}/2) / k!.
// The sum is finite, so tail_estimate is 0 and converged is always true.
CdfValue cdf_lambda_min(double x, const DensityQuery& q);

} // namespace wishart
