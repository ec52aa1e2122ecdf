#pragma once

#include "wishart/rng.hpp"

#include <cstddef>
#include <vector>

namespace wishart {

// Parameters of the beta-Wishart ensemble with diagonal covariance. m may
// be fractional; the recursion only needs the chi orders (m - i + 1) * beta
// to stay positive, i.e. m > n - 1.
struct WishartParams {
    double m = 0.0;
    int n = 0;
    double beta = 0.0;
    std::vector<double> cov; // diagonal of D, strictly positive, size n

    void validate() const;
};

// Optional instrumentation.  peak_live_values counts the doubles the
// sampler holds simultaneously (grows linearly in n: the recursion never
// materializes a dense matrix).  The last-level fields expose the corner
// entry and diagonal product of the final broken arrow, whose product
// equals the product of the sampled singular values.
struct SampleDiagnostics {
    std::size_t peak_live_values = 0;
    double last_level_corner = 0.0;
    double last_level_diag_product = 1.0;
};

// One draw of the singular values (descending) of the recursive model:
// level 1 is a scaled chi draw, level j wraps the previous level's
// singular values into a broken arrow with fresh chi entries scaled by
// sqrt(cov[j-1]).  A secular convergence failure is retried once with a
// loosened deflation threshold before propagating.
std::vector<double> sample_singular_values(RngStream& rng,
                                           const WishartParams& p,
                                           SampleDiagnostics* diag = nullptr);

// Eigenvalues lambda_i = sigma_i^2 of one draw, descending.
std::vector<double> sample_eigenvalues(RngStream& rng,
                                       const WishartParams& p,
                                       SampleDiagnostics* diag = nullptr);

// Reference model for cov = I: eigenvalues (descending) of B^T B for the
// classical bidiagonal chi ensemble (diagonal chi_{m beta} ... down to
// chi_{(m-n+1) beta}, superdiagonal chi_{(n-1) beta} ... chi_{beta}).
// Diagonal entries are drawn before superdiagonal ones.
std::vector<double> laguerre_bidiagonal_sample(RngStream& rng, double m,
                                               int n, double beta);

} // namespace wishart
