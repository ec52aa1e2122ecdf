#include "wishart/sampler.hpp"

#include "wishart/errors.hpp"
#include "wishart/secular.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wishart {

void WishartParams::validate() const {
    if (n < 1)
        throw std::invalid_argument("WishartParams: n must be at least 1");
    if (!(beta > 0.0))
        throw std::invalid_argument("WishartParams: beta must be positive");
    if (!(m > n - 1))
        throw std::invalid_argument("WishartParams: need m > n - 1");
    if (cov.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("WishartParams: cov must have n entries");
    for (double x : cov)
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument("WishartParams: cov entries must be positive and finite");
}

std::vector<double> sample_singular_values(RngStream& rng,
                                           const WishartParams& p,
                                           SampleDiagnostics* diag) {
    p.validate();

    std::vector<double> sigma{chi_sample(rng, p.m * p.beta) * std::sqrt(p.cov[0])};
    std::size_t peak = 1;
    double corner = sigma[0];
    double diag_product = 1.0;

    BrokenArrowMatrix B;
    for (int level = 2; level <= p.n; ++level) {
        double scale = std::sqrt(p.cov[level - 1]);
        B.b = std::move(sigma);
        B.a.resize(level);
        for (int i = 0; i < level - 1; ++i)
            B.a[i] = chi_sample(rng, p.beta) * scale;
        B.a[level - 1] = chi_sample(rng, (p.m - level + 1) * p.beta) * scale;

        if (diag) {
            corner = B.a[level - 1];
            diag_product = 1.0;
            for (double x : B.b) diag_product *= x;
        }

        SpectralFactorization fac;
        try {
            fac = broken_arrow_svd(B);
        } catch (const ConvergenceError&) {
            fac = broken_arrow_svd(B, 8.0); // retry once, fresh deflation
        }
        sigma = std::move(fac.values);

        // everything held at this level: b, a, new values, new q
        peak = std::max<std::size_t>(peak, 4 * level);
    }

    if (diag) {
        diag->peak_live_values = peak;
        diag->last_level_corner = corner;
        diag->last_level_diag_product = diag_product;
    }
    return sigma;
}

std::vector<double> sample_eigenvalues(RngStream& rng,
                                       const WishartParams& p,
                                       SampleDiagnostics* diag) {
    std::vector<double> sigma = sample_singular_values(rng, p, diag);
    for (double& x : sigma) x *= x;
    return sigma;
}

std::vector<double> laguerre_bidiagonal_sample(RngStream& rng, double m,
                                               int n, double beta) {
    if (n < 1)
        throw std::invalid_argument("laguerre_bidiagonal_sample: n must be at least 1");
    if (!(beta > 0.0))
        throw std::invalid_argument("laguerre_bidiagonal_sample: beta must be positive");
    if (!(m > n - 1))
        throw std::invalid_argument("laguerre_bidiagonal_sample: need m > n - 1");

    std::vector<double> x(n), y(n > 0 ? n - 1 : 0);
    for (int i = 0; i < n; ++i)
        x[i] = chi_sample(rng, (m - i) * beta);
    for (int i = 0; i < n - 1; ++i)
        y[i] = chi_sample(rng, (n - 1 - i) * beta);

    Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 0);
    diag(0) = x[0] * x[0];
    for (int i = 1; i < n; ++i)
        diag(i) = x[i] * x[i] + y[i - 1] * y[i - 1];
    for (int i = 0; i + 1 < n; ++i)
        sub(i) = x[i] * y[i];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    return lam;
}

} // namespace wishart
