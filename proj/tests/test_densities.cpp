// Oracles: the chi-square reductions at n = 1 (via boost's regularized
// incomplete gamma), the explicit Laguerre form at D = c I, a hand-summed
// partition series for lambda_min, the plain alternating-series route for
// lambda_max at small x, and adaptive quadrature pushing the joint density
// back to unit mass.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wishart/densities.hpp"
#include "wishart/jack.hpp"
#include "wishart/partition.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

using namespace wishart;

namespace {

DensityQuery make_query(double m, int n, double beta, std::vector<double> cov,
                        int max_degree = 30, double tail_tol = 1e-9) {
    DensityQuery q;
    q.params.m = m;
    q.params.n = n;
    q.params.beta = beta;
    q.params.cov = std::move(cov);
    q.truncation.max_degree = max_degree;
    q.truncation.tail_tol = tail_tol;
    return q;
}

// Plain recursive Simpson with Richardson acceptance.
double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    const double fa = f(a);
    const double fm = f(0.5 * (a + b));
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 42);
}

} // namespace

TEST_CASE("normalization constant matches the pure gamma-product form") {
    // Same quantity assembled without any pi bookkeeping: the pi powers of
    // the two generalized Gamma factors cancel the explicit pi factor.
    const double betas[] = {0.5, 1.0, 2.0, 2.5};
    const double ms[] = {3.0, 4.5, 6.25};
    for (double beta : betas)
        for (double m : ms)
            for (int n = 1; n <= 4; ++n) {
                if (!(m > n - 1)) continue;
                double expect = m * n * beta / 2.0 * std::log(2.0);
                for (int i = 0; i < n; ++i) {
                    expect += std::lgamma((m - i) * beta / 2.0);
                    expect += std::lgamma((n - i) * beta / 2.0);
                    expect -= std::lgamma(beta / 2.0);
                }
                CHECK(normalization_logK(m, n, beta) ==
                      doctest::Approx(expect).epsilon(1e-12));
            }
}

TEST_CASE("normalization constant collapses to the chi-square one at n = 1") {
    for (double m : {1.5, 3.0, 8.0})
        for (double beta : {0.5, 1.0, 2.0}) {
            const double expect =
                m * beta / 2.0 * std::log(2.0) + std::lgamma(m * beta / 2.0);
            CHECK(normalization_logK(m, 1, beta) ==
                  doctest::Approx(expect).epsilon(1e-13));
        }
    CHECK_THROWS_AS(normalization_logK(1.0, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(normalization_logK(3.0, 2, -1.0), std::invalid_argument);
}

TEST_CASE("n = 1 joint density equals the scaled chi-square density") {
    for (double m : {2.5, 4.0})
        for (double beta : {1.0, 1.7})
            for (double d : {0.8, 1.9}) {
                const auto q = make_query(m, 1, beta, {d});
                for (double lam : {0.3, 1.0, 2.7, 6.0}) {
                    const double s = m * beta / 2.0;
                    const double expect = (s - 1.0) * std::log(lam) -
                                          lam / (2.0 * d) -
                                          s * std::log(2.0 * d) -
                                          std::lgamma(s);
                    const auto v = log_joint_eigen_density({lam}, q);
                    CHECK(v.converged);
                    CHECK(v.log_density ==
                          doctest::Approx(expect).epsilon(1e-12));
                }
            }
}

TEST_CASE("identity-covariance joint density matches the Laguerre form") {
    const double c = 1.6;
    const std::vector<double> lambda = {7.0, 3.1, 0.9};
    for (double beta : {1.0, 2.5}) {
        const double m = 4.3;
        const int n = 3;
        const auto q = make_query(m, n, beta, {c, c, c});
        double expect = -m * beta / 2.0 * n * std::log(c) -
                        normalization_logK(m, n, beta);
        const double expo = (m - n + 1.0) * beta / 2.0 - 1.0;
        for (double l : lambda) expect += expo * std::log(l) - l / (2.0 * c);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                expect += beta * std::log(lambda[i] - lambda[j]);
        const auto v = log_joint_eigen_density(lambda, q);
        CHECK(v.converged);
        CHECK(v.log_density == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("joint density transforms exactly under covariance scaling") {
    // lambda -> c lambda with D -> c D divides the density by c^n.
    const double c = 2.9;
    const std::vector<double> lambda = {5.5, 2.2, 0.7};
    const auto q1 = make_query(5.3, 3, 1.7, {0.9, 1.4, 2.0}, 40, 1e-11);
    auto q2 = q1;
    for (double& d : q2.params.cov) d *= c;
    std::vector<double> scaled = lambda;
    for (double& l : scaled) l *= c;
    const auto v1 = log_joint_eigen_density(lambda, q1);
    const auto v2 = log_joint_eigen_density(scaled, q2);
    CHECK(v2.log_density ==
          doctest::Approx(v1.log_density - 3.0 * std::log(c)).epsilon(1e-11));
}

TEST_CASE("joint density rejects malformed eigenvalue lists") {
    const auto q = make_query(4.0, 3, 1.0, {1.0, 2.0, 3.0});
    CHECK_THROWS_AS(log_joint_eigen_density({3.0, 2.0}, q),
                    std::invalid_argument);
    CHECK_THROWS_AS(log_joint_eigen_density({3.0, 2.0, -1.0}, q),
                    std::invalid_argument);
    CHECK_THROWS_AS(log_joint_eigen_density({2.0, 2.0, 1.0}, q),
                    std::invalid_argument);
    CHECK_THROWS_AS(log_joint_eigen_density({1.0, 2.0, 3.0}, q),
                    std::invalid_argument);
    auto bad = q;
    bad.truncation.tail_tol = 0.0;
    CHECK_THROWS_AS(log_joint_eigen_density({3.0, 2.0, 1.0}, bad),
                    std::invalid_argument);
}

TEST_CASE("lambda_max cdf at n = 1 matches the incomplete gamma") {
    const double m = 3.7, beta = 1.3, d = 1.6;
    const auto q = make_query(m, 1, beta, {d});
    CHECK(cdf_lambda_max(0.0, q).raw == 0.0);
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0}) {
        const double expect =
            boost::math::gamma_p(m * beta / 2.0, x / (2.0 * d));
        const auto v = cdf_lambda_max(x, q);
        CHECK(v.converged);
        CHECK(v.raw == doctest::Approx(expect).epsilon(1e-8));
    }
    CHECK_THROWS_AS(cdf_lambda_max(-1.0, q), std::invalid_argument);
}

TEST_CASE("lambda_max cdf agrees with the direct alternating series") {
    // Independent route: Gamma prefactor, det power and the plain 1F1 at
    // argument -x D^{-1}/2 through the monomial-table evaluator.
    const double m = 4.2, beta = 1.5;
    const int n = 3;
    const std::vector<double> cov = {0.9, 1.1, 1.5};
    const auto q = make_query(m, n, beta, cov);
    const double a = m * beta / 2.0;
    const double b = (m + n - 1.0) * beta / 2.0 + 1.0;
    SeriesTruncation t;
    t.max_degree = 45;
    t.tail_tol = 1e-13;
    for (double x : {0.3, 0.8, 1.5, 2.5}) {
        std::vector<double> z(cov.size());
        double logdet = 0.0;
        for (std::size_t i = 0; i < cov.size(); ++i) {
            z[i] = -x / (2.0 * cov[i]);
            logdet += std::log(x / (2.0 * cov[i]));
        }
        const auto f = hyp1f1(a, b, z, beta, t);
        REQUIRE(f.converged);
        const double pref =
            std::exp(gamma_n_log(1.0 + (n - 1.0) * beta / 2.0, n, beta).log_abs -
                     gamma_n_log(b, n, beta).log_abs + a * logdet);
        const auto v = cdf_lambda_max(x, q);
        CHECK(v.converged);
        CHECK(v.raw == doctest::Approx(pref * f.value).epsilon(1e-7));
    }
}

TEST_CASE("lambda_max cdf is monotone and saturates at one") {
    const auto q = make_query(3.0, 2, 2.5, {1.0, 2.0});
    double prev = 0.0;
    for (int i = 1; i <= 30; ++i) {
        const double x = 2.0 * i;
        const auto v = cdf_lambda_max(x, q);
        CHECK(v.converged);
        CHECK(v.raw >= prev - 1e-9);
        CHECK(v.clamped >= 0.0);
        CHECK(v.clamped <= 1.0);
        prev = v.raw;
    }
    CHECK(cdf_lambda_max(100.0, q).clamped ==
          doctest::Approx(1.0).epsilon(1e-5));
    CHECK(cdf_lambda_max(0.4, q).raw < 0.05);
}

TEST_CASE("lambda_max cdf depends on x and D only through x * D^{-1}") {
    const double c = 3.7;
    const auto q1 = make_query(4.6, 3, 0.75, {0.8, 1.3, 2.1});
    auto q2 = q1;
    for (double& d : q2.params.cov) d *= c;
    for (double x : {0.7, 3.0, 9.0}) {
        const auto v1 = cdf_lambda_max(x, q1);
        const auto v2 = cdf_lambda_max(c * x, q2);
        CHECK(v2.raw == doctest::Approx(v1.raw).epsilon(1e-12));
    }
}

TEST_CASE("lambda_max cache growth does not disturb earlier answers") {
    const auto q = make_query(3.4, 2, 1.25, {1.0, 1.6});
    const auto before = cdf_lambda_max(1.7, q);
    cdf_lambda_max(55.0, q); // forces a much higher cached degree
    const auto after = cdf_lambda_max(1.7, q);
    CHECK(after.raw == doctest::Approx(before.raw).epsilon(1e-13));
}

TEST_CASE("lambda_min requires the corner exponent to be integral") {
    const auto q = make_query(4.0, 3, 1.1, {1.0, 1.0, 1.0});
    CHECK_THROWS_WITH_AS(cdf_lambda_min(1.0, q),
                         doctest::Contains("nonnegative integer"),
                         std::invalid_argument);
    // t lands in (-1, 0): rejected as negative rather than rounded to 0.
    const auto q2 = make_query(2.5, 3, 0.8, {1.0, 1.0, 1.0});
    CHECK_THROWS_AS(cdf_lambda_min(1.0, q2), std::invalid_argument);
}

TEST_CASE("lambda_min with t = 0 is one minus the trace exponential") {
    // (m - n + 1) beta / 2 = 1.
    const auto q = make_query(7.0, 4, 0.5, {1.0, 2.0, 3.0, 4.0});
    CHECK(cdf_lambda_min(0.0, q).raw == 0.0);
    for (double x : {0.2, 1.0, 3.0, 8.0}) {
        double tau = 0.0;
        for (double d : q.params.cov) tau += x / (2.0 * d);
        const auto v = cdf_lambda_min(x, q);
        CHECK(v.converged);
        CHECK(v.raw == doctest::Approx(1.0 - std::exp(-tau)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(cdf_lambda_min(-0.5, q), std::invalid_argument);
}

TEST_CASE("both extreme cdfs reduce to the same chi-square law at n = 1") {
    const double m = 6.0, beta = 1.0, d = 1.3; // t = 2
    const auto q = make_query(m, 1, beta, {d});
    for (double x : {0.4, 1.5, 4.0, 9.0, 20.0}) {
        const double expect =
            boost::math::gamma_p(m * beta / 2.0, x / (2.0 * d));
        const auto lo = cdf_lambda_min(x, q);
        const auto hi = cdf_lambda_max(x, q);
        CHECK(lo.raw == doctest::Approx(expect).epsilon(1e-10));
        CHECK(hi.raw == doctest::Approx(lo.raw).epsilon(1e-9));
    }
}

TEST_CASE("lambda_min matches a hand-summed partition series") {
    // n = 2, t = 3: sum the truncated series directly off the monomial
    // tables, independently of the branching evaluator used inside.
    const double m = 5.0, beta = 2.0;
    const int n = 2, t = 3;
    const std::vector<double> cov = {0.9, 1.7};
    const auto q = make_query(m, n, beta, cov);
    for (double x : {0.5, 1.3, 2.8}) {
        std::vector<double> y(cov.size());
        double tau = 0.0;
        for (std::size_t i = 0; i < cov.size(); ++i) {
            y[i] = x / (2.0 * cov[i]);
            tau += y[i];
        }
        double sum = 1.0;
        double kfact = 1.0;
        for (int k = 1; k <= n * t; ++k) {
            kfact *= k;
            const auto parts = partitions_of(k, n);
            const auto layer = jack_C_weight_layer(k, beta, y);
            REQUIRE(parts.size() == layer.size());
            for (std::size_t i = 0; i < parts.size(); ++i)
                if (parts[i][0] <= t) sum += layer[i] / kfact;
        }
        const double expect = 1.0 - std::exp(-tau) * sum;
        const auto v = cdf_lambda_min(x, q);
        CHECK(v.raw == doctest::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("lambda_min cdf is monotone from zero toward one") {
    const auto q = make_query(4.0, 3, 5.0, {1.1, 1.2, 1.4}); // t = 4
    double prev = -1.0;
    for (double x : {0.05, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 15.0, 30.0}) {
        const auto v = cdf_lambda_min(x, q);
        CHECK(v.raw >= prev - 1e-12);
        CHECK(v.clamped >= 0.0);
        CHECK(v.clamped <= 1.0);
        prev = v.raw;
    }
    CHECK(cdf_lambda_min(30.0, q).raw > 1.0 - 1e-4);
}

TEST_CASE("joint density integrates to one at n = 1") {
    const double m = 2.8, beta = 1.7, d = 1.4;
    const auto q = make_query(m, 1, beta, {d}, 40, 1e-11);
    auto f = [&](double lam) {
        if (lam <= 0.0) return 0.0;
        return std::exp(log_joint_eigen_density({lam}, q).log_density);
    };
    const double mass = adaptive_simpson(f, 0.0, 98.0, 1e-9);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("joint density integrates to one at n = 2") {
    const double m = 2.6, beta = 2.5;
    const auto q = make_query(m, 2, beta, {0.7, 1.3}, 90, 1e-10);
    auto f = [&](double l1, double l2) {
        if (l2 <= 0.0 || l2 >= l1) return 0.0;
        return std::exp(log_joint_eigen_density({l1, l2}, q).log_density);
    };
    auto outer = [&](double l1) {
        if (l1 <= 0.0) return 0.0;
        auto inner = [&](double l2) { return f(l1, l2); };
        return adaptive_simpson(inner, 0.0, l1, 2e-11);
    };
    const double mass = adaptive_simpson(outer, 0.0, 78.0, 2e-8);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}
