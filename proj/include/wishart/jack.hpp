#pragma once

#include "wishart/partition.hpp"
#include "wishart/rng.hpp"

#include <cstddef>
#include <vector>

namespace wishart {

// Monomial-basis coefficient table for the weight-k Jack polynomials
// C_kappa in n variables at a fixed beta.  parts holds partitions_of(k, n)
// in descending lexicographic order; coeff[i][j] is the coefficient of the
// monomial symmetric function m_{parts[j]} in C_{parts[i]} (zero unless
// parts[i] dominates parts[j]).  Normalized so the weight-k family sums to
// (sum x_i)^k.
struct JackTable {
    int k = 0;
    int n = 0;
    double beta = 0.0;
    std::vector<Partition> parts;
    std::vector<std::vector<double>> coeff;

    int index_of(const Partition& p) const; // -1 if absent
};

// Shared cache of coefficient tables, keyed by (k, n, beta rounded at
// 1e-12).  Returned reference stays valid for the process lifetime.
// Construction is exact-rational for k <= 8, extended precision above.
const JackTable& jack_table(int k, int n, double beta);

// Monomial symmetric function m_mu evaluated at x (sum over distinct
// permutations of the padded exponent vector); 0 if mu has more parts
// than x has entries.
double monomial_sym(const Partition& mu, const std::vector<double>& x);

// rho_kappa^alpha = sum_i kappa_i (kappa_i - 1 - (2/alpha)(i-1)).
double rho(const Partition& kappa, double alpha);

// C_kappa^(beta) evaluated at the eigenvalue vector x.  Requires
// l(kappa) <= x.size().
double jack_C(const Partition& kappa, double beta, const std::vector<double>& x);

// All weight-k values {C_kappa(x)} in jack_table(k, n, beta).parts order;
// shares one monomial-evaluation pass across the layer.
std::vector<double> jack_C_weight_layer(int k, double beta,
                                        const std::vector<double>& x);

// C_kappa^(beta)(I_n), evaluated through jack_C at the all-ones vector.
double jack_C_identity(const Partition& kappa, double beta, int n);

// One-variable Jack polynomial in the J normalization:
// x^k1 * prod_{r=1}^{k1-1} (1 + r*(2/beta)).
double jack_J_one_var(int kappa1, double beta, double x);

// For l(kappa) = x.size(): the ratio C_kappa(x) / (prod x_i * C_{kappa-1}(x))
// where kappa-1 subtracts one from every part.  Constant in x for fixed
// (kappa, beta, n); the constancy is the checkable claim.
double stanley_det_pullout_check(const Partition& kappa, double beta,
                                 const std::vector<double>& x);

struct MonteCarloEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    std::size_t draws = 0;
};

// Monte-Carlo average of C_kappa over rank-(n-1) projections of
// diag(lambda): q is drawn as independent chi_beta coordinates normalized
// to the unit sphere, the projected matrix (I-qq^t) diag(lambda) (I-qq^t)
// is eigensolved, and C_kappa of the n-1 retained eigenvalues is averaged
// and rescaled by C_kappa(I_n)/C_kappa(I_{n-1}).  The expectation equals
// C_kappa(lambda).  Requires l(kappa) < n.
MonteCarloEstimate sphere_projection_average_detail(const Partition& kappa,
                                                    double beta,
                                                    const std::vector<double>& lambda,
                                                    std::size_t draws,
                                                    RngStream& rng);
double sphere_projection_average(const Partition& kappa, double beta,
                                 const std::vector<double>& lambda,
                                 std::size_t draws, RngStream& rng);

// Generalized Pochhammer symbol:
// prod_{i=1}^{l} prod_{j=1}^{kappa_i} (a - (i-1) beta/2 + j - 1).
double pochhammer_general(double a, const Partition& kappa, double beta);

struct LogValue {
    double log_abs = 0.0;
    int sign = 1;
};

// Generalized Gamma function pi^{n(n-1)beta/4} prod_i Gamma(c-(i-1)beta/2)
// as log-magnitude + sign; requires c > (n-1)beta/2 (real branch).
LogValue gamma_n_log(double c, int n, double beta);

} // namespace wishart
