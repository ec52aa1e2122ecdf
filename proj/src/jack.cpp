// Jack polynomial coefficient tables in the monomial basis.
//
// The weight-k table is built from the eigen-equation of the
// Laplace-Beltrami-type operator
//     D* = sum_i x_i^2 d^2/dx_i^2 + beta sum_{i != j} x_i^2/(x_i-x_j) d/dx_i.
// In the monomial basis D* is triangular with respect to dominance: the
// second-order part is diagonal, and the first-order part maps m_mu onto
// monomials m_lambda with lambda strictly dominated by mu.  Writing
// C_kappa = sum c_lambda m_lambda with c_kappa = 1 gives the recurrence
//     c_lambda = beta * sum_{mu  > lambda} A(mu -> lambda) c_mu
//                / (e_kappa - e_lambda),
//     e_lambda = sum_i lambda_i (lambda_i - 1) + beta sum_i (n - i) lambda_i,
// where e_kappa - e_lambda > 0 whenever kappa strictly dominates lambda.
// The C normalization is then fixed by solving the triangular system
// sum_kappa N_kappa C~_kappa = (sum x_i)^k in descending lexicographic
// order.  Coefficients are computed in exact rational arithmetic for
// k <= 8 (beta converts exactly from its binary representation) and in
// long double above.

#include "wishart/jack.hpp"

#include <Eigen/Dense>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace wishart {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// A(mu -> lambda): coefficient of m_lambda in the first-order part of D*
// applied to m_mu.  Built target-side: for a fixed representative b of
// lambda padded to n positions, each position pair (i, j) receives weight
// p - q from the source whose multiset replaces {b_i, b_j} by {p, q} with
// p + q = b_i + b_j and p > max(b_i, b_j).
struct Moves {
    // incoming[t] = merged list of (source index, integer weight)
    std::vector<std::vector<std::pair<int, long>>> incoming;
};

struct TableKey {
    int k;
    int n;
    long long beta_fixed;
    bool operator<(const TableKey& o) const {
        if (k != o.k) return k < o.k;
        if (n != o.n) return n < o.n;
        return beta_fixed < o.beta_fixed;
    }
};

std::mutex g_cache_mutex;
std::map<TableKey, std::unique_ptr<JackTable>>& table_cache() {
    static std::map<TableKey, std::unique_ptr<JackTable>> c;
    return c;
}
std::map<std::pair<int, int>, std::unique_ptr<Moves>>& moves_cache() {
    static std::map<std::pair<int, int>, std::unique_ptr<Moves>> c;
    return c;
}

int find_index(const std::vector<Partition>& parts, const Partition& p) {
    auto it = std::lower_bound(parts.begin(), parts.end(), p,
                               [](const Partition& a, const Partition& b) { return a > b; });
    if (it == parts.end() || *it != p) return -1;
    return static_cast<int>(it - parts.begin());
}

const Moves& moves_for(int k, int n, const std::vector<Partition>& parts) {
    auto key = std::make_pair(k, n);
    auto& cache = moves_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;

    auto mv = std::make_unique<Moves>();
    int P = static_cast<int>(parts.size());
    mv->incoming.resize(parts.size());
    for (int t = 0; t < P; ++t) {
        std::vector<int> b(static_cast<std::size_t>(n), 0);
        std::copy(parts[t].begin(), parts[t].end(), b.begin());
        std::map<int, long> acc;
        Partition cand;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                int total = b[i] + b[j];
                int mx = std::max(b[i], b[j]);
                for (int p = mx + 1; p <= total; ++p) {
                    int q = total - p;
                    cand.clear();
                    for (int r = 0; r < n; ++r)
                        if (r != i && r != j && b[r] > 0) cand.push_back(b[r]);
                    cand.push_back(p);
                    if (q > 0) cand.push_back(q);
                    std::sort(cand.begin(), cand.end(), std::greater<int>());
                    int src = find_index(parts, cand);
                    if (src >= 0) acc[src] += p - q;
                }
            }
        }
        auto& lst = mv->incoming[static_cast<std::size_t>(t)];
        lst.assign(acc.begin(), acc.end());
    }
    const Moves& ref = *mv;
    cache.emplace(key, std::move(mv));
    return ref;
}

template <class T>
T eig_value(const Partition& p, const T& beta, int n) {
    T s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        long pi = p[i];
        s += T(pi * (pi - 1));
        s += beta * T(static_cast<long>(n - 1 - static_cast<int>(i)) * pi);
    }
    return s;
}

template <class T>
T multinomial(int k, const Partition& p) {
    T v = 1;
    for (int i = 2; i <= k; ++i) v *= T(i);
    for (int part : p)
        for (int i = 2; i <= part; ++i) v /= T(i);
    return v;
}

double to_double(const Rational& v) { return v.template convert_to<double>(); }
double to_double(long double v) { return static_cast<double>(v); }

template <class T>
void build_coefficients(const std::vector<Partition>& parts, const Moves& mv,
                        int k, int n, double beta,
                        std::vector<std::vector<double>>& out) {
    const int P = static_cast<int>(parts.size());
    const T betaT(beta);
    std::vector<T> e(parts.size());
    for (int t = 0; t < P; ++t)
        e[static_cast<std::size_t>(t)] = eig_value(parts[static_cast<std::size_t>(t)], betaT, n);

    // Unnormalized rows: row[t0][t] = coefficient of m_{parts[t]} in the
    // eigenvector with leading coefficient 1 at parts[t0].
    std::vector<std::vector<T>> row(parts.size());
    for (int t0 = 0; t0 < P; ++t0) {
        auto& c = row[static_cast<std::size_t>(t0)];
        c.assign(parts.size(), T(0));
        c[static_cast<std::size_t>(t0)] = 1;
        for (int t = t0 + 1; t < P; ++t) {
            T s = 0;
            bool any = false;
            for (const auto& [src, w] : mv.incoming[static_cast<std::size_t>(t)]) {
                if (src < t0) continue;
                const T& cs = c[static_cast<std::size_t>(src)];
                if (cs == 0) continue;
                s += T(w) * cs;
                any = true;
            }
            if (any)
                c[static_cast<std::size_t>(t)] =
                    betaT * s / (e[static_cast<std::size_t>(t0)] - e[static_cast<std::size_t>(t)]);
        }
    }

    // Normalization: sum_kappa N_kappa row[kappa] = (sum x)^k, solved in
    // descending lexicographic order (unit diagonal).
    std::vector<T> N(parts.size());
    for (int t = 0; t < P; ++t) {
        T r = multinomial<T>(k, parts[static_cast<std::size_t>(t)]);
        for (int s = 0; s < t; ++s)
            if (row[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] != 0)
                r -= N[static_cast<std::size_t>(s)] *
                     row[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
        N[static_cast<std::size_t>(t)] = r;
    }

    out.assign(parts.size(), {});
    for (int i = 0; i < P; ++i) {
        auto& dst = out[static_cast<std::size_t>(i)];
        dst.resize(parts.size());
        for (int j = 0; j < P; ++j)
            dst[static_cast<std::size_t>(j)] =
                to_double(N[static_cast<std::size_t>(i)] *
                          row[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
}

long long beta_fixed_point(double beta) {
    return static_cast<long long>(std::llround(beta * 1e12));
}

} // namespace

int JackTable::index_of(const Partition& p) const { return find_index(parts, p); }

const JackTable& jack_table(int k, int n, double beta) {
    if (k < 0) throw std::invalid_argument("jack_table: negative weight");
    if (n < 0) throw std::invalid_argument("jack_table: negative dimension");
    if (!(beta > 0.0)) throw std::invalid_argument("jack_table: beta must be positive");

    TableKey key{k, n, beta_fixed_point(beta)};
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto& cache = table_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;

    auto tab = std::make_unique<JackTable>();
    tab->k = k;
    tab->n = n;
    tab->beta = beta;
    tab->parts = partitions_of(k, std::max(n, 1));
    if (n == 0 && k > 0) tab->parts.clear();
    const Moves& mv = moves_for(k, n, tab->parts);
    if (k <= 8)
        build_coefficients<Rational>(tab->parts, mv, k, n, beta, tab->coeff);
    else
        build_coefficients<long double>(tab->parts, mv, k, n, beta, tab->coeff);
    const JackTable& ref = *tab;
    cache.emplace(key, std::move(tab));
    return ref;
}

double monomial_sym(const Partition& mu, const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (mu.size() > n) return 0.0;
    std::vector<int> a(n, 0);
    std::copy(mu.begin(), mu.end(), a.begin());
    std::sort(a.begin(), a.end());
    const int maxe = mu.empty() ? 0 : mu[0];
    std::vector<double> pw(n * static_cast<std::size_t>(maxe + 1));
    for (std::size_t i = 0; i < n; ++i) {
        pw[i * (maxe + 1)] = 1.0;
        for (int e = 1; e <= maxe; ++e)
            pw[i * (maxe + 1) + static_cast<std::size_t>(e)] =
                pw[i * (maxe + 1) + static_cast<std::size_t>(e - 1)] * x[i];
    }
    double s = 0.0;
    do {
        double term = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            term *= pw[i * (maxe + 1) + static_cast<std::size_t>(a[i])];
        s += term;
    } while (std::next_permutation(a.begin(), a.end()));
    return s;
}

double rho(const Partition& kappa, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("rho: alpha must be positive");
    double s = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i)
        s += kappa[i] * (kappa[i] - 1.0 - (2.0 / alpha) * static_cast<double>(i));
    return s;
}

double jack_C(const Partition& kappa, double beta, const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    if (static_cast<int>(kappa.size()) > n)
        throw std::invalid_argument("jack_C: partition has more parts than variables");
    const int k = weight(kappa);
    if (k == 0) return 1.0;
    const JackTable& tab = jack_table(k, n, beta);
    const int i = tab.index_of(kappa);
    if (i < 0) throw std::invalid_argument("jack_C: partition not admissible");
    const auto& row = tab.coeff[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (std::size_t j = 0; j < tab.parts.size(); ++j)
        if (row[j] != 0.0) s += row[j] * monomial_sym(tab.parts[j], x);
    return s;
}

std::vector<double> jack_C_weight_layer(int k, double beta,
                                        const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    const JackTable& tab = jack_table(k, n, beta);
    std::vector<double> mvals(tab.parts.size());
    for (std::size_t j = 0; j < tab.parts.size(); ++j)
        mvals[j] = monomial_sym(tab.parts[j], x);
    std::vector<double> out(tab.parts.size(), 0.0);
    for (std::size_t i = 0; i < tab.parts.size(); ++i) {
        const auto& row = tab.coeff[i];
        double s = 0.0;
        for (std::size_t j = 0; j < tab.parts.size(); ++j)
            if (row[j] != 0.0) s += row[j] * mvals[j];
        out[i] = s;
    }
    return out;
}

double jack_C_identity(const Partition& kappa, double beta, int n) {
    return jack_C(kappa, beta, std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

double jack_J_one_var(int kappa1, double beta, double x) {
    if (kappa1 < 0) throw std::invalid_argument("jack_J_one_var: negative degree");
    double v = 1.0;
    for (int r = 1; r < kappa1; ++r) v *= 1.0 + r * (2.0 / beta);
    return v * std::pow(x, kappa1);
}

double stanley_det_pullout_check(const Partition& kappa, double beta,
                                 const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (kappa.size() != n || n == 0)
        throw std::invalid_argument("stanley_det_pullout_check: needs kappa_n > 0");
    Partition reduced;
    for (int p : kappa)
        if (p - 1 > 0) reduced.push_back(p - 1);
    double det = 1.0;
    for (double xi : x) det *= xi;
    const double den = det * jack_C(reduced, beta, x);
    if (den == 0.0)
        throw std::invalid_argument("stanley_det_pullout_check: zero denominator");
    return jack_C(kappa, beta, x) / den;
}

MonteCarloEstimate sphere_projection_average_detail(const Partition& kappa,
                                                    double beta,
                                                    const std::vector<double>& lambda,
                                                    std::size_t draws,
                                                    RngStream& rng) {
    const int n = static_cast<int>(lambda.size());
    if (static_cast<int>(kappa.size()) >= n)
        throw std::invalid_argument("sphere_projection_average: needs l(kappa) < n");
    if (draws < 1)
        throw std::invalid_argument("sphere_projection_average: needs draws >= 1");

    const double scale = jack_C_identity(kappa, beta, n) /
                         jack_C_identity(kappa, beta, n - 1);

    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam(i) = lambda[static_cast<std::size_t>(i)];

    double sum = 0.0, sumsq = 0.0;
    std::vector<double> kept(static_cast<std::size_t>(n - 1));
    for (std::size_t d = 0; d < draws; ++d) {
        Eigen::VectorXd q(n);
        for (int i = 0; i < n; ++i) q(i) = chi_sample(rng, beta);
        q /= q.norm();
        Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - q * q.transpose();
        Eigen::MatrixXd M = proj * lam.asDiagonal() * proj;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("sphere_projection_average: eigensolver failed");
        int drop = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(es.eigenvalues()(i)) < std::abs(es.eigenvalues()(drop))) drop = i;
        int w = 0;
        for (int i = 0; i < n; ++i)
            if (i != drop) kept[static_cast<std::size_t>(w++)] = es.eigenvalues()(i);
        const double v = jack_C(kappa, beta, kept);
        sum += v;
        sumsq += v * v;
    }
    const double nn = static_cast<double>(draws);
    const double mean = sum / nn;
    double var = std::max(0.0, sumsq / nn - mean * mean);
    MonteCarloEstimate est;
    est.value = scale * mean;
    est.standard_error = scale * std::sqrt(var / nn);
    est.draws = draws;
    return est;
}

double sphere_projection_average(const Partition& kappa, double beta,
                                 const std::vector<double>& lambda,
                                 std::size_t draws, RngStream& rng) {
    return sphere_projection_average_detail(kappa, beta, lambda, draws, rng).value;
}

double pochhammer_general(double a, const Partition& kappa, double beta) {
    double v = 1.0;
    for (std::size_t i = 0; i < kappa.size(); ++i)
        for (int j = 1; j <= kappa[i]; ++j)
            v *= a - static_cast<double>(i) * beta / 2.0 + (j - 1);
    return v;
}

LogValue gamma_n_log(double c, int n, double beta) {
    if (n < 1) throw std::invalid_argument("gamma_n_log: n must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("gamma_n_log: beta must be positive");
    LogValue out;
    out.log_abs = n * (n - 1) * beta / 4.0 * std::log(std::acos(-1.0));
    out.sign = 1;
    for (int i = 0; i < n; ++i) {
        const double arg = c - i * beta / 2.0;
        if (!(arg > 0.0))
            throw std::invalid_argument("gamma_n_log: argument at or below a pole");
        out.log_abs += std::lgamma(arg);
    }
    return out;
}

} // namespace wishart
