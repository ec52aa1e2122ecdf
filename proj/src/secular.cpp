#include "wishart/secular.hpp"

#include "wishart/errors.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wishart {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSecularIter = 100;

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string(what) + ": entries must be finite");
}

// f(lambda) = corner - lambda - sum_j c_j^2 / (d_j - lambda), evaluated at
// lambda = ref + tau with each pole difference formed as (d_j - ref) - tau.
// Keeping ref equal to the pole nearest the root makes the critical
// difference exact.  Also returns f' and the magnitude sum entering the
// stopping rule.
struct SecularEval {
    double f;
    double fp;
    double scale;
};

SecularEval eval_shifted(const std::vector<double>& d,
                         const std::vector<double>& c,
                         double corner, double ref, double tau) {
    double lambda = ref + tau;
    SecularEval e{corner - lambda, -1.0, std::abs(lambda)};
    for (std::size_t j = 0; j < d.size(); ++j) {
        double delta = (d[j] - ref) - tau;
        double r = c[j] / delta;
        double term = c[j] * r;
        e.f -= term;
        e.fp -= r * r;
        e.scale += std::abs(term);
    }
    return e;
}

// One root of the shifted secular function on the open tau-interval
// (tlo, thi), where f > 0 toward tlo and f < 0 toward thi (f is strictly
// decreasing between consecutive poles).  Endpoints may sit on poles and
// are never evaluated.
double solve_shifted(const std::vector<double>& d,
                     const std::vector<double>& c,
                     double corner, double ref, double tlo, double thi) {
    double tau = 0.5 * (tlo + thi);
    for (int it = 0; it < kMaxSecularIter; ++it) {
        SecularEval e = eval_shifted(d, c, corner, ref, tau);
        if (std::abs(e.f) <= 4.0 * kEps * e.scale)
            return tau;
        if (e.f > 0.0)
            tlo = tau;
        else
            thi = tau;
        double width = thi - tlo;
        if (width <= 2.0 * kEps * std::max(std::abs(tlo), std::abs(thi)) + DBL_MIN)
            return tau;
        double next = tau - e.f / e.fp;
        if (!(next > tlo && next < thi))
            next = 0.5 * (tlo + thi);
        if (next == tau)
            next = 0.5 * (tlo + thi);
        if (next == tau)
            return tau;
        tau = next;
    }
    throw ConvergenceError("secular iteration exceeded 100 steps",
                           ref + tlo, ref + thi, kMaxSecularIter);
}

double gershgorin_upper(const std::vector<double>& d,
                        const std::vector<double>& c, double corner) {
    double radius = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j)
        radius += std::abs(c[j]);
    double ub = corner + radius;
    for (std::size_t j = 0; j < d.size(); ++j)
        ub = std::max(ub, d[j] + std::abs(c[j]));
    return ub;
}

double gershgorin_lower(const std::vector<double>& d,
                        const std::vector<double>& c, double corner) {
    double radius = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j)
        radius += std::abs(c[j]);
    double lb = corner - radius;
    for (std::size_t j = 0; j < d.size(); ++j)
        lb = std::min(lb, d[j] - std::abs(c[j]));
    return lb;
}

} // namespace

Deflation deflate(const ArrowMatrix& A, double tol_scale) {
    if (A.c.size() != A.d.size() + 1)
        throw std::invalid_argument("deflate: need c.size() == d.size() + 1");
    require_finite(A.d, "deflate");
    require_finite(A.c, "deflate");
    if (!(tol_scale > 0.0))
        throw std::invalid_argument("deflate: tol_scale must be positive");

    const std::size_t head = A.d.size();
    const double corner = A.c[head];

    double scale = std::abs(corner);
    for (double x : A.d) scale = std::max(scale, std::abs(x));
    for (double x : A.c) scale = std::max(scale, std::abs(x));

    Deflation out;
    out.tol = 64.0 * kEps * scale * tol_scale;

    std::vector<int> order(head);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return A.d[i] > A.d[j]; });

    std::vector<double> ds(head), cs(head);
    for (std::size_t i = 0; i < head; ++i) {
        ds[i] = A.d[order[i]];
        cs[i] = A.c[order[i]];
    }

    // Coincident diagonal entries: sweep each run from the bottom, rotating
    // the pair norm into the run head so every other coupling vanishes.
    std::size_t i = 0;
    while (i < head) {
        std::size_t j = i;
        while (j + 1 < head && ds[j] - ds[j + 1] <= out.tol)
            ++j;
        for (std::size_t r = j; r > i; --r) {
            cs[r - 1] = std::hypot(cs[r - 1], cs[r]);
            cs[r] = 0.0;
        }
        i = j + 1;
    }

    for (std::size_t k = 0; k < head; ++k) {
        if (std::abs(cs[k]) <= out.tol) {
            out.fixed.emplace_back(ds[k], order[k]);
        } else {
            out.reduced.d.push_back(ds[k]);
            out.reduced.c.push_back(cs[k]);
        }
    }
    out.reduced.c.push_back(corner);
    return out;
}

double secular_root(double bracket_lo, double bracket_hi,
                    const std::vector<double>& d,
                    const std::vector<double>& c) {
    if (c.size() != d.size() + 1)
        throw std::invalid_argument("secular_root: need c.size() == d.size() + 1");
    require_finite(d, "secular_root");
    require_finite(c, "secular_root");
    if (!(bracket_lo < bracket_hi))
        throw std::invalid_argument("secular_root: empty bracket");

    const std::size_t head = d.size();
    const double corner = c[head];
    std::vector<double> couplings(c.begin(), c.end() - 1);

    double lo = bracket_lo;
    double hi = bracket_hi;
    if (std::isinf(hi)) {
        hi = gershgorin_upper(d, couplings, corner);
        hi += kEps * std::max(1.0, std::abs(hi));
        while (eval_shifted(d, couplings, corner, 0.0, hi).f > 0.0)
            hi += std::max(1.0, std::abs(hi));
    }
    if (std::isinf(lo)) {
        lo = gershgorin_lower(d, couplings, corner);
        lo -= kEps * std::max(1.0, std::abs(lo));
        while (eval_shifted(d, couplings, corner, 0.0, lo).f < 0.0)
            lo -= std::max(1.0, std::abs(lo));
    }
    if (!(lo < hi))
        throw std::invalid_argument("secular_root: bracket collapsed after clipping");

    // Anchor at the pole nearest the bracket; endpoints equal to poles keep
    // their analytic signs (f -> +inf right of a pole, -inf left of one).
    double mid = 0.5 * (lo + hi);
    double ref = 0.0;
    bool have_ref = false;
    for (double pole : d) {
        if (!have_ref || std::abs(pole - mid) < std::abs(ref - mid)) {
            ref = pole;
            have_ref = true;
        }
    }
    if (!have_ref)
        ref = 0.0;

    auto on_pole = [&](double x) {
        for (double pole : d)
            if (x == pole)
                return true;
        return false;
    };
    if (!on_pole(lo)) {
        if (eval_shifted(d, couplings, corner, ref, lo - ref).f < 0.0)
            throw std::invalid_argument("secular_root: f(bracket_lo) < 0, no root bracketed");
    }
    if (!on_pole(hi)) {
        if (eval_shifted(d, couplings, corner, ref, hi - ref).f > 0.0)
            throw std::invalid_argument("secular_root: f(bracket_hi) > 0, no root bracketed");
    }

    double tau = solve_shifted(d, couplings, corner, ref, lo - ref, hi - ref);
    return ref + tau;
}

std::vector<double> last_row_q(const std::vector<double>& lambda,
                               const std::vector<double>& d,
                               const std::vector<double>& c) {
    if (c.size() != d.size() + 1)
        throw std::invalid_argument("last_row_q: need c.size() == d.size() + 1");
    std::vector<double> q(lambda.size());
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        double s = 1.0;
        for (std::size_t j = 0; j < d.size(); ++j) {
            double r = c[j] / (lambda[k] - d[j]);
            s += r * r;
        }
        q[k] = 1.0 / std::sqrt(s);
    }
    return q;
}

namespace {

// Shared reassembly: interleave secular roots (descending) with deflated
// eigenpairs (q entry exactly zero), then renormalize the last row.
SpectralFactorization assemble(std::vector<double>&& root_values,
                               std::vector<double>&& root_q,
                               const std::vector<std::pair<double, int>>& fixed) {
    SpectralFactorization out;
    const std::size_t n = root_values.size() + fixed.size();
    out.values.reserve(n);
    out.q.reserve(n);

    std::size_t a = 0, b = 0;
    while (a < root_values.size() || b < fixed.size()) {
        bool take_root = b == fixed.size() ||
                         (a < root_values.size() && root_values[a] >= fixed[b].first);
        if (take_root) {
            out.values.push_back(root_values[a]);
            out.q.push_back(root_q[a]);
            ++a;
        } else {
            out.values.push_back(fixed[b].first);
            out.q.push_back(0.0);
            ++b;
        }
    }

    double norm2 = 0.0;
    for (double x : out.q) norm2 += x * x;
    double norm = std::sqrt(norm2);
    out.ortho_defect = std::abs(norm - 1.0);
    if (norm > 0.0)
        for (double& x : out.q) x /= norm;
    return out;
}

} // namespace

SpectralFactorization arrow_eigen(const ArrowMatrix& A) {
    if (A.c.empty())
        throw std::invalid_argument("arrow_eigen: empty matrix");
    if (A.c.size() != A.d.size() + 1)
        throw std::invalid_argument("arrow_eigen: need c.size() == d.size() + 1");
    if (A.c.size() == 1) {
        if (!std::isfinite(A.c[0]))
            throw std::invalid_argument("arrow_eigen: entries must be finite");
        return SpectralFactorization{{A.c[0]}, {1.0}, 0.0};
    }

    Deflation dfl = deflate(A);
    const std::vector<double>& d = dfl.reduced.d;
    const std::size_t head = d.size();
    const double corner = dfl.reduced.c[head];
    std::vector<double> cc(dfl.reduced.c.begin(), dfl.reduced.c.end() - 1);

    std::vector<double> roots, rootq;
    roots.reserve(head + 1);
    rootq.reserve(head + 1);

    auto push_root = [&](double ref, double tau) {
        double s = 1.0;
        for (std::size_t j = 0; j < head; ++j) {
            double delta = (ref - d[j]) + tau; // lambda - d_j
            double r = cc[j] / delta;
            s += r * r;
        }
        roots.push_back(ref + tau);
        rootq.push_back(1.0 / std::sqrt(s));
    };

    if (head == 0) {
        roots.push_back(corner);
        rootq.push_back(1.0);
    } else {
        // top gap (d_0, ub]
        double ub = gershgorin_upper(d, cc, corner);
        ub += kEps * std::max(1.0, std::abs(ub));
        while (eval_shifted(d, cc, corner, d[0], ub - d[0]).f > 0.0)
            ub += std::max(1.0, std::abs(ub));
        push_root(d[0], solve_shifted(d, cc, corner, d[0], 0.0, ub - d[0]));

        // interior gaps (d_k, d_{k-1})
        for (std::size_t k = 1; k < head; ++k) {
            double mid = 0.5 * (d[k] + d[k - 1]);
            if (eval_shifted(d, cc, corner, d[k], mid - d[k]).f > 0.0)
                push_root(d[k - 1], solve_shifted(d, cc, corner, d[k - 1],
                                                  mid - d[k - 1], 0.0));
            else
                push_root(d[k], solve_shifted(d, cc, corner, d[k],
                                              0.0, mid - d[k]));
        }

        // bottom gap [lb, d_last)
        double lb = gershgorin_lower(d, cc, corner);
        lb -= kEps * std::max(1.0, std::abs(lb));
        while (eval_shifted(d, cc, corner, d[head - 1], lb - d[head - 1]).f < 0.0)
            lb -= std::max(1.0, std::abs(lb));
        push_root(d[head - 1],
                  solve_shifted(d, cc, corner, d[head - 1], lb - d[head - 1], 0.0));
    }

    return assemble(std::move(roots), std::move(rootq), dfl.fixed);
}

SpectralFactorization broken_arrow_svd(const BrokenArrowMatrix& B,
                                       double tol_scale) {
    if (B.a.size() != B.b.size() + 1)
        throw std::invalid_argument("broken_arrow_svd: need a.size() == b.size() + 1");
    require_finite(B.b, "broken_arrow_svd");
    require_finite(B.a, "broken_arrow_svd");
    for (double x : B.b)
        if (!(x > 0.0))
            throw std::invalid_argument("broken_arrow_svd: diagonal must be strictly positive");
    for (double x : B.a)
        if (x < 0.0)
            throw std::invalid_argument("broken_arrow_svd: last column must be nonnegative");

    const std::size_t n = B.a.size();
    if (n == 1)
        return SpectralFactorization{{B.a[0]}, {1.0}, 0.0};

    ArrowMatrix gram;
    gram.d.resize(n - 1);
    gram.c.resize(n);
    double corner = 0.0;
    for (std::size_t j = 0; j < n - 1; ++j) {
        gram.d[j] = B.b[j] * B.b[j];
        gram.c[j] = B.a[j] * B.b[j];
        corner += B.a[j] * B.a[j];
    }
    corner += B.a[n - 1] * B.a[n - 1];
    gram.c[n - 1] = corner;

    Deflation dfl = deflate(gram, tol_scale);
    const std::size_t head = dfl.reduced.d.size();
    const double rcorner = dfl.reduced.c[head];
    std::vector<double> cc(dfl.reduced.c.begin(), dfl.reduced.c.end() - 1);

    // Poles in the sigma variable; d entries are exact squares of these.
    std::vector<double> s(head);
    for (std::size_t j = 0; j < head; ++j)
        s[j] = std::sqrt(dfl.reduced.d[j]);

    // Squared column weights a_j^2 = c_j^2 / d_j of the triangular picture.
    // Together with a_n^2 they express the bottom root as
    //   g(sigma) = a_n^2 - sigma^2 (1 + sum_j asq_j / (s_j^2 - sigma^2)),
    // a balance of small same-order quantities, so the smallest singular
    // value keeps full relative accuracy even orders of magnitude below
    // ||B||.  (The corner form computes it as a difference of ||B||^2-sized
    // sums and loses exactly that accuracy.)  Detached deflation poles are
    // not folded back into an_sq: their c_k^2/d_k sit below tol^2/d_k, far
    // under deflation's own O(tol) perturbation.
    const double an_sq = B.a[n - 1] * B.a[n - 1];
    std::vector<double> asq(head);
    for (std::size_t j = 0; j < head; ++j)
        asq[j] = cc[j] * cc[j] / dfl.reduced.d[j];

    // g(sigma) = corner - sigma^2 - sum c_j^2 / ((s_j - sigma)(s_j + sigma)),
    // evaluated with sigma = ref + tau so both factors stay accurate.
    auto eval_sigma = [&](double ref, double tau, double& g, double& gp,
                          double& scale) {
        double sigma = ref + tau;
        g = rcorner - sigma * sigma;
        scale = sigma * sigma;
        double sum = 0.0;
        for (std::size_t j = 0; j < head; ++j) {
            double dl = ((s[j] - ref) - tau) * ((s[j] + ref) + tau);
            double r = cc[j] / dl;
            double term = cc[j] * r;
            g -= term;
            sum += r * r;
            scale += std::abs(term);
        }
        gp = -2.0 * sigma * (1.0 + sum);
    };

    auto solve_sigma = [&](double ref, double tlo, double thi) {
        double tau = 0.5 * (tlo + thi);
        for (int it = 0; it < kMaxSecularIter; ++it) {
            double g, gp, scale;
            eval_sigma(ref, tau, g, gp, scale);
            if (std::abs(g) <= 4.0 * kEps * scale)
                return tau;
            if (g > 0.0)
                tlo = tau;
            else
                thi = tau;
            double width = thi - tlo;
            if (width <= 2.0 * kEps * std::max(std::abs(tlo), std::abs(thi)) + DBL_MIN)
                return tau;
            double next = tau - g / gp;
            if (!(next > tlo && next < thi))
                next = 0.5 * (tlo + thi);
            if (next == tau)
                next = 0.5 * (tlo + thi);
            if (next == tau)
                return tau;
            tau = next;
        }
        throw ConvergenceError("singular value iteration exceeded 100 steps",
                               ref + tlo, ref + thi, kMaxSecularIter);
    };

    // Bottom root in the direct sigma variable.  No pole shift: rebuilding
    // sigma as s_last + tau would smear eps * s_last of absolute noise over
    // a root that may be far smaller.  Every psi term is positive below the
    // last pole, so `scale` tracks the true magnitude of what g balances.
    auto eval_bottom = [&](double sigma, double& g, double& gp,
                           double& scale) {
        double psi = 1.0;
        double curve = 0.0;
        for (std::size_t j = 0; j < head; ++j) {
            double dl = (s[j] - sigma) * (s[j] + sigma);
            double r = asq[j] / dl;
            psi += r;
            curve += r / dl;
        }
        g = an_sq - sigma * sigma * psi;
        gp = -2.0 * sigma * (psi + sigma * sigma * curve);
        scale = an_sq + sigma * sigma * psi;
    };

    auto solve_bottom = [&]() {
        // psi is increasing on [0, s_last), so sqrt(an_sq / psi(0)) bounds
        // the root from above and sits within an O(1) factor of it; Newton
        // from half that point lands in a handful of steps.
        double psi0 = 1.0;
        for (std::size_t j = 0; j < head; ++j)
            psi0 += asq[j] / dfl.reduced.d[j];
        double lo = 0.0;
        double hi = std::min(s[head - 1] * (1.0 - kEps),
                             std::sqrt(an_sq / psi0));
        double sigma = 0.5 * hi;
        for (int it = 0; it < kMaxSecularIter; ++it) {
            double g, gp, scale;
            eval_bottom(sigma, g, gp, scale);
            if (std::abs(g) <= 4.0 * kEps * scale)
                return sigma;
            if (g > 0.0)
                lo = sigma;
            else
                hi = sigma;
            if (hi - lo <= 2.0 * kEps * hi + DBL_MIN)
                return sigma;
            double next = sigma - g / gp;
            if (!(next > lo && next < hi))
                next = 0.5 * (lo + hi);
            if (next == sigma)
                next = 0.5 * (lo + hi);
            if (next == sigma)
                return sigma;
            sigma = next;
        }
        throw ConvergenceError("singular value iteration exceeded 100 steps",
                               lo, hi, kMaxSecularIter);
    };

    std::vector<double> roots, rootq;
    roots.reserve(head + 1);
    rootq.reserve(head + 1);

    auto push_root = [&](double ref, double tau) {
        double sigma = ref + tau;
        double acc = 1.0;
        for (std::size_t j = 0; j < head; ++j) {
            double dl = ((ref - s[j]) + tau) * ((ref + s[j]) + tau); // sigma^2 - s_j^2
            double r = cc[j] / dl;
            acc += r * r;
        }
        roots.push_back(sigma);
        rootq.push_back(1.0 / std::sqrt(acc));
    };

    if (head == 0) {
        roots.push_back(std::sqrt(std::max(rcorner, 0.0)));
        rootq.push_back(1.0);
    } else {
        double ub = std::sqrt(std::max(gershgorin_upper(dfl.reduced.d, cc, rcorner), 0.0));
        ub += kEps * std::max(1.0, ub);
        {
            double g, gp, scale;
            eval_sigma(s[0], ub - s[0], g, gp, scale);
            while (g > 0.0) {
                ub += std::max(1.0, ub);
                eval_sigma(s[0], ub - s[0], g, gp, scale);
            }
        }
        push_root(s[0], solve_sigma(s[0], 0.0, ub - s[0]));

        for (std::size_t k = 1; k < head; ++k) {
            double mid = 0.5 * (s[k] + s[k - 1]);
            double g, gp, scale;
            eval_sigma(s[k], mid - s[k], g, gp, scale);
            if (g > 0.0)
                push_root(s[k - 1], solve_sigma(s[k - 1], mid - s[k - 1], 0.0));
            else
                push_root(s[k], solve_sigma(s[k], 0.0, mid - s[k]));
        }

        // bottom root lives in [0, s_last); g(0) = a_n^2 exactly, so the
        // matrix is singular iff the last column entry vanishes
        if (an_sq == 0.0)
            push_root(0.0, 0.0);
        else
            push_root(0.0, solve_bottom());
    }

    std::vector<std::pair<double, int>> fixed_sigma;
    fixed_sigma.reserve(dfl.fixed.size());
    for (auto& [val, coord] : dfl.fixed)
        fixed_sigma.emplace_back(B.b[coord], coord); // exact, avoids sqrt(b^2)

    std::sort(fixed_sigma.begin(), fixed_sigma.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });

    return assemble(std::move(roots), std::move(rootq), fixed_sigma);
}

} // namespace wishart
