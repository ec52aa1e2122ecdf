// Point evaluation of all Jack polynomials up to a degree bound by the
// horizontal-strip branching recurrence, one variable at a time:
//
//   P_kappa(y_1..y_j) = sum over horizontal strips kappa/mu of
//                       psi(kappa/mu) P_mu(y_1..y_{j-1}) y_j^{|kappa/mu|},
//
// where mu interlaces kappa (kappa_1 >= mu_1 >= kappa_2 >= mu_2 >= ...).
// The strip coefficient is a product over the boxes (i,c) of mu lying in a
// row the strip meets and a column it does not:
//
//   psi = prod  [l + a(aK+1)] [l + 1 + a*aM] / ([l + a(aM+1)] [l + 1 + a*aK])
//
// with a = 2/beta, arms aK = kappa_i - c, aM = mu_i - c, and the shared leg
// l (legs agree in kappa and mu because the column is unchanged).  Two
// structural facts make this evaluable in O(1) work per (kappa, mu) pair
// instead of O(|kappa|):
//
//   * boxes with aK == aM contribute 1, so rows with mu_i == kappa_i need no
//     special casing and the product is over per-box table ratios
//     F[l][t] = (l + 1 + a t) / (l + a (t+1)) and its reciprocal;
//   * the non-excluded columns form nested intervals (0, mu_last],
//     (kappa_last, mu_{last-1}], ..., each with a constant leg, so the
//     products over a row are windowed products along the F tables that
//     slide by one slot as mu_i or kappa_0 steps -- two multiplies per
//     interval per step.
//
// States are stored flat, grouped by the partition with its first part
// removed ("suffix"), so the innermost loops over mu_1 and kappa_1 read and
// write contiguous memory.  All factors are positive ratios of nearby hooks;
// nothing overflows and no cancellation occurs for positive arguments.

#include "wishart/jack_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace wishart {

namespace {

constexpr int kMaxRows = 8;

std::uint64_t pack_parts(const int* p, int len) {
    std::uint64_t k = 0;
    for (int i = 0; i < len; ++i)
        k |= static_cast<std::uint64_t>(p[i] & 0xff) << (8 * i);
    return k;
}

// Flat storage block for all partitions sharing one suffix (parts 2..R).
struct Block {
    std::vector<int> suffix; // without trailing zeros
    int base = 0;            // flat offset of first part == lo
    int lo = 0;              // minimum admissible first part
    int hi = 0;              // maximum admissible first part (degree bound)
    int wsuf = 0;            // weight of the suffix
};

struct Walker {
    const double* F; // F[l*(K+1) + t] = (l+1+alpha t)/(l+alpha(t+1))
    const double* G; // reciprocal of F
    int stride = 0;  // K+1
    const std::vector<double>* cur = nullptr;
    std::vector<double>* nxt = nullptr;
    const std::unordered_map<std::uint64_t, int>* block_of = nullptr;
    const std::vector<Block>* blocks = nullptr;
    const double* ypow = nullptr;
    int K = 0;

    // current target block: kappa = (kappa_0, ks[0..Ls-1])
    const int* ks = nullptr;
    int Ls = 0;
    int wks = 0;
    int tbase = 0; // nxt offset minus lo, indexable by kappa_0

    // interval stack of non-excluded columns (a, b] with owning row
    int ia[kMaxRows] = {};
    int ib[kMaxRows] = {};
    int iown[kMaxRows] = {};
    int nint = 0;
    std::uint64_t sufkey = 0;
    int wmus = 0;

    double f(int l, int t) const { return F[l * stride + t]; }
    double g(int l, int t) const { return G[l * stride + t]; }

    // choose mu_r for rows r = Ls..1; S carries psi of the rows below
    void rows(int r, double S) {
        const int hi = ks[r - 1];
        const int lo = (r == Ls) ? 0 : ks[r];
        double pi = 1.0; // psi contribution of row r at mu_r = v
        for (int v = hi;; --v) {
            const double S2 = S * pi;
            bool pushed = false;
            if (v > lo) {
                ia[nint] = lo;
                ib[nint] = v;
                iown[nint] = r;
                ++nint;
                pushed = true;
            }
            if (v) sufkey |= static_cast<std::uint64_t>(v) << (8 * (r - 1));
            wmus += v;
            if (r == 1)
                leaf(S2);
            else
                rows(r - 1, S2);
            wmus -= v;
            if (v) sufkey &= ~(static_cast<std::uint64_t>(0xff) << (8 * (r - 1)));
            if (pushed) --nint;
            if (v == lo) break;
            // slide row product from mu_r = v to v-1: drop the box in
            // column v and shift the arm window of the remaining boxes
            double upd = f(0, hi - v) * g(0, v - 1 - lo);
            for (int s = 0; s < nint; ++s) {
                const int l = iown[s] - r;
                upd *= g(l, v - 1 - ia[s]) * f(l, v - 1 - ib[s]);
            }
            pi *= upd;
        }
    }

    // innermost double loop over mu_0 = v and kappa_0
    void leaf(double S) {
        const int lo = Ls ? ks[0] : 0;
        const int vmax = K - wks;
        const auto it = block_of->find(sufkey);
        if (it == block_of->end())
            throw std::logic_error("jack_C_all_layers: missing source block");
        const Block& sb = (*blocks)[static_cast<std::size_t>(it->second)];
        const double* P = cur->data() + sb.base - sb.lo; // indexed by v
        double* out = nxt->data() + tbase;               // indexed by kappa_0
        const int wdiff = wks - wmus;
        const double* yp = ypow + wdiff;
        for (int v = lo; v <= vmax; ++v) {
            const double pv = P[v];
            if (pv == 0.0) continue;
            const double bc = S * pv;
            out[v] += bc * yp[0]; // kappa_0 = v: row 0 contributes no factor
            double psi = 1.0;
            if (v == lo) {
                // row 0 of mu has no boxes past the excluded columns
                for (int k0 = v + 1; k0 <= vmax; ++k0) {
                    double upd = 1.0;
                    for (int s = 0; s < nint; ++s) {
                        const int l = iown[s];
                        upd *= g(l, k0 - 1 - ia[s]) * f(l, k0 - 1 - ib[s]);
                    }
                    psi *= upd;
                    out[k0] += bc * psi * yp[k0 - v];
                }
            } else {
                for (int k0 = v + 1; k0 <= vmax; ++k0) {
                    double upd = g(0, k0 - 1 - lo) * f(0, k0 - 1 - v);
                    for (int s = 0; s < nint; ++s) {
                        const int l = iown[s];
                        upd *= g(l, k0 - 1 - ia[s]) * f(l, k0 - 1 - ib[s]);
                    }
                    psi *= upd;
                    out[k0] += bc * psi * yp[k0 - v];
                }
            }
        }
    }
};

// log of the monic-to-C conversion factor: |kappa| log(alpha) +
// log |kappa|! - sum over boxes of log(l + alpha (a + 1)), table-driven
// (ltab[l*stride + a] = log(l + alpha (a + 1))).
double log_conversion_tab(const int* kp, int rows, int k, double logalpha,
                          const double* ltab, int stride) {
    double lg = k * logalpha + std::lgamma(k + 1.0);
    for (int i = 0; i < rows; ++i) {
        int leg = rows - 1 - i; // rows below with kappa_r >= c, c ascending
        for (int c = 1; c <= kp[i]; ++c) {
            while (leg > 0 && kp[i + leg] < c) --leg;
            lg -= ltab[leg * stride + (kp[i] - c)];
        }
    }
    return lg;
}

} // namespace

std::vector<std::vector<double>> jack_C_all_layers(const std::vector<double>& y,
                                                   double beta, int max_degree) {
    const int n = static_cast<int>(y.size());
    if (n < 1)
        throw std::invalid_argument("jack_C_all_layers: empty argument");
    if (!(beta > 0.0))
        throw std::invalid_argument("jack_C_all_layers: beta must be positive");
    if (max_degree < 0)
        throw std::invalid_argument("jack_C_all_layers: negative degree bound");
    if (max_degree > 255)
        throw std::invalid_argument("jack_C_all_layers: degree bound above 255 unsupported");
    const int maxlen = std::min(n, max_degree);
    if (maxlen > kMaxRows)
        throw std::invalid_argument(
            "jack_C_all_layers: partition length above 8 unsupported "
            "(need min(dimension, max_degree) <= 8)");
    const double alpha = 2.0 / beta;
    const int K = max_degree;
    const int R = std::max(maxlen, 1);
    const int stride = K + 1;

    // factor tables over leg l and arm t
    std::vector<double> F(static_cast<std::size_t>(R) * stride);
    std::vector<double> G(F.size()), ltab(F.size());
    for (int l = 0; l < R; ++l) {
        for (int t = 0; t <= K; ++t) {
            const double num = l + 1.0 + alpha * t;
            const double den = l + alpha * (t + 1.0);
            F[static_cast<std::size_t>(l) * stride + t] = num / den;
            G[static_cast<std::size_t>(l) * stride + t] = den / num;
            ltab[static_cast<std::size_t>(l) * stride + t] = std::log(den);
        }
    }

    // flat layout grouped by suffix
    std::vector<Block> blocks;
    std::unordered_map<std::uint64_t, int> block_of;
    int total = 0;
    for (int w = 0; w <= K; ++w) {
        if (w == 0) {
            Block b;
            b.base = total;
            b.lo = 0;
            b.hi = K;
            blocks.push_back(b);
            block_of.emplace(0u, static_cast<int>(blocks.size()) - 1);
            total += b.hi - b.lo + 1;
            continue;
        }
        if (R < 2) break;
        for (auto& s : partitions_of(w, R - 1)) {
            if (s[0] + w > K) continue;
            Block b;
            b.suffix = s;
            b.base = total;
            b.lo = s[0];
            b.hi = K - w;
            b.wsuf = w;
            block_of.emplace(pack_parts(s.data(), static_cast<int>(s.size())),
                             static_cast<int>(blocks.size()));
            total += b.hi - b.lo + 1;
            blocks.push_back(std::move(b));
        }
    }

    std::vector<double> cur(static_cast<std::size_t>(total), 0.0);
    std::vector<double> nxt(static_cast<std::size_t>(total), 0.0);
    cur[0] = 1.0; // empty partition (suffix block 0 starts at v = 0)

    std::vector<double> ypow(static_cast<std::size_t>(K + 1));
    Walker w;
    w.F = F.data();
    w.G = G.data();
    w.stride = stride;
    w.block_of = &block_of;
    w.blocks = &blocks;
    w.K = K;

    for (int j = 0; j < n; ++j) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        ypow[0] = 1.0;
        for (int e = 1; e <= K; ++e)
            ypow[static_cast<std::size_t>(e)] =
                ypow[static_cast<std::size_t>(e - 1)] * y[static_cast<std::size_t>(j)];
        w.cur = &cur;
        w.nxt = &nxt;
        w.ypow = ypow.data();
        for (const Block& tb : blocks) {
            const int Ls = static_cast<int>(tb.suffix.size());
            if (Ls > j) continue; // target would need more variables
            w.ks = tb.suffix.data();
            w.Ls = Ls;
            w.wks = tb.wsuf;
            w.tbase = tb.base - tb.lo;
            if (Ls == 0)
                w.leaf(1.0);
            else
                w.rows(Ls, 1.0);
        }
        cur.swap(nxt);
    }

    // regroup by degree in descending-lex partition order and convert to
    // the C normalization
    std::vector<std::vector<Partition>> parts(static_cast<std::size_t>(K + 1));
    std::vector<std::unordered_map<std::uint64_t, int>> pos(parts.size());
    std::vector<std::vector<double>> out(parts.size());
    for (int k = 0; k <= K; ++k) {
        parts[static_cast<std::size_t>(k)] = partitions_of(k, std::max(maxlen, 1));
        auto& m = pos[static_cast<std::size_t>(k)];
        const auto& pl = parts[static_cast<std::size_t>(k)];
        m.reserve(pl.size() * 2);
        for (std::size_t i = 0; i < pl.size(); ++i)
            m.emplace(pack_parts(pl[i].data(), static_cast<int>(pl[i].size())),
                      static_cast<int>(i));
        out[static_cast<std::size_t>(k)].assign(pl.size(), 0.0);
    }
    const double logalpha = std::log(alpha);
    int full[kMaxRows];
    for (const Block& b : blocks) {
        const int Ls = static_cast<int>(b.suffix.size());
        for (int i = 0; i < Ls; ++i) full[i + 1] = b.suffix[static_cast<std::size_t>(i)];
        for (int v = b.lo; v <= b.hi; ++v) {
            const int k = v + b.wsuf;
            const double raw = cur[static_cast<std::size_t>(b.base + v - b.lo)];
            full[0] = v;
            const int len = v > 0 ? Ls + 1 : 0;
            std::uint64_t key = pack_parts(full, len);
            const auto it = pos[static_cast<std::size_t>(k)].find(key);
            if (it == pos[static_cast<std::size_t>(k)].end())
                throw std::logic_error("jack_C_all_layers: unindexed partition");
            double val = raw;
            if (val != 0.0)
                val *= std::exp(log_conversion_tab(full, len, k, logalpha,
                                                   ltab.data(), stride));
            out[static_cast<std::size_t>(k)][static_cast<std::size_t>(it->second)] = val;
        }
    }
    return out;
}

double jack_C_identity_log(const Partition& kappa, double beta, int n) {
    if (static_cast<int>(kappa.size()) > n)
        throw std::invalid_argument("jack_C_identity_log: more parts than variables");
    if (!(beta > 0.0))
        throw std::invalid_argument("jack_C_identity_log: beta must be positive");
    const double alpha = 2.0 / beta;
    const int k = weight(kappa);
    const int rows = static_cast<int>(kappa.size());
    double lg = k * std::log(alpha) + std::lgamma(k + 1.0);
    for (int i = 0; i < rows; ++i) {
        for (int c = 1; c <= kappa[static_cast<std::size_t>(i)]; ++c) {
            int leg = 0;
            for (int r = i + 1; r < rows; ++r)
                if (kappa[static_cast<std::size_t>(r)] >= c) ++leg;
            const int arm = kappa[static_cast<std::size_t>(i)] - c;
            lg -= std::log(leg + alpha * (arm + 1)); // upper hook
            lg += std::log(n - i + alpha * (c - 1.0)); // content factor
            lg -= std::log(leg + 1.0 + alpha * arm);   // lower hook
        }
    }
    return lg;
}

} // namespace wishart
