#include "wishart/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace wishart {

int weight(const Partition& p) {
    int s = 0;
    for (int x : p) s += x;
    return s;
}

Partition conjugate(const Partition& p) {
    Partition c;
    if (p.empty()) return c;
    c.resize(static_cast<std::size_t>(p[0]));
    for (int j = 0; j < p[0]; ++j) {
        int cnt = 0;
        for (int x : p)
            if (x > j) ++cnt;
        c[static_cast<std::size_t>(j)] = cnt;
    }
    return c;
}

namespace {

// Parts are chosen largest-first, so the output is naturally in
// descending lexicographic order.
void gen_partitions(int k, int max_part, int slots, Partition& cur,
                    std::vector<Partition>& out) {
    if (k == 0) {
        out.push_back(cur);
        return;
    }
    if (slots == 0)
        return;
    int hi = std::min(k, max_part);
    int lo = (k + slots - 1) / slots; // anything smaller cannot fill k
    for (int p = hi; p >= lo; --p) {
        cur.push_back(p);
        gen_partitions(k - p, p, slots - 1, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<Partition> partitions_of(int k, int max_len) {
    if (k < 0)
        throw std::invalid_argument("partitions_of: weight must be nonnegative");
    if (max_len < 1)
        throw std::invalid_argument("partitions_of: max_len must be positive");
    std::vector<Partition> out;
    Partition cur;
    gen_partitions(k, k, max_len, cur, out);
    return out;
}

bool dominates(const Partition& a, const Partition& b) {
    std::size_t len = std::max(a.size(), b.size());
    long sa = 0, sb = 0;
    for (std::size_t i = 0; i < len; ++i) {
        sa += i < a.size() ? a[i] : 0;
        sb += i < b.size() ? b[i] : 0;
        if (sa < sb) return false;
    }
    return true;
}

} // namespace wishart
