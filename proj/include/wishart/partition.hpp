#pragma once

#include <vector>

namespace wishart {

// A partition is a weakly decreasing list of positive parts; the empty
// vector is the unique partition of 0.  Stored without zero padding.
using Partition = std::vector<int>;

int weight(const Partition& p);

Partition conjugate(const Partition& p);

// All partitions of k with at most max_len parts, in descending
// lexicographic order.  This order is a linear extension of dominance:
// a partition can only dominate partitions listed after it.
std::vector<Partition> partitions_of(int k, int max_len);

// Dominance order: every prefix sum of a is >= the matching prefix sum
// of b.  Intended for partitions of equal weight.
bool dominates(const Partition& a, const Partition& b);

} // namespace wishart
