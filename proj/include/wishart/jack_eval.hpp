#pragma once

#include "wishart/partition.hpp"

#include <vector>

namespace wishart {

// Evaluates the whole family {C_kappa(y) : |kappa| <= max_degree,
// l(kappa) <= y.size()} at a fixed point y in one pass, via the branching
// recurrence over horizontal strips (variable by variable, in the monic
// normalization) followed by conversion to the C normalization.  Layer k
// of the result aligns with partitions_of(k, y.size()) in descending
// lexicographic order, i.e. with jack_table(k, n, beta).parts.
//
// Cost grows with the number of (partition, strip) pairs, not with the
// square of the partition count, which is what makes degree ~100 series
// coefficients affordable.  The packed partition representation limits
// partition length to 8; callers need min(y.size(), max_degree) <= 8.
std::vector<std::vector<double>> jack_C_all_layers(const std::vector<double>& y,
                                                   double beta, int max_degree);

// log C_kappa(I_n) via hook-length products; exact closed form, valid to
// arbitrary degree (all factors positive for l(kappa) <= n).
double jack_C_identity_log(const Partition& kappa, double beta, int n);

} // namespace wishart
