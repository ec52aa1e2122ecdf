#pragma once

#include <cstdint>
#include <random>

namespace wishart {

// Deterministic random stream addressed by (seed, stream id).  Two streams
// built from the same pair replay the same draws on a given build; distinct
// stream ids decorrelate.  All variate transforms are implemented here
// rather than through std::*_distribution so the output does not depend on
// the standard library's unspecified algorithms.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // uniform on [0,1) with 53 random bits
    double uniform();

    // standard normal (Marsaglia polar, spare discarded)
    double normal();

    // gamma with the given shape and unit scale, valid for any shape > 0
    double gamma(double shape);

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t stream_;
};

// chi-distributed draw with dof degrees of freedom (dof > 0, fractional
// allowed): sqrt of a gamma(dof/2, scale 2) variate.
double chi_sample(RngStream& rng, double dof);

} // namespace wishart
