#pragma once

#include <stdexcept>
#include <string>

namespace wishart {

// Thrown when an iterative solve fails to meet its residual tolerance
// within the iteration cap.  Carries the active bracket so callers can
// report or retry.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double lo, double hi, int iterations)
        : std::runtime_error(what), lo_(lo), hi_(hi), iterations_(iterations) {}

    double bracket_lo() const { return lo_; }
    double bracket_hi() const { return hi_; }
    int iterations() const { return iterations_; }

private:
    double lo_;
    double hi_;
    int iterations_;
};

} // namespace wishart
