#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccfoe {

using cplx = std::complex<double>;

// Bad numeric/config values discovered while building a pipeline object.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed data handed to an operation (wrong length, non-monotone axis, ...).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem/serialization failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dual-polarization complex baseband record. Both rails share one sample clock.
struct DualPolSignal {
    std::vector<cplx> x;
    std::vector<cplx> y;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return x.size(); }
};

// Throws InputError unless both rails have equal nonzero length and a positive rate.
void validate(const DualPolSignal& sig);

}  // namespace ccfoe
