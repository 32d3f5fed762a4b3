#pragma once

#include <span>
#include <vector>

#include "ccfoe/types.hpp"
#include "ccfoe/waveform.hpp"

namespace ccfoe {

// Symbol-spaced samples after matched filtering, one sequence per rail.
struct SymbolStream {
    std::vector<cplx> x;
    std::vector<cplx> y;
    double symbol_rate_hz = 0.0;
};

struct FineEstimate {
    double x_hz = 0.0;
    double y_hz = 0.0;
};

// Root-raised-cosine matched filter sampled at the known symbol instants
// (sample m*sps is the center of symbol m), scaled so a clean matched pair
// returns unit-energy symbols. One full filter span of symbols is dropped at
// each end to clear shaping and filtering transients. The record length must
// be an integer number of symbols of at least 3 spans.
SymbolStream matched_filter_decimate(const DualPolSignal& sig, const TxConfig& cfg);

// Residual-offset estimator for one rail: the modulation is stripped by the
// fourth power (QPSK collapses to a tone at 4 df), located by an n_fft DFT
// peak with three-point log-parabolic interpolation, then divided back by 4.
// The result is folded into the unambiguous range (-rs/8, rs/8].
double fourth_power_cfoe(std::span<const cplx> symbols, double symbol_rate_hz,
                         int n_fft);

// Both rails of a stream, estimated independently.
FineEstimate fourth_power_cfoe(const SymbolStream& stream, int n_fft);

}  // namespace ccfoe
