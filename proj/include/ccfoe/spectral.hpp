#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ccfoe/types.hpp"

namespace ccfoe {

// DC-centered periodogram of one FFT block. Bin k sits at
// f_k = (k - n_fft/2) * df_hz; both polarizations are summed, no window.
struct SpectralBlock {
    std::vector<double> bins;
    double df_hz = 0.0;
    int n_fft = 0;
};

// Running exponentially weighted PSD average.
struct SpectralState {
    SpectralBlock ewma;
    std::int64_t blocks_seen = 0;
    double xi = 0.98;  // memory factor, [0, 1); 0 bypasses the average
};

// Cumulative power curve prepared for breakpoint regression. x is the
// normalized frequency axis of the *pre-trim* truncated band, so a position
// psi maps to absolute frequency psi * hz_per_unit.
struct CumulativeCurve {
    std::vector<double> x;
    std::vector<double> y;  // nondecreasing, min 0, max 1
    double hz_per_unit = 0.0;
};

// |FFT|^2 of both rails summed, DC-centered. Block lengths must equal n_fft
// (a power of two); df = fs / n_fft.
SpectralBlock block_psd(std::span<const cplx> x_block, std::span<const cplx> y_block,
                        int n_fft, double fs_hz);

// First block initializes the accumulator; afterwards
// ewma = xi * ewma + (1 - xi) * block. Grid mismatches are input errors.
SpectralState ewma_update(SpectralState state, const SpectralBlock& block);

// Power-of-two decimation factor that keeps the occupied band:
//   N = 2^floor(log2(fs / (2 * max{rs (1 + rolloff) / 2 + df_max, rs}))).
// Errors when fs cannot cover the band even undecimated.
int downsample_factor(double fs_hz, double rs_hz, double rolloff, double df_max_hz);

// Keep the central n_fft / n_down bins, i.e. the band
// [-fs / (2 n_down), +fs / (2 n_down)). Bin width is unchanged.
SpectralBlock truncate_spectrum(const SpectralBlock& block, int n_down);

// Cumulative power: out[m] = (df / N) * sum_{k <= m} bins[k].
std::vector<double> accumulate_bins(const SpectralBlock& block);

// Drop ceil(trim_frac * M) points per end, keep pre-trim x positions
// (the m-th point sits at the upper edge of bin m, x = (m + 0.5 - M/2) / M),
// then normalize y to [0, 1]. Needs at least 8 surviving points and a
// non-flat curve.
CumulativeCurve trim_and_normalize(const std::vector<double>& cumulative, double df_hz,
                                   double trim_frac);

}  // namespace ccfoe
