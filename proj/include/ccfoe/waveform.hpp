#pragma once

#include <cstdint>
#include <vector>

#include "ccfoe/types.hpp"

namespace ccfoe {

// Transmitter parameters for one dual-polarization QPSK emission.
struct TxConfig {
    double symbol_rate_hz = 4e9;
    double rolloff = 0.1;        // root-raised-cosine excess bandwidth, [0, 1]
    int sps = 16;                // samples per symbol; power of two, >= 2
    int rrc_span_symbols = 20;   // filter span; positive even
    int prbs_order_x = 15;       // register length per polarization
    int prbs_order_y = 11;
    std::uint64_t prbs_seed = 1; // phase source for both registers, nonzero

    double sample_rate_hz() const { return symbol_rate_hz * sps; }
};

// Sinusoidally dithered carrier offset:
//   df(t) = f_mean_hz + (f_pkpk_hz / 2) * sin(2 pi f_jitter_hz t).
struct CfoProfile {
    double f_mean_hz = 0.0;
    double f_pkpk_hz = 0.0;   // >= 0; if > 0 then f_jitter_hz must be > 0
    double f_jitter_hz = 0.0;

    double at(double t_s) const;       // instantaneous offset, Hz
    double phase_rad(double t_s) const;  // integrated phase with phase(0) = 0
};

struct ChannelConfig {
    CfoProfile cfo;
    double snr_per_bit_db = 15.0;   // +infinity disables the noise source
    std::uint64_t noise_seed = 1;
};

// Maximal-length LFSR bit sequence. `order` must be one of
// {7, 9, 11, 15, 23, 31} (standard trinomial feedback); the seed is reduced to
// the register width and must stay nonzero. Output is the feedback bit stream,
// period 2^order - 1.
std::vector<std::uint8_t> gen_prbs(int order, std::uint64_t seed, std::size_t n_bits);

// Gray-coded QPSK, consuming bits pairwise:
//   00 -> (+1+j)/sqrt2   01 -> (-1+j)/sqrt2
//   11 -> (-1-j)/sqrt2   10 -> (+1-j)/sqrt2
std::vector<cplx> map_qpsk_gray(const std::vector<std::uint8_t>& bits);

// Root-raised-cosine taps, length span*sps + 1, symmetric, unit energy
// (sum of squares = 1). The removable singularities at t = 0 and
// t = +/- 1/(4*rolloff) symbol periods use their analytic limits.
std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps);

// Dual-pol pulse-shaped QPSK. Each polarization gets its own PRBS phase
// (and order) so the rails are uncorrelated. The shaping convolution keeps
// "same" alignment: symbol m is centered on output sample m*sps, filter
// transients at both ends stay in-band. Output mean power is 1 per rail.
DualPolSignal synthesize(const TxConfig& cfg, std::size_t n_symbols);

// Rotate both rails by the integrated offset phase exp(j phase(n / fs)).
DualPolSignal apply_cfo(const DualPolSignal& sig, const CfoProfile& cfo);

// Complex AWGN per polarization, variance calibrated against that rail's
// measured power:
//   sigma_n^2 = P_sig * (fs / symbol_rate) / (2 * 10^(snr_per_bit_db / 10)),
// i.e. SNR is per bit with 2 bits/symbol. Infinite SNR returns the input.
DualPolSignal add_awgn(const DualPolSignal& sig, const ChannelConfig& ch,
                       double symbol_rate_hz);

}  // namespace ccfoe
