#include "ccfoe/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccfoe/prng.hpp"

namespace ccfoe {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// Feedback polynomial x^order + x^tap + 1 for the supported register lengths.
// These are the standard maximal-length (ITU-style) trinomials.
int prbs_second_tap(int order) {
    switch (order) {
        case 7: return 6;
        case 9: return 5;
        case 11: return 9;
        case 15: return 14;
        case 23: return 18;
        case 31: return 28;
        default:
            throw ConfigError("gen_prbs: unsupported order " + std::to_string(order) +
                              " (expected one of 7, 9, 11, 15, 23, 31)");
    }
}

}  // namespace

void validate(const DualPolSignal& sig) {
    if (sig.x.empty() || sig.x.size() != sig.y.size())
        throw InputError("signal: polarization rails must have equal nonzero length");
    if (!(sig.sample_rate_hz > 0.0))
        throw InputError("signal: sample rate must be positive");
}

std::vector<std::uint8_t> gen_prbs(int order, std::uint64_t seed, std::size_t n_bits) {
    const int tap = prbs_second_tap(order);
    const std::uint64_t mask = (1ull << order) - 1;
    std::uint64_t state = seed & mask;
    if (state == 0)
        throw ConfigError("gen_prbs: seed reduces to zero for order " + std::to_string(order));

    std::vector<std::uint8_t> out(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
        std::uint64_t fb = ((state >> (order - 1)) ^ (state >> (tap - 1))) & 1ull;
        state = ((state << 1) | fb) & mask;
        out[i] = static_cast<std::uint8_t>(fb);
    }
    return out;
}

std::vector<cplx> map_qpsk_gray(const std::vector<std::uint8_t>& bits) {
    if (bits.size() % 2 != 0)
        throw InputError("map_qpsk_gray: bit count must be even");
    std::vector<cplx> out(bits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        // Second bit selects the in-phase sign, first bit the quadrature sign;
        // adjacent constellation points differ in exactly one bit.
        double re = bits[2 * i + 1] ? -kInvSqrt2 : kInvSqrt2;
        double im = bits[2 * i] ? -kInvSqrt2 : kInvSqrt2;
        out[i] = cplx(re, im);
    }
    return out;
}

std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps) {
    if (!(rolloff >= 0.0 && rolloff <= 1.0))
        throw ConfigError("rrc_taps: rolloff must lie in [0, 1]");
    if (span_symbols <= 0 || span_symbols % 2 != 0)
        throw ConfigError("rrc_taps: span must be a positive even symbol count");
    if (sps < 2) throw ConfigError("rrc_taps: need at least 2 samples per symbol");

    const int len = span_symbols * sps + 1;
    const int mid = (len - 1) / 2;
    std::vector<double> h(len);

    const double a = rolloff;
    for (int k = 0; k < len; ++k) {
        // Time in symbol periods; the grid is symmetric about zero.
        double t = static_cast<double>(k - mid) / sps;
        double v;
        if (std::abs(t) < 1e-10) {
            v = 1.0 - a + 4.0 * a / kPi;
        } else if (a > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * a)) < 1e-10) {
            // Limit where the generic denominator 1 - (4 a t)^2 vanishes.
            double c = kPi / (4.0 * a);
            v = (a / std::sqrt(2.0)) *
                ((1.0 + 2.0 / kPi) * std::sin(c) + (1.0 - 2.0 / kPi) * std::cos(c));
        } else {
            double num = std::sin(kPi * t * (1.0 - a)) +
                         4.0 * a * t * std::cos(kPi * t * (1.0 + a));
            double den = kPi * t * (1.0 - 16.0 * a * a * t * t);
            v = num / den;
        }
        h[k] = v;
    }

    double energy = 0.0;
    for (double v : h) energy += v * v;
    double scale = 1.0 / std::sqrt(energy);
    for (double& v : h) v *= scale;
    return h;
}

DualPolSignal synthesize(const TxConfig& cfg, std::size_t n_symbols) {
    if (!(cfg.symbol_rate_hz > 0.0)) throw ConfigError("synthesize: symbol rate must be positive");
    if (cfg.sps < 2 || (cfg.sps & (cfg.sps - 1)) != 0)
        throw ConfigError("synthesize: sps must be a power of two >= 2");
    if (n_symbols < static_cast<std::size_t>(cfg.rrc_span_symbols))
        throw ConfigError("synthesize: need at least span_symbols symbols");
    if (cfg.prbs_seed == 0) throw ConfigError("synthesize: prbs_seed must be nonzero");

    const std::vector<double> h = rrc_taps(cfg.rolloff, cfg.rrc_span_symbols, cfg.sps);
    const int delay = cfg.rrc_span_symbols * cfg.sps / 2;
    const std::size_t n_out = n_symbols * static_cast<std::size_t>(cfg.sps);
    // Upsampled shaping carries gain sqrt(sps) so unit-energy symbols through
    // unit-energy taps land at unit mean power per output sample.
    const double gain = std::sqrt(static_cast<double>(cfg.sps));

    DualPolSignal sig;
    sig.sample_rate_hz = cfg.sample_rate_hz();

    struct Rail {
        int order;
        std::uint64_t stream;
        std::vector<cplx>* out;
    };
    sig.x.assign(n_out, cplx(0.0, 0.0));
    sig.y.assign(n_out, cplx(0.0, 0.0));
    const Rail rails[2] = {{cfg.prbs_order_x, 0x58ull, &sig.x},
                           {cfg.prbs_order_y, 0x59ull, &sig.y}};

    for (const Rail& rail : rails) {
        // Distinct register phases per rail, derived from the one seed. Walk
        // the derivation forward until the truncated state is nonzero.
        std::uint64_t s = mix_seed(cfg.prbs_seed, rail.stream);
        const std::uint64_t mask = (1ull << rail.order) - 1;
        while ((s & mask) == 0) s = splitmix64(s);

        std::vector<std::uint8_t> bits = gen_prbs(rail.order, s, 2 * n_symbols);
        std::vector<cplx> syms = map_qpsk_gray(bits);
        std::vector<cplx>& out = *rail.out;

        // Zero-stuffed interpolation written symbol-major: each symbol adds one
        // scaled copy of the taps. Edges clip; those transients stay in the
        // record by design.
        const long long len = static_cast<long long>(h.size());
        const long long n_out_ll = static_cast<long long>(n_out);
        for (std::size_t m = 0; m < n_symbols; ++m) {
            const cplx s_m = syms[m] * gain;
            const long long base = static_cast<long long>(m) * cfg.sps - delay;
            const long long k0 = base < 0 ? -base : 0;
            const long long k1 = std::min<long long>(len, n_out_ll - base);
            for (long long k = k0; k < k1; ++k)
                out[static_cast<std::size_t>(base + k)] += s_m * h[static_cast<std::size_t>(k)];
        }
    }
    return sig;
}

double CfoProfile::at(double t_s) const {
    double dither = (f_pkpk_hz > 0.0)
                        ? 0.5 * f_pkpk_hz * std::sin(kTwoPi * f_jitter_hz * t_s)
                        : 0.0;
    return f_mean_hz + dither;
}

double CfoProfile::phase_rad(double t_s) const {
    // Exact integral of 2 pi df(t); the constant pins phase(0) = 0 so a pure
    // frequency shift never carries a hidden phase jump.
    double p = kTwoPi * f_mean_hz * t_s;
    if (f_pkpk_hz > 0.0) {
        double q = 0.5 * f_pkpk_hz / f_jitter_hz;
        p += q * (1.0 - std::cos(kTwoPi * f_jitter_hz * t_s));
    }
    return p;
}

DualPolSignal apply_cfo(const DualPolSignal& sig, const CfoProfile& cfo) {
    validate(sig);
    if (cfo.f_pkpk_hz < 0.0) throw ConfigError("apply_cfo: f_pkpk_hz must be >= 0");
    if (cfo.f_pkpk_hz > 0.0 && !(cfo.f_jitter_hz > 0.0))
        throw ConfigError("apply_cfo: dithered profile needs f_jitter_hz > 0");

    DualPolSignal out = sig;
    const double dt = 1.0 / sig.sample_rate_hz;
    for (std::size_t n = 0; n < out.size(); ++n) {
        double ph = cfo.phase_rad(static_cast<double>(n) * dt);
        cplx rot(std::cos(ph), std::sin(ph));
        out.x[n] *= rot;
        out.y[n] *= rot;
    }
    return out;
}

DualPolSignal add_awgn(const DualPolSignal& sig, const ChannelConfig& ch,
                       double symbol_rate_hz) {
    validate(sig);
    if (!(symbol_rate_hz > 0.0) || symbol_rate_hz > sig.sample_rate_hz)
        throw ConfigError("add_awgn: symbol rate must be positive and <= sample rate");
    if (std::isinf(ch.snr_per_bit_db) && ch.snr_per_bit_db > 0.0) return sig;

    DualPolSignal out = sig;
    const double osr = sig.sample_rate_hz / symbol_rate_hz;
    const double snr_lin = std::pow(10.0, ch.snr_per_bit_db / 10.0);

    std::vector<cplx>* rails[2] = {&out.x, &out.y};
    for (int r = 0; r < 2; ++r) {
        std::vector<cplx>& v = *rails[r];
        double p_sig = 0.0;
        for (const cplx& s : v) p_sig += std::norm(s);
        p_sig /= static_cast<double>(v.size());

        // Per-bit SNR with 2 bits/symbol: total complex noise variance per sample.
        double var = p_sig * osr / (2.0 * snr_lin);
        double sd = std::sqrt(var / 2.0);
        Rng rng(mix_seed(ch.noise_seed, 0xA0ull + static_cast<std::uint64_t>(r)));
        for (cplx& s : v) s += cplx(sd * rng.gaussian(), sd * rng.gaussian());
    }
    return out;
}

}  // namespace ccfoe
