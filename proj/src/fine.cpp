#include "ccfoe/fine.hpp"

#include <algorithm>
#include <cmath>

#include "ccfoe/fft.hpp"

namespace ccfoe {

SymbolStream matched_filter_decimate(const DualPolSignal& sig, const TxConfig& cfg) {
    validate(sig);
    const double ratio = sig.sample_rate_hz / cfg.symbol_rate_hz;
    if (std::abs(ratio - cfg.sps) > 1e-6 * cfg.sps)
        throw ConfigError("matched_filter_decimate: sample rate is not sps * symbol rate");
    if (sig.size() % static_cast<std::size_t>(cfg.sps) != 0)
        throw InputError("matched_filter_decimate: record is not a whole number of symbols");

    const std::size_t n_sym = sig.size() / static_cast<std::size_t>(cfg.sps);
    const std::size_t span = static_cast<std::size_t>(cfg.rrc_span_symbols);
    if (n_sym < 3 * span)
        throw InputError("matched_filter_decimate: record shorter than 3 filter spans");

    const std::vector<double> h = rrc_taps(cfg.rolloff, cfg.rrc_span_symbols, cfg.sps);
    const long long delay = static_cast<long long>(span) * cfg.sps / 2;
    // Tx shaping carried gain sqrt(sps); undo it so clean symbols come back
    // at unit energy.
    const double gain = 1.0 / std::sqrt(static_cast<double>(cfg.sps));

    SymbolStream out;
    out.symbol_rate_hz = cfg.symbol_rate_hz;
    const std::size_t first = span;      // drop one span per end: half for the
    const std::size_t last = n_sym - span;  // Tx ramp, half for Rx support

    const std::vector<cplx>* rails_in[2] = {&sig.x, &sig.y};
    std::vector<cplx>* rails_out[2] = {&out.x, &out.y};
    for (int r = 0; r < 2; ++r) {
        const std::vector<cplx>& v = *rails_in[r];
        std::vector<cplx>& o = *rails_out[r];
        o.reserve(last - first);
        for (std::size_t mreal = first; mreal < last; ++mreal) {
            const long long base = static_cast<long long>(mreal) * cfg.sps - delay;
            cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k < h.size(); ++k)
                acc += v[static_cast<std::size_t>(base + static_cast<long long>(k))] * h[k];
            o.push_back(acc * gain);
        }
    }
    return out;
}

double fourth_power_cfoe(std::span<const cplx> symbols, double symbol_rate_hz,
                         int n_fft) {
    if (n_fft < 8 || !is_pow2(static_cast<std::size_t>(n_fft)))
        throw ConfigError("fourth_power_cfoe: n_fft must be a power of two >= 8");
    if (!(symbol_rate_hz > 0.0))
        throw ConfigError("fourth_power_cfoe: symbol rate must be positive");
    if (symbols.size() < static_cast<std::size_t>(n_fft))
        throw InputError("fourth_power_cfoe: need at least n_fft symbols");

    std::vector<cplx> z(static_cast<std::size_t>(n_fft));
    for (std::size_t m = 0; m < z.size(); ++m) {
        cplx s2 = symbols[m] * symbols[m];
        z[m] = s2 * s2;
    }
    fft_inplace(z);

    const int n = n_fft;
    int peak = 0;
    double pmax = -1.0;
    std::vector<double> mag(z.size());
    for (int k = 0; k < n; ++k) {
        mag[static_cast<std::size_t>(k)] = std::abs(z[static_cast<std::size_t>(k)]);
        if (mag[static_cast<std::size_t>(k)] > pmax) {
            pmax = mag[static_cast<std::size_t>(k)];
            peak = k;
        }
    }
    if (!(pmax > 0.0)) return 0.0;  // all-zero input

    // Three-point parabolic interpolation on log magnitude, circular neighbors.
    const double mc = mag[static_cast<std::size_t>(peak)];
    const double ml = mag[static_cast<std::size_t>((peak + n - 1) % n)];
    const double mr = mag[static_cast<std::size_t>((peak + 1) % n)];
    double delta = 0.0;
    if (ml > 0.0 && mr > 0.0) {
        double ll = std::log(ml), lc = std::log(mc), lr = std::log(mr);
        double den = ll - 2.0 * lc + lr;
        if (den < 0.0) delta = 0.5 * (ll - lr) / den;
        delta = std::clamp(delta, -0.5, 0.5);
    }

    // Signed bin index, then the tone frequency folded into (-rs/2, rs/2].
    double k_signed = (peak <= n / 2) ? peak : peak - n;
    double f4 = (k_signed + delta) * symbol_rate_hz / n;
    if (f4 > 0.5 * symbol_rate_hz) f4 -= symbol_rate_hz;
    if (f4 <= -0.5 * symbol_rate_hz) f4 += symbol_rate_hz;
    return f4 / 4.0;
}

FineEstimate fourth_power_cfoe(const SymbolStream& stream, int n_fft) {
    FineEstimate e;
    e.x_hz = fourth_power_cfoe(stream.x, stream.symbol_rate_hz, n_fft);
    e.y_hz = fourth_power_cfoe(stream.y, stream.symbol_rate_hz, n_fft);
    return e;
}

}  // namespace ccfoe
