#include "ccfoe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ccfoe/fft.hpp"

namespace ccfoe {

SpectralBlock block_psd(std::span<const cplx> x_block, std::span<const cplx> y_block,
                        int n_fft, double fs_hz) {
    if (n_fft <= 0 || !is_pow2(static_cast<std::size_t>(n_fft)))
        throw ConfigError("block_psd: n_fft must be a positive power of two");
    if (!(fs_hz > 0.0)) throw ConfigError("block_psd: sample rate must be positive");
    if (x_block.size() != static_cast<std::size_t>(n_fft) ||
        y_block.size() != static_cast<std::size_t>(n_fft))
        throw InputError("block_psd: block length does not match n_fft");

    std::vector<cplx> fx = fft(x_block);
    std::vector<cplx> fy = fft(y_block);

    SpectralBlock out;
    out.n_fft = n_fft;
    out.df_hz = fs_hz / n_fft;
    out.bins.resize(static_cast<std::size_t>(n_fft));
    const int half = n_fft / 2;
    for (int k = 0; k < n_fft; ++k) {
        // DC-centered ordering: bin k holds frequency index k - n/2.
        int q = (k + half) & (n_fft - 1);
        out.bins[static_cast<std::size_t>(k)] = std::norm(fx[q]) + std::norm(fy[q]);
    }
    return out;
}

SpectralState ewma_update(SpectralState state, const SpectralBlock& block) {
    if (!(state.xi >= 0.0 && state.xi < 1.0))
        throw ConfigError("ewma_update: xi must lie in [0, 1)");
    if (state.blocks_seen == 0) {
        state.ewma = block;
        state.blocks_seen = 1;
        return state;
    }
    if (state.ewma.n_fft != block.n_fft || state.ewma.df_hz != block.df_hz)
        throw InputError("ewma_update: block grid does not match accumulator");

    const double xi = state.xi;
    const double w = 1.0 - xi;
    for (std::size_t k = 0; k < block.bins.size(); ++k)
        state.ewma.bins[k] = xi * state.ewma.bins[k] + w * block.bins[k];
    ++state.blocks_seen;
    return state;
}

int downsample_factor(double fs_hz, double rs_hz, double rolloff, double df_max_hz) {
    if (!(fs_hz > 0.0) || !(rs_hz > 0.0))
        throw ConfigError("downsample_factor: rates must be positive");
    if (df_max_hz < 0.0) throw ConfigError("downsample_factor: df_max_hz must be >= 0");

    double need = std::max(rs_hz * (1.0 + rolloff) / 2.0 + df_max_hz, rs_hz);
    double ratio = fs_hz / (2.0 * need);
    if (ratio < 1.0 - 1e-12)
        throw ConfigError("downsample_factor: fs = " + std::to_string(fs_hz) +
                          " Hz cannot cover the occupied band (need >= " +
                          std::to_string(2.0 * need) + " Hz)");
    // Nudge guards ratios that sit a rounding error below an exact power of two.
    int expo = static_cast<int>(std::floor(std::log2(ratio) + 1e-9));
    return 1 << expo;
}

SpectralBlock truncate_spectrum(const SpectralBlock& block, int n_down) {
    if (n_down < 1 || !is_pow2(static_cast<std::size_t>(n_down)))
        throw ConfigError("truncate_spectrum: n_down must be a power of two >= 1");
    if (block.n_fft % n_down != 0)
        throw ConfigError("truncate_spectrum: n_down must divide the block length");
    if (n_down == 1) return block;

    const int m = block.n_fft / n_down;
    const int start = (block.n_fft - m) / 2;
    SpectralBlock out;
    out.n_fft = m;
    out.df_hz = block.df_hz;
    out.bins.assign(block.bins.begin() + start, block.bins.begin() + start + m);
    return out;
}

std::vector<double> accumulate_bins(const SpectralBlock& block) {
    const std::size_t n = block.bins.size();
    if (n == 0) throw InputError("accumulate_bins: empty block");
    std::vector<double> out(n);
    const double scale = block.df_hz / static_cast<double>(n);
    double run = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double b = block.bins[k];
        if (!(b >= 0.0))
            throw InputError("accumulate_bins: bins must be nonnegative and finite");
        run += b;
        out[k] = run * scale;
    }
    return out;
}

CumulativeCurve trim_and_normalize(const std::vector<double>& cumulative, double df_hz,
                                   double trim_frac) {
    if (!(trim_frac >= 0.0 && trim_frac < 0.25))
        throw ConfigError("trim_and_normalize: trim_frac must lie in [0, 0.25)");
    const std::size_t m = cumulative.size();
    const std::size_t t =
        static_cast<std::size_t>(std::ceil(trim_frac * static_cast<double>(m)));
    if (m < 2 * t + 8)
        throw InputError("trim_and_normalize: fewer than 8 points would remain");

    const std::size_t kept = m - 2 * t;
    CumulativeCurve out;
    out.hz_per_unit = df_hz * static_cast<double>(m);
    out.x.resize(kept);
    out.y.resize(kept);

    // The curve is nondecreasing, so the retained extremes are its ends.
    const double y0 = cumulative[t];
    const double y1 = cumulative[m - 1 - t];
    const double range = y1 - y0;
    if (!(range > 0.0) || !std::isfinite(range))
        throw InputError("trim_and_normalize: flat or non-finite cumulative curve");

    const double inv_m = 1.0 / static_cast<double>(m);
    const double half = 0.5 * static_cast<double>(m);
    for (std::size_t i = 0; i < kept; ++i) {
        std::size_t src = t + i;
        // Each partial sum owns the power below its bin's upper edge, so it is
        // plotted there; kinks then land on the true band edges.
        out.x[i] = (static_cast<double>(src) + 0.5 - half) * inv_m;
        out.y[i] = (cumulative[src] - y0) / range;
    }
    return out;
}

}  // namespace ccfoe
