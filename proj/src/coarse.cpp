#include "ccfoe/coarse.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ccfoe {

namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();

BlockStatus map_slr_status(SlrStatus s) {
    switch (s) {
        case SlrStatus::Ok: return BlockStatus::Ok;
        case SlrStatus::NoBreakpoints: return BlockStatus::NoBreakpoints;
        case SlrStatus::BreakpointOutOfRange: return BlockStatus::OutOfRange;
        case SlrStatus::IllConditioned: return BlockStatus::IllConditioned;
        // No slot of its own in the per-block vocabulary: the block simply
        // carries the previous estimate forward.
        case SlrStatus::DegenerateQuadratic: return BlockStatus::HeldOver;
    }
    return BlockStatus::HeldOver;
}

}  // namespace

const char* to_string(BlockStatus s) {
    switch (s) {
        case BlockStatus::Ok: return "OK";
        case BlockStatus::NoBreakpoints: return "NO_BREAKPOINTS";
        case BlockStatus::OutOfRange: return "OUT_OF_RANGE";
        case BlockStatus::IllConditioned: return "ILL_CONDITIONED";
        case BlockStatus::HeldOver: return "HELD_OVER";
    }
    return "HELD_OVER";
}

CoarseEstimator::CoarseEstimator(const CoarseConfig& cfg, double fs_hz, double rs_hz,
                                 double rolloff)
    : cfg_(cfg), fs_hz_(fs_hz), filtered_hz_(kNan) {
    if (cfg.n_fft < 16) throw ConfigError("coarse: n_fft must be at least 16");
    if (!(cfg.xi_fft >= 0.0 && cfg.xi_fft < 1.0) ||
        !(cfg.xi_est >= 0.0 && cfg.xi_est < 1.0))
        throw ConfigError("coarse: EWMA factors must lie in [0, 1)");
    if (cfg.convergence_blocks < 0)
        throw ConfigError("coarse: convergence_blocks must be >= 0");
    // Feasibility of the band-keeping decimation, checked before any signal.
    n_down_ = downsample_factor(fs_hz, rs_hz, rolloff, cfg.df_max_hz);
    state_.xi = cfg.xi_fft;

    // The curve must keep >= 8 points after trimming; this depends only on
    // config, so reject it here rather than on the first block.
    const int m = cfg.n_fft / n_down_;
    const int t = static_cast<int>(std::ceil(cfg.trim_frac * m));
    if (!(cfg.trim_frac >= 0.0 && cfg.trim_frac < 0.25) || m - 2 * t < 8)
        throw ConfigError("coarse: trim_frac leaves fewer than 8 curve points");
}

double CoarseEstimator::hz_per_unit() const {
    return fs_hz_ / static_cast<double>(n_down_);
}

const CumulativeCurve* CoarseEstimator::last_curve() const {
    return curve_ ? &*curve_ : nullptr;
}

const PiecewiseFit* CoarseEstimator::last_fit() const {
    return fit_ ? &*fit_ : nullptr;
}

BlockEstimate CoarseEstimator::process_block(std::span<const cplx> x,
                                             std::span<const cplx> y) {
    SpectralBlock psd = block_psd(x, y, cfg_.n_fft, fs_hz_);
    state_ = ewma_update(std::move(state_), psd);

    BlockEstimate out;
    out.raw_hz = kNan;
    out.filtered_hz = filtered_hz_;
    out.status = BlockStatus::HeldOver;

    SpectralBlock band = truncate_spectrum(state_.ewma, n_down_);
    std::vector<double> cum = accumulate_bins(band);

    // A curve that is flat across the retained points (no in-band power, or
    // all of it inside the trimmed edges) supports no fit; hold the estimate.
    const std::size_t m = cum.size();
    const std::size_t t =
        static_cast<std::size_t>(std::ceil(cfg_.trim_frac * static_cast<double>(m)));
    const double span = cum[m - 1 - t] - cum[t];
    if (!(span > 0.0) || !std::isfinite(span)) return out;

    curve_ = trim_and_normalize(cum, band.df_hz, cfg_.trim_frac);
    RegressionInput ri{curve_->x, curve_->y};

    BreakpointResult bp = fit_breakpoints(ri);
    if (bp.status != SlrStatus::Ok) {
        out.status = map_slr_status(bp.status);
        return out;
    }

    out.raw_hz = 0.5 * (bp.psi1 + bp.psi2) * curve_->hz_per_unit;
    if (have_filtered_)
        filtered_hz_ = cfg_.xi_est * filtered_hz_ + (1.0 - cfg_.xi_est) * out.raw_hz;
    else
        filtered_hz_ = out.raw_hz;
    have_filtered_ = true;
    out.filtered_hz = filtered_hz_;
    out.status = BlockStatus::Ok;

    // Full model of the accepted block, for curve/fit consumers. The slope
    // solve is O(curve length) and immaterial next to the FFTs.
    SlopeResult sl = fit_slopes(ri, bp.psi1, bp.psi2);
    if (sl.status == SlrStatus::Ok) fit_ = sl.fit;
    return out;
}

CfoTrack run_track(const DualPolSignal& sig, const CoarseConfig& cfg, double rs_hz,
                   double rolloff) {
    validate(sig);
    CoarseEstimator est(cfg, sig.sample_rate_hz, rs_hz, rolloff);

    CfoTrack track;
    track.fs_hz = sig.sample_rate_hz;
    track.n_fft = cfg.n_fft;

    const std::size_t n_blocks = sig.size() / static_cast<std::size_t>(cfg.n_fft);
    if (n_blocks == 0)
        throw InputError("run_track: record shorter than one FFT block");
    if (n_blocks < static_cast<std::size_t>(cfg.convergence_blocks))
        track.warnings.push_back(
            "record holds " + std::to_string(n_blocks) + " blocks, fewer than the " +
            std::to_string(cfg.convergence_blocks) + "-block settling window");

    track.raw_hz.reserve(n_blocks);
    track.filtered_hz.reserve(n_blocks);
    track.status.reserve(n_blocks);
    const std::size_t n = static_cast<std::size_t>(cfg.n_fft);
    for (std::size_t k = 0; k < n_blocks; ++k) {
        std::span<const cplx> bx(sig.x.data() + k * n, n);
        std::span<const cplx> by(sig.y.data() + k * n, n);
        BlockEstimate e = est.process_block(bx, by);
        track.raw_hz.push_back(e.raw_hz);
        track.filtered_hz.push_back(e.filtered_hz);
        track.status.push_back(e.status);
    }
    return track;
}

DualPolSignal compensate(const DualPolSignal& sig, double df_hz) {
    validate(sig);
    DualPolSignal out = sig;
    const double w = -6.283185307179586476925286766559 * df_hz / sig.sample_rate_hz;
    for (std::size_t n = 0; n < out.size(); ++n) {
        double ph = w * static_cast<double>(n);
        cplx rot(std::cos(ph), std::sin(ph));
        out.x[n] *= rot;
        out.y[n] *= rot;
    }
    return out;
}

}  // namespace ccfoe
