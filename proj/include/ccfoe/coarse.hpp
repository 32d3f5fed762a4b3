#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccfoe/slr.hpp"
#include "ccfoe/spectral.hpp"
#include "ccfoe/types.hpp"

namespace ccfoe {

// Knobs of the wide-range estimator. df_max_hz is the largest |offset| the
// estimator must capture; it drives the band-keeping decimation.
struct CoarseConfig {
    int n_fft = 1024;
    double xi_fft = 0.98;        // PSD averaging memory, [0, 1)
    double xi_est = 0.98;        // estimate filter memory, [0, 1)
    double df_max_hz = 0.0;
    double trim_frac = 0.02;     // per-edge share of curve points to drop
    int convergence_blocks = 100;  // settling blocks discarded by reports
};

// Per-block outcome. Non-Ok statuses hold the filtered estimate at its
// previous value; HeldOver also covers blocks whose data yields no usable
// curve at all (zero power, degenerate quadratic).
enum class BlockStatus { Ok, NoBreakpoints, OutOfRange, IllConditioned, HeldOver };

struct BlockEstimate {
    double raw_hz = 0.0;       // NaN when the block produced no estimate
    double filtered_hz = 0.0;  // NaN until the first Ok block
    BlockStatus status = BlockStatus::HeldOver;
};

// Block-sequence result of run_track. filtered_hz[k] is defined (non-NaN)
// from the first Ok block onwards.
struct CfoTrack {
    std::vector<double> raw_hz;
    std::vector<double> filtered_hz;
    std::vector<BlockStatus> status;
    double fs_hz = 0.0;
    int n_fft = 0;
    std::vector<std::string> warnings;
};

const char* to_string(BlockStatus s);

// Streaming estimator: PSD -> EWMA -> band truncation -> cumulative curve ->
// breakpoint fit -> midpoint, with an EWMA over the raw per-block estimates.
// Construction fails fast when fs cannot cover rs/df_max (band-keeping
// precondition), before any signal is touched.
class CoarseEstimator {
  public:
    CoarseEstimator(const CoarseConfig& cfg, double fs_hz, double rs_hz, double rolloff);

    // Consume one n_fft-sample block per rail, advance all state.
    BlockEstimate process_block(std::span<const cplx> x, std::span<const cplx> y);

    int n_down() const { return n_down_; }
    double hz_per_unit() const;

    // Diagnostics from the most recent block: the regression-ready curve, and
    // the full piecewise fit of the most recent Ok block.
    const CumulativeCurve* last_curve() const;
    const PiecewiseFit* last_fit() const;

  private:
    CoarseConfig cfg_;
    double fs_hz_;
    int n_down_;
    SpectralState state_;
    double filtered_hz_;
    bool have_filtered_ = false;
    std::optional<CumulativeCurve> curve_;
    std::optional<PiecewiseFit> fit_;
};

// Frame the record into consecutive n_fft blocks (trailing partial dropped)
// and run the estimator over all of them. A record shorter than the settling
// window still runs but leaves a warning in the track.
CfoTrack run_track(const DualPolSignal& sig, const CoarseConfig& cfg, double rs_hz,
                   double rolloff);

// Counter-rotate both rails by df_hz.
DualPolSignal compensate(const DualPolSignal& sig, double df_hz);

}  // namespace ccfoe
