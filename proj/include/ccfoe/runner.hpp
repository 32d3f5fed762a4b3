#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccfoe/coarse.hpp"
#include "ccfoe/types.hpp"
#include "ccfoe/waveform.hpp"

namespace ccfoe {

// ---------------------------------------------------------------------------
// Campaign descriptions. Each spec resolves to a canonical JSON form whose
// FNV-1a hash stamps every emitted row, so results stay traceable to their
// exact configuration.
// ---------------------------------------------------------------------------

// One emission/channel/estimator setup, run over independent realizations.
// Each realization draws f_mean uniformly from [-f_mean_max_hz, +f_mean_max_hz]
// unless f_mean_hz pins it. The estimator's capture bound is derived as
// f_mean_max + f_pkpk/2 (or |f_mean| + f_pkpk/2 when pinned) unless the track
// or residual flows override it explicitly.
struct ScenarioSpec {
    std::string name = "scenario";
    double fs_hz = 64e9;
    double rs_hz = 4e9;
    double rolloff = 0.1;
    int rrc_span_symbols = 20;
    int prbs_order_x = 15;
    int prbs_order_y = 11;
    double snr_per_bit_db = 15.0;
    double f_mean_max_hz = 1e9;
    std::optional<double> f_mean_hz;  // fixed offset instead of a draw
    double f_pkpk_hz = 200e6;
    double f_jitter_hz = 100e3;
    std::size_t n_symbols = 1ull << 16;
    int n_realizations = 10;
    std::uint64_t master_seed = 0;
    CoarseConfig coarse;                     // df_max_hz field is ignored here
    std::optional<double> df_max_hz;         // explicit capture bound (track/residual)

    int sps() const;                         // fs/rs, validated power of two
    double resolved_df_max_hz() const;
    CoarseConfig resolved_coarse() const;
    nlohmann::json to_json() const;
};

struct RealizationRow {
    int realization = 0;
    std::uint64_t seed = 0;      // per-realization base seed
    double f_mean_hz = 0.0;
    double max_error_hz = 0.0;   // over blocks past the settling window
    int blocks_evaluated = 0;
};

struct ScenarioResult {
    std::vector<RealizationRow> rows;
    double max_error_hz = 0.0;   // worst realization
    double wall_seconds = 0.0;
};

// Heatmap campaign over (symbol rate, SNR, offset bound). df_max_hz values are
// the f_mean draw bounds; each cell's estimator additionally reserves
// f_pkpk/2 of dither headroom. Cells the sample rate cannot cover are
// reported infeasible instead of failing the campaign.
struct SweepSpec {
    std::string name = "sweep";
    double fs_hz = 64e9;
    std::vector<double> rs_hz;
    std::vector<double> snr_per_bit_db;
    std::vector<double> df_max_hz;
    double rolloff = 0.1;
    int rrc_span_symbols = 20;
    int prbs_order_x = 15;
    int prbs_order_y = 11;
    double f_pkpk_hz = 200e6;
    double f_jitter_hz = 100e3;
    std::size_t n_symbols = 1ull << 16;
    int n_realizations = 10;
    std::uint64_t master_seed = 0;
    CoarseConfig coarse;

    nlohmann::json to_json() const;
};

struct SweepCell {
    double rs_hz = 0.0;
    double snr_per_bit_db = 0.0;
    double df_max_hz = 0.0;
    bool feasible = true;
    double max_error_hz = 0.0;   // NaN for infeasible cells
};

struct SweepResult {
    std::vector<SweepCell> cells;
    double wall_seconds = 0.0;
};

// Two-stage residual campaign over (applied offset, SNR) cells: coarse
// estimate, counter-rotation, matched filter, fourth-power verification per
// rail. Dither defaults to off so the applied offset is the exact truth.
struct ResidualSpec {
    std::string name = "residual";
    double fs_hz = 64e9;
    double rs_hz = 4e9;
    double rolloff = 0.1;
    int rrc_span_symbols = 20;
    int prbs_order_x = 15;
    int prbs_order_y = 11;
    std::vector<double> applied_cfo_hz;
    std::vector<double> snr_per_bit_db;
    double f_pkpk_hz = 0.0;
    double f_jitter_hz = 0.0;
    std::size_t n_symbols = 1ull << 16;
    int n_realizations = 10;
    std::uint64_t master_seed = 0;
    CoarseConfig coarse;
    std::optional<double> df_max_hz;
    int n_fft_fine = 1 << 14;

    double resolved_df_max_hz() const;
    CoarseConfig resolved_coarse() const;
    nlohmann::json to_json() const;
};

struct ResidualRow {
    int realization = 0;
    std::uint64_t seed = 0;
    double applied_cfo_hz = 0.0;
    double snr_per_bit_db = 0.0;
    double coarse_error_hz = 0.0;
    bool capture_ok = true;        // coarse residual inside rs/8
    double residual_x_hz = 0.0;    // |truth - (coarse + fine)|, NaN on capture fail
    double residual_y_hz = 0.0;
};

struct ResidualResult {
    std::vector<ResidualRow> rows;
    double max_residual_hz = 0.0;  // worst rail over capture-ok rows
    bool any_capture_fail = false;
    double wall_seconds = 0.0;
};

// Track flow: full per-block trace plus the final curve and fit.
struct TrackRunResult {
    CfoTrack track;
    std::optional<CumulativeCurve> final_curve;
    std::optional<PiecewiseFit> final_fit;
    double hz_per_unit = 0.0;
    int n_down = 1;
    double final_filtered_hz = 0.0;
};

// ---------------------------------------------------------------------------
// Engines. `threads` <= 1 runs serially; results are independent of the
// thread count by construction (per-unit seeds, indexed result slots).
// ---------------------------------------------------------------------------

ScenarioResult run_scenario(const ScenarioSpec& spec, int threads = 1);
SweepResult run_sweep(const SweepSpec& spec, int threads = 1);
ResidualResult run_residual(const ResidualSpec& spec, int threads = 1);
TrackRunResult run_track_full(const DualPolSignal& sig, const CoarseConfig& cfg,
                              double rs_hz, double rolloff);

// Synthesize one realization of a scenario: emission, dithered offset, noise.
// `f_mean_hz` is the realized mean offset, `seed` the per-realization base.
DualPolSignal make_realization(const ScenarioSpec& spec, double f_mean_hz,
                               std::uint64_t seed);

// Deterministic seed tree.
std::uint64_t realization_seed(std::uint64_t master_seed, int realization);
std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t cell_index);
double draw_f_mean(std::uint64_t realization_seed_v, double f_mean_max_hz);

// Worst |true - filtered| over blocks k >= settle; NaN estimates count as
// +infinity so an unconverged track cannot pass silently.
double max_track_error(const CfoTrack& track, const CfoProfile& truth, int settle,
                       int* blocks_evaluated = nullptr);

// ---------------------------------------------------------------------------
// Serialization. CSV emitters return the full byte string so callers can
// write files or compare runs for determinism.
// ---------------------------------------------------------------------------

std::string config_hash(const nlohmann::json& resolved);
std::string fmt_num(double v);  // shortest stable decimal, "nan" for NaN

std::string scenario_csv(const ScenarioSpec& spec, const ScenarioResult& res);
std::string sweep_csv(const SweepSpec& spec, const SweepResult& res);
std::string residual_csv(const ResidualSpec& spec, const ResidualResult& res);
std::string track_csv(const ScenarioSpec& spec, const CfoTrack& track);

nlohmann::json scenario_summary(const ScenarioSpec& spec, const ScenarioResult& res);
nlohmann::json sweep_summary(const SweepSpec& spec, const SweepResult& res);
nlohmann::json residual_summary(const ResidualSpec& spec, const ResidualResult& res);
nlohmann::json track_summary(const ScenarioSpec& spec, const TrackRunResult& res);

// Config-file parsing (strict: unknown keys are configuration errors).
ScenarioSpec scenario_spec_from_json(const nlohmann::json& j);
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
ResidualSpec residual_spec_from_json(const nlohmann::json& j);

// Bounded worker pool used by the engines.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace ccfoe
