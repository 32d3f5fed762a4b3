#include "ccfoe/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ccfoe/fine.hpp"
#include "ccfoe/prng.hpp"

namespace ccfoe {

namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();
const double kInf = std::numeric_limits<double>::infinity();

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Strict JSON field reader: every consumed key is remembered and leftovers
// are configuration errors, so config typos fail loudly instead of silently
// falling back to defaults.
class Fields {
  public:
    Fields(const nlohmann::json& j, std::string ctx) : j_(j), ctx_(std::move(ctx)) {
        if (!j_.is_object())
            throw ConfigError(ctx_ + ": expected a JSON object");
    }

    template <typename T>
    T get(const char* key, T dflt) {
        seen_.insert(key);
        if (!j_.contains(key)) return dflt;
        return read<T>(key);
    }

    template <typename T>
    std::optional<T> opt(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key)) return std::nullopt;
        return read<T>(key);
    }

    template <typename T>
    T require(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key))
            throw ConfigError(ctx_ + ": missing required key \"" + key + "\"");
        return read<T>(key);
    }

    const nlohmann::json* sub(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key)) return nullptr;
        if (!j_.at(key).is_object())
            throw ConfigError(ctx_ + ": key \"" + key + "\" must be an object");
        return &j_.at(key);
    }

    void check_unknown() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError(ctx_ + ": unknown key \"" + it.key() + "\"");
    }

  private:
    template <typename T>
    T read(const char* key) {
        try {
            return j_.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(ctx_ + ": bad value for \"" + key + "\": " + e.what());
        }
    }

    const nlohmann::json& j_;
    std::string ctx_;
    std::set<std::string> seen_;
};

CoarseConfig parse_coarse(const nlohmann::json* j, std::optional<double>* df_max_out) {
    CoarseConfig c;
    if (!j) return c;
    Fields f(*j, "coarse");
    c.n_fft = f.get<int>("n_fft", c.n_fft);
    c.xi_fft = f.get<double>("xi_fft", c.xi_fft);
    c.xi_est = f.get<double>("xi_est", c.xi_est);
    c.trim_frac = f.get<double>("trim_frac", c.trim_frac);
    c.convergence_blocks = f.get<int>("convergence_blocks", c.convergence_blocks);
    *df_max_out = f.opt<double>("df_max_hz");
    f.check_unknown();
    return c;
}

nlohmann::json coarse_to_json(const CoarseConfig& c) {
    return {
        {"n_fft", c.n_fft},
        {"xi_fft", c.xi_fft},
        {"xi_est", c.xi_est},
        {"trim_frac", c.trim_frac},
        {"convergence_blocks", c.convergence_blocks},
    };
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec resolution
// ---------------------------------------------------------------------------

int ScenarioSpec::sps() const {
    if (!(rs_hz > 0.0) || !(fs_hz > 0.0))
        throw ConfigError(name + ": rates must be positive");
    double ratio = fs_hz / rs_hz;
    int s = static_cast<int>(std::llround(ratio));
    if (std::abs(ratio - s) > 1e-9 * ratio || s < 2 || (s & (s - 1)) != 0)
        throw ConfigError(name + ": fs/rs must be a power-of-two oversampling >= 2 (got " +
                          std::to_string(ratio) + ")");
    return s;
}

double ScenarioSpec::resolved_df_max_hz() const {
    if (df_max_hz) return *df_max_hz;
    double base = f_mean_hz ? std::abs(*f_mean_hz) : f_mean_max_hz;
    return base + 0.5 * f_pkpk_hz;
}

CoarseConfig ScenarioSpec::resolved_coarse() const {
    CoarseConfig c = coarse;
    c.df_max_hz = resolved_df_max_hz();
    return c;
}

nlohmann::json ScenarioSpec::to_json() const {
    nlohmann::json j{
        {"command", "scenario"},
        {"name", name},
        {"fs_hz", fs_hz},
        {"rs_hz", rs_hz},
        {"rolloff", rolloff},
        {"rrc_span_symbols", rrc_span_symbols},
        {"prbs_order_x", prbs_order_x},
        {"prbs_order_y", prbs_order_y},
        {"snr_per_bit_db", snr_per_bit_db},
        {"f_mean_max_hz", f_mean_max_hz},
        {"f_pkpk_hz", f_pkpk_hz},
        {"f_jitter_hz", f_jitter_hz},
        {"n_symbols", n_symbols},
        {"n_realizations", n_realizations},
        {"master_seed", master_seed},
        {"df_max_hz", resolved_df_max_hz()},
        {"coarse", coarse_to_json(coarse)},
    };
    if (f_mean_hz) j["f_mean_hz"] = *f_mean_hz;
    return j;
}

nlohmann::json SweepSpec::to_json() const {
    return {
        {"command", "sweep"},
        {"name", name},
        {"fs_hz", fs_hz},
        {"rs_hz", rs_hz},
        {"snr_per_bit_db", snr_per_bit_db},
        {"df_max_hz", df_max_hz},
        {"rolloff", rolloff},
        {"rrc_span_symbols", rrc_span_symbols},
        {"prbs_order_x", prbs_order_x},
        {"prbs_order_y", prbs_order_y},
        {"f_pkpk_hz", f_pkpk_hz},
        {"f_jitter_hz", f_jitter_hz},
        {"n_symbols", n_symbols},
        {"n_realizations", n_realizations},
        {"master_seed", master_seed},
        {"coarse", coarse_to_json(coarse)},
    };
}

double ResidualSpec::resolved_df_max_hz() const {
    if (df_max_hz) return *df_max_hz;
    double worst = 0.0;
    for (double v : applied_cfo_hz) worst = std::max(worst, std::abs(v));
    return worst + 0.5 * f_pkpk_hz;
}

CoarseConfig ResidualSpec::resolved_coarse() const {
    CoarseConfig c = coarse;
    c.df_max_hz = resolved_df_max_hz();
    return c;
}

nlohmann::json ResidualSpec::to_json() const {
    return {
        {"command", "residual"},
        {"name", name},
        {"fs_hz", fs_hz},
        {"rs_hz", rs_hz},
        {"rolloff", rolloff},
        {"rrc_span_symbols", rrc_span_symbols},
        {"prbs_order_x", prbs_order_x},
        {"prbs_order_y", prbs_order_y},
        {"applied_cfo_hz", applied_cfo_hz},
        {"snr_per_bit_db", snr_per_bit_db},
        {"f_pkpk_hz", f_pkpk_hz},
        {"f_jitter_hz", f_jitter_hz},
        {"n_symbols", n_symbols},
        {"n_realizations", n_realizations},
        {"master_seed", master_seed},
        {"df_max_hz", resolved_df_max_hz()},
        {"n_fft_fine", n_fft_fine},
        {"coarse", coarse_to_json(coarse)},
    };
}

// ---------------------------------------------------------------------------
// Seed tree and realization assembly
// ---------------------------------------------------------------------------

std::uint64_t realization_seed(std::uint64_t master_seed, int realization) {
    return mix_seed(mix_seed(master_seed, 0x5245414cull),
                    static_cast<std::uint64_t>(realization));
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t cell_index) {
    return mix_seed(mix_seed(master_seed, 0x43454c4cull),
                    static_cast<std::uint64_t>(cell_index));
}

double draw_f_mean(std::uint64_t realization_seed_v, double f_mean_max_hz) {
    Rng rng(mix_seed(realization_seed_v, seed_stream::kFMeanDraw));
    return rng.uniform(-f_mean_max_hz, f_mean_max_hz);
}

DualPolSignal make_realization(const ScenarioSpec& spec, double f_mean_hz,
                               std::uint64_t seed) {
    TxConfig tx;
    tx.symbol_rate_hz = spec.rs_hz;
    tx.rolloff = spec.rolloff;
    tx.sps = spec.sps();
    tx.rrc_span_symbols = spec.rrc_span_symbols;
    tx.prbs_order_x = spec.prbs_order_x;
    tx.prbs_order_y = spec.prbs_order_y;
    tx.prbs_seed = mix_seed(seed, seed_stream::kPrbs);
    if (tx.prbs_seed == 0) tx.prbs_seed = 1;

    CfoProfile cfo{f_mean_hz, spec.f_pkpk_hz, spec.f_jitter_hz};
    ChannelConfig ch{cfo, spec.snr_per_bit_db, mix_seed(seed, seed_stream::kNoise)};

    DualPolSignal sig = synthesize(tx, spec.n_symbols);
    sig = apply_cfo(sig, cfo);
    sig = add_awgn(sig, ch, spec.rs_hz);
    return sig;
}

double max_track_error(const CfoTrack& track, const CfoProfile& truth, int settle,
                       int* blocks_evaluated) {
    double worst = 0.0;
    int count = 0;
    for (std::size_t k = static_cast<std::size_t>(std::max(settle, 0));
         k < track.filtered_hz.size(); ++k) {
        double t_mid = (static_cast<double>(k) + 0.5) * track.n_fft / track.fs_hz;
        double est = track.filtered_hz[k];
        double err = std::isnan(est) ? kInf : std::abs(truth.at(t_mid) - est);
        worst = std::max(worst, err);
        ++count;
    }
    if (blocks_evaluated) *blocks_evaluated = count;
    return worst;
}

// ---------------------------------------------------------------------------
// Engines
// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::size_t pool = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> ts;
    ts.reserve(pool);
    for (std::size_t t = 0; t < pool; ++t) ts.emplace_back(worker);
    for (std::thread& t : ts) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

ScenarioResult run_scenario(const ScenarioSpec& spec, int threads) {
    if (spec.n_realizations <= 0)
        throw ConfigError(spec.name + ": n_realizations must be positive");
    // Fail fast on infeasible estimator setups, before synthesizing anything.
    CoarseEstimator probe(spec.resolved_coarse(), spec.fs_hz, spec.rs_hz, spec.rolloff);
    (void)probe;

    auto t0 = std::chrono::steady_clock::now();
    ScenarioResult res;
    res.rows.resize(static_cast<std::size_t>(spec.n_realizations));
    const CoarseConfig cc = spec.resolved_coarse();

    parallel_for(res.rows.size(), threads, [&](std::size_t r) {
        std::uint64_t seed = realization_seed(spec.master_seed, static_cast<int>(r));
        double f_mean = spec.f_mean_hz ? *spec.f_mean_hz
                                       : draw_f_mean(seed, spec.f_mean_max_hz);
        DualPolSignal sig = make_realization(spec, f_mean, seed);
        CfoTrack track = run_track(sig, cc, spec.rs_hz, spec.rolloff);

        RealizationRow row;
        row.realization = static_cast<int>(r);
        row.seed = seed;
        row.f_mean_hz = f_mean;
        row.max_error_hz = max_track_error(
            track, CfoProfile{f_mean, spec.f_pkpk_hz, spec.f_jitter_hz},
            cc.convergence_blocks, &row.blocks_evaluated);
        res.rows[r] = row;
    });

    res.max_error_hz = 0.0;
    for (const RealizationRow& row : res.rows)
        res.max_error_hz = std::max(res.max_error_hz, row.max_error_hz);
    res.wall_seconds = elapsed_s(t0);
    return res;
}

SweepResult run_sweep(const SweepSpec& spec, int threads) {
    // An empty axis yields zero cells: the CSV then carries only its header row.
    auto t0 = std::chrono::steady_clock::now();
    SweepResult res;
    res.cells.resize(spec.rs_hz.size() * spec.snr_per_bit_db.size() *
                     spec.df_max_hz.size());

    parallel_for(res.cells.size(), threads, [&](std::size_t c) {
        const std::size_t n_snr = spec.snr_per_bit_db.size();
        const std::size_t n_df = spec.df_max_hz.size();
        SweepCell cell;
        cell.rs_hz = spec.rs_hz[c / (n_snr * n_df)];
        cell.snr_per_bit_db = spec.snr_per_bit_db[(c / n_df) % n_snr];
        cell.df_max_hz = spec.df_max_hz[c % n_df];

        ScenarioSpec sub;
        sub.name = spec.name + "/cell" + std::to_string(c);
        sub.fs_hz = spec.fs_hz;
        sub.rs_hz = cell.rs_hz;
        sub.rolloff = spec.rolloff;
        sub.rrc_span_symbols = spec.rrc_span_symbols;
        sub.prbs_order_x = spec.prbs_order_x;
        sub.prbs_order_y = spec.prbs_order_y;
        sub.snr_per_bit_db = cell.snr_per_bit_db;
        sub.f_mean_max_hz = cell.df_max_hz;
        sub.f_pkpk_hz = spec.f_pkpk_hz;
        sub.f_jitter_hz = spec.f_jitter_hz;
        sub.n_symbols = spec.n_symbols;
        sub.n_realizations = spec.n_realizations;
        sub.master_seed = cell_seed(spec.master_seed, c);
        sub.coarse = spec.coarse;

        try {
            ScenarioResult sr = run_scenario(sub, 1);
            cell.feasible = true;
            cell.max_error_hz = sr.max_error_hz;
        } catch (const ConfigError&) {
            // The sample rate cannot cover this cell's band; report rather
            // than abort the campaign.
            cell.feasible = false;
            cell.max_error_hz = kNan;
        }
        res.cells[c] = cell;
    });

    res.wall_seconds = elapsed_s(t0);
    return res;
}

TrackRunResult run_track_full(const DualPolSignal& sig, const CoarseConfig& cfg,
                              double rs_hz, double rolloff) {
    validate(sig);
    CoarseEstimator est(cfg, sig.sample_rate_hz, rs_hz, rolloff);

    TrackRunResult out;
    out.track.fs_hz = sig.sample_rate_hz;
    out.track.n_fft = cfg.n_fft;
    out.n_down = est.n_down();
    out.hz_per_unit = est.hz_per_unit();

    const std::size_t n = static_cast<std::size_t>(cfg.n_fft);
    const std::size_t n_blocks = sig.size() / n;
    if (n_blocks == 0) throw InputError("track: record shorter than one FFT block");
    if (n_blocks * n != sig.size())
        out.track.warnings.push_back(
            "final partial block of " + std::to_string(sig.size() - n_blocks * n) +
            " samples dropped");
    if (n_blocks < static_cast<std::size_t>(cfg.convergence_blocks))
        out.track.warnings.push_back(
            "record holds " + std::to_string(n_blocks) + " blocks, fewer than the " +
            std::to_string(cfg.convergence_blocks) + "-block settling window");

    out.final_filtered_hz = kNan;
    for (std::size_t k = 0; k < n_blocks; ++k) {
        std::span<const cplx> bx(sig.x.data() + k * n, n);
        std::span<const cplx> by(sig.y.data() + k * n, n);
        BlockEstimate e = est.process_block(bx, by);
        out.track.raw_hz.push_back(e.raw_hz);
        out.track.filtered_hz.push_back(e.filtered_hz);
        out.track.status.push_back(e.status);
        out.final_filtered_hz = e.filtered_hz;
    }
    if (est.last_curve()) out.final_curve = *est.last_curve();
    if (est.last_fit()) out.final_fit = *est.last_fit();
    return out;
}

ResidualResult run_residual(const ResidualSpec& spec, int threads) {
    if (spec.applied_cfo_hz.empty() || spec.snr_per_bit_db.empty())
        throw ConfigError(spec.name + ": applied_cfo_hz and snr_per_bit_db must be non-empty");
    if (spec.n_realizations <= 0)
        throw ConfigError(spec.name + ": n_realizations must be positive");

    // The fine stage needs n_fft_fine symbols after transient removal.
    ScenarioSpec base;
    base.fs_hz = spec.fs_hz;
    base.rs_hz = spec.rs_hz;
    base.rolloff = spec.rolloff;
    base.rrc_span_symbols = spec.rrc_span_symbols;
    base.prbs_order_x = spec.prbs_order_x;
    base.prbs_order_y = spec.prbs_order_y;
    base.f_pkpk_hz = spec.f_pkpk_hz;
    base.f_jitter_hz = spec.f_jitter_hz;
    base.n_symbols = spec.n_symbols;
    const std::size_t usable =
        spec.n_symbols > 2 * static_cast<std::size_t>(spec.rrc_span_symbols)
            ? spec.n_symbols - 2 * static_cast<std::size_t>(spec.rrc_span_symbols)
            : 0;
    if (usable < static_cast<std::size_t>(spec.n_fft_fine))
        throw ConfigError(spec.name + ": n_symbols too small for n_fft_fine plus transients");

    CoarseEstimator probe(spec.resolved_coarse(), spec.fs_hz, spec.rs_hz, spec.rolloff);
    (void)probe;

    auto t0 = std::chrono::steady_clock::now();
    const std::size_t n_cells = spec.applied_cfo_hz.size() * spec.snr_per_bit_db.size();
    const std::size_t rows_per_cell = static_cast<std::size_t>(spec.n_realizations);

    ResidualResult res;
    res.rows.resize(n_cells * rows_per_cell);
    const CoarseConfig cc = spec.resolved_coarse();

    parallel_for(n_cells, threads, [&](std::size_t c) {
        const double applied = spec.applied_cfo_hz[c / spec.snr_per_bit_db.size()];
        const double snr = spec.snr_per_bit_db[c % spec.snr_per_bit_db.size()];
        const std::uint64_t cseed = cell_seed(spec.master_seed, c);

        for (std::size_t r = 0; r < rows_per_cell; ++r) {
            ScenarioSpec sub = base;
            sub.name = spec.name + "/cell" + std::to_string(c);
            sub.snr_per_bit_db = snr;
            sub.f_mean_hz = applied;

            std::uint64_t seed = realization_seed(cseed, static_cast<int>(r));
            DualPolSignal sig = make_realization(sub, applied, seed);
            CfoTrack track = run_track(sig, cc, spec.rs_hz, spec.rolloff);
            double coarse_est = track.filtered_hz.back();

            ResidualRow row;
            row.realization = static_cast<int>(r);
            row.seed = seed;
            row.applied_cfo_hz = applied;
            row.snr_per_bit_db = snr;
            row.coarse_error_hz =
                std::isnan(coarse_est) ? kInf : std::abs(applied - coarse_est);
            row.capture_ok = row.coarse_error_hz <= spec.rs_hz / 8.0;
            if (row.capture_ok) {
                TxConfig tx;
                tx.symbol_rate_hz = spec.rs_hz;
                tx.rolloff = spec.rolloff;
                tx.sps = sub.sps();
                tx.rrc_span_symbols = spec.rrc_span_symbols;
                DualPolSignal comp = compensate(sig, coarse_est);
                SymbolStream syms = matched_filter_decimate(comp, tx);
                FineEstimate fine = fourth_power_cfoe(syms, spec.n_fft_fine);
                row.residual_x_hz = std::abs(applied - (coarse_est + fine.x_hz));
                row.residual_y_hz = std::abs(applied - (coarse_est + fine.y_hz));
            } else {
                // Folded fine values would be misleading; flag instead.
                row.residual_x_hz = kNan;
                row.residual_y_hz = kNan;
            }
            res.rows[c * rows_per_cell + r] = row;
        }
    });

    res.max_residual_hz = 0.0;
    for (const ResidualRow& row : res.rows) {
        if (!row.capture_ok) {
            res.any_capture_fail = true;
            continue;
        }
        res.max_residual_hz =
            std::max({res.max_residual_hz, row.residual_x_hz, row.residual_y_hz});
    }
    res.wall_seconds = elapsed_s(t0);
    return res;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string config_hash(const nlohmann::json& resolved) {
    const std::string s = resolved.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
}

std::string scenario_csv(const ScenarioSpec& spec, const ScenarioResult& res) {
    const std::string hash = config_hash(spec.to_json());
    std::ostringstream os;
    os << "master_seed,realization,config_hash,f_mean_hz,max_error_hz,blocks,seed\n";
    for (const RealizationRow& r : res.rows)
        os << spec.master_seed << ',' << r.realization << ',' << hash << ','
           << fmt_num(r.f_mean_hz) << ',' << fmt_num(r.max_error_hz) << ','
           << r.blocks_evaluated << ',' << r.seed << '\n';
    return os.str();
}

std::string sweep_csv(const SweepSpec& spec, const SweepResult& res) {
    const std::string hash = config_hash(spec.to_json());
    std::ostringstream os;
    os << "master_seed,config_hash,rs_hz,snr_per_bit_db,df_max_hz,realizations,"
          "blocks_discarded,max_error_hz,status\n";
    for (const SweepCell& c : res.cells) {
        os << spec.master_seed << ',' << hash << ',' << fmt_num(c.rs_hz) << ','
           << fmt_num(c.snr_per_bit_db) << ',' << fmt_num(c.df_max_hz) << ','
           << spec.n_realizations << ',' << spec.coarse.convergence_blocks << ',';
        if (c.feasible)
            os << fmt_num(c.max_error_hz) << ",OK\n";
        else
            os << ",INFEASIBLE\n";
    }
    return os.str();
}

std::string residual_csv(const ResidualSpec& spec, const ResidualResult& res) {
    const std::string hash = config_hash(spec.to_json());
    std::ostringstream os;
    os << "master_seed,realization,config_hash,applied_cfo_hz,snr_per_bit_db,"
          "coarse_error_hz,residual_x_hz,residual_y_hz,status,seed\n";
    for (const ResidualRow& r : res.rows) {
        os << spec.master_seed << ',' << r.realization << ',' << hash << ','
           << fmt_num(r.applied_cfo_hz) << ',' << fmt_num(r.snr_per_bit_db) << ','
           << fmt_num(r.coarse_error_hz) << ',';
        if (r.capture_ok)
            os << fmt_num(r.residual_x_hz) << ',' << fmt_num(r.residual_y_hz) << ",OK,";
        else
            os << ",,CAPTURE_FAIL,";
        os << r.seed << '\n';
    }
    return os.str();
}

std::string track_csv(const ScenarioSpec& spec, const CfoTrack& track) {
    const std::string hash = config_hash(spec.to_json());
    std::ostringstream os;
    os << "master_seed,realization,config_hash,block,t_mid_s,raw_hz,filtered_hz,status\n";
    for (std::size_t k = 0; k < track.raw_hz.size(); ++k) {
        double t_mid = (static_cast<double>(k) + 0.5) * track.n_fft / track.fs_hz;
        os << spec.master_seed << ",0," << hash << ',' << k << ',' << fmt_num(t_mid)
           << ',' << fmt_num(track.raw_hz[k]) << ',' << fmt_num(track.filtered_hz[k])
           << ',' << to_string(track.status[k]) << '\n';
    }
    return os.str();
}

nlohmann::json scenario_summary(const ScenarioSpec& spec, const ScenarioResult& res) {
    return {
        {"command", "scenario"},
        {"name", spec.name},
        {"master_seed", spec.master_seed},
        {"config_hash", config_hash(spec.to_json())},
        {"realizations", spec.n_realizations},
        {"n_symbols", spec.n_symbols},
        {"rs_hz", spec.rs_hz},
        {"snr_per_bit_db", spec.snr_per_bit_db},
        {"df_max_hz", spec.resolved_df_max_hz()},
        {"max_error_hz", res.max_error_hz},
        {"wall_seconds", res.wall_seconds},
    };
}

nlohmann::json sweep_summary(const SweepSpec& spec, const SweepResult& res) {
    nlohmann::json cells = nlohmann::json::array();
    for (const SweepCell& c : res.cells) {
        nlohmann::json jc{
            {"rs_hz", c.rs_hz},
            {"snr_per_bit_db", c.snr_per_bit_db},
            {"df_max_hz", c.df_max_hz},
            {"feasible", c.feasible},
        };
        if (c.feasible) {
            jc["max_error_hz"] = c.max_error_hz;
            jc["rs_over_8_hz"] = c.rs_hz / 8.0;
            jc["within_rs_over_8"] = c.max_error_hz < c.rs_hz / 8.0;
        }
        cells.push_back(jc);
    }
    return {
        {"command", "sweep"},
        {"name", spec.name},
        {"master_seed", spec.master_seed},
        {"config_hash", config_hash(spec.to_json())},
        {"realizations", spec.n_realizations},
        {"n_symbols", spec.n_symbols},
        {"cells", cells},
        {"wall_seconds", res.wall_seconds},
    };
}

nlohmann::json residual_summary(const ResidualSpec& spec, const ResidualResult& res) {
    // Per-cell worst rail, capture failures flagged.
    nlohmann::json cells = nlohmann::json::array();
    const std::size_t n_snr = spec.snr_per_bit_db.size();
    const std::size_t per_cell = static_cast<std::size_t>(spec.n_realizations);
    const std::size_t n_cells = spec.applied_cfo_hz.size() * n_snr;
    for (std::size_t c = 0; c < n_cells; ++c) {
        double worst = 0.0;
        bool fail = false;
        for (std::size_t r = 0; r < per_cell; ++r) {
            const ResidualRow& row = res.rows[c * per_cell + r];
            if (!row.capture_ok) {
                fail = true;
                continue;
            }
            worst = std::max({worst, row.residual_x_hz, row.residual_y_hz});
        }
        cells.push_back({
            {"applied_cfo_hz", spec.applied_cfo_hz[c / n_snr]},
            {"snr_per_bit_db", spec.snr_per_bit_db[c % n_snr]},
            {"capture_fail", fail},
            {"max_residual_hz", worst},
        });
    }
    return {
        {"command", "residual"},
        {"name", spec.name},
        {"master_seed", spec.master_seed},
        {"config_hash", config_hash(spec.to_json())},
        {"realizations", spec.n_realizations},
        {"n_fft_fine", spec.n_fft_fine},
        {"cells", cells},
        {"max_residual_hz", res.max_residual_hz},
        {"any_capture_fail", res.any_capture_fail},
        {"wall_seconds", res.wall_seconds},
    };
}

nlohmann::json track_summary(const ScenarioSpec& spec, const TrackRunResult& res) {
    nlohmann::json j{
        {"command", "track"},
        {"name", spec.name},
        {"master_seed", spec.master_seed},
        {"config_hash", config_hash(spec.to_json())},
        {"blocks", res.track.raw_hz.size()},
        {"n_down", res.n_down},
        {"hz_per_unit", res.hz_per_unit},
        {"final_filtered_hz", res.final_filtered_hz},
        {"warnings", res.track.warnings},
    };
    if (res.final_curve) {
        j["final_curve"] = {
            {"x", res.final_curve->x},
            {"y", res.final_curve->y},
            {"hz_per_unit", res.final_curve->hz_per_unit},
        };
    }
    if (res.final_fit) {
        const PiecewiseFit& f = *res.final_fit;
        j["final_fit"] = {
            {"psi1", f.psi1}, {"psi2", f.psi2}, {"p1", f.p1}, {"p2", f.p2},
            {"p3", f.p3},     {"q1", f.q1},     {"q2", f.q2}, {"q3", f.q3},
        };
    }
    return j;
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

void parse_scenario_shared(Fields& f, ScenarioSpec& s) {
    s.name = f.get<std::string>("name", s.name);
    s.fs_hz = f.get<double>("fs_hz", s.fs_hz);
    s.rs_hz = f.get<double>("rs_hz", s.rs_hz);
    s.rolloff = f.get<double>("rolloff", s.rolloff);
    s.rrc_span_symbols = f.get<int>("rrc_span_symbols", s.rrc_span_symbols);
    s.prbs_order_x = f.get<int>("prbs_order_x", s.prbs_order_x);
    s.prbs_order_y = f.get<int>("prbs_order_y", s.prbs_order_y);
    s.snr_per_bit_db = f.get<double>("snr_per_bit_db", s.snr_per_bit_db);
    s.f_mean_max_hz = f.get<double>("f_mean_max_hz", s.f_mean_max_hz);
    s.f_mean_hz = f.opt<double>("f_mean_hz");
    s.f_pkpk_hz = f.get<double>("f_pkpk_hz", s.f_pkpk_hz);
    s.f_jitter_hz = f.get<double>("f_jitter_hz", s.f_jitter_hz);
    s.n_symbols = f.get<std::uint64_t>("n_symbols", s.n_symbols);
    s.n_realizations = f.get<int>("n_realizations", s.n_realizations);
    s.master_seed = f.get<std::uint64_t>("master_seed", s.master_seed);
}

}  // namespace

ScenarioSpec scenario_spec_from_json(const nlohmann::json& j) {
    ScenarioSpec s;
    Fields f(j, "scenario config");
    parse_scenario_shared(f, s);
    std::optional<double> df;
    s.coarse = parse_coarse(f.sub("coarse"), &df);
    s.df_max_hz = df;
    f.check_unknown();
    return s;
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
    SweepSpec s;
    Fields f(j, "sweep config");
    s.name = f.get<std::string>("name", s.name);
    s.fs_hz = f.get<double>("fs_hz", s.fs_hz);
    s.rs_hz = f.require<std::vector<double>>("rs_hz");
    s.snr_per_bit_db = f.require<std::vector<double>>("snr_per_bit_db");
    s.df_max_hz = f.require<std::vector<double>>("df_max_hz");
    s.rolloff = f.get<double>("rolloff", s.rolloff);
    s.rrc_span_symbols = f.get<int>("rrc_span_symbols", s.rrc_span_symbols);
    s.prbs_order_x = f.get<int>("prbs_order_x", s.prbs_order_x);
    s.prbs_order_y = f.get<int>("prbs_order_y", s.prbs_order_y);
    s.f_pkpk_hz = f.get<double>("f_pkpk_hz", s.f_pkpk_hz);
    s.f_jitter_hz = f.get<double>("f_jitter_hz", s.f_jitter_hz);
    s.n_symbols = f.get<std::uint64_t>("n_symbols", s.n_symbols);
    s.n_realizations = f.get<int>("n_realizations", s.n_realizations);
    s.master_seed = f.get<std::uint64_t>("master_seed", s.master_seed);
    std::optional<double> df;
    s.coarse = parse_coarse(f.sub("coarse"), &df);
    if (df)
        throw ConfigError("sweep config: df_max_hz inside \"coarse\" is not allowed; "
                          "the sweep grid sets it per cell");
    f.check_unknown();
    return s;
}

ResidualSpec residual_spec_from_json(const nlohmann::json& j) {
    ResidualSpec s;
    Fields f(j, "residual config");
    s.name = f.get<std::string>("name", s.name);
    s.fs_hz = f.get<double>("fs_hz", s.fs_hz);
    s.rs_hz = f.get<double>("rs_hz", s.rs_hz);
    s.rolloff = f.get<double>("rolloff", s.rolloff);
    s.rrc_span_symbols = f.get<int>("rrc_span_symbols", s.rrc_span_symbols);
    s.prbs_order_x = f.get<int>("prbs_order_x", s.prbs_order_x);
    s.prbs_order_y = f.get<int>("prbs_order_y", s.prbs_order_y);
    s.applied_cfo_hz = f.require<std::vector<double>>("applied_cfo_hz");
    s.snr_per_bit_db = f.require<std::vector<double>>("snr_per_bit_db");
    s.f_pkpk_hz = f.get<double>("f_pkpk_hz", s.f_pkpk_hz);
    s.f_jitter_hz = f.get<double>("f_jitter_hz", s.f_jitter_hz);
    s.n_symbols = f.get<std::uint64_t>("n_symbols", s.n_symbols);
    s.n_realizations = f.get<int>("n_realizations", s.n_realizations);
    s.master_seed = f.get<std::uint64_t>("master_seed", s.master_seed);
    s.n_fft_fine = f.get<int>("n_fft_fine", s.n_fft_fine);
    std::optional<double> df;
    s.coarse = parse_coarse(f.sub("coarse"), &df);
    s.df_max_hz = df;
    f.check_unknown();
    return s;
}

}  // namespace ccfoe
