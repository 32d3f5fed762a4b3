// Command-line front end: scenario / sweep / track / residual campaigns.
//
// Exit codes: 0 success, 1 configuration or input error, 2 I/O error,
// 3 threshold breach when --assert (or --assert-rs8) is passed.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "ccfoe/iqfile.hpp"
#include "ccfoe/runner.hpp"

namespace {

using namespace ccfoe;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitAssert = 3;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> realizations;
    std::optional<std::uint64_t> symbols;
    std::string out_path;
    std::string json_out_path;
    int threads = 1;
    std::optional<double> assert_hz;
    bool full_scale = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool campaign) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--seed", o.seed, "Override master_seed");
    if (campaign) {
        cmd->add_option("--realizations", o.realizations,
                        "Override the number of independent realizations");
    }
    cmd->add_option("--symbols", o.symbols, "Override the symbols per realization");
    cmd->add_option("--out", o.out_path, "Write the CSV here (default: stdout)");
    cmd->add_option("--json-out", o.json_out_path, "Write the JSON summary here");
    cmd->add_option("--threads", o.threads, "Worker threads (<=1 means serial)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--assert", o.assert_hz,
                    "Exit 3 if the campaign's worst error exceeds this many Hz");
    cmd->add_flag("--full-scale", o.full_scale,
                  "Publication-scale run: 2^18 symbols and 50 (sweep: 100) "
                  "realizations unless overridden");
}

nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

// CSV goes to --out or stdout; the summary goes to --json-out, or to stdout
// when the CSV went to a file (so piped CSV output stays clean).
void emit(const CommonOpts& o, const std::string& csv, const nlohmann::json& summary) {
    if (o.out_path.empty())
        std::cout << csv;
    else
        write_text(o.out_path, csv);
    if (!o.json_out_path.empty())
        write_text(o.json_out_path, summary.dump(2) + "\n");
    else if (!o.out_path.empty())
        std::cout << summary.dump(2) << "\n";
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void apply_scenario_overrides(ScenarioSpec& s, const CommonOpts& o, int full_reals) {
    if (o.full_scale) {
        s.n_symbols = 1ull << 18;
        s.n_realizations = full_reals;
    }
    if (o.seed) s.master_seed = *o.seed;
    if (o.realizations) s.n_realizations = *o.realizations;
    if (o.symbols) s.n_symbols = *o.symbols;
}

int run_scenario_cmd(const CommonOpts& o) {
    ScenarioSpec spec = scenario_spec_from_json(load_config(o.config_path));
    apply_scenario_overrides(spec, o, 50);
    ScenarioResult res = run_scenario(spec, resolve_threads(o.threads));
    emit(o, scenario_csv(spec, res), scenario_summary(spec, res));
    if (o.assert_hz && !(res.max_error_hz <= *o.assert_hz)) {
        std::cerr << "assert: max error " << fmt_num(res.max_error_hz)
                  << " Hz exceeds bound " << fmt_num(*o.assert_hz) << " Hz\n";
        return kExitAssert;
    }
    return kExitOk;
}

int run_sweep_cmd(const CommonOpts& o, bool assert_rs8) {
    SweepSpec spec = sweep_spec_from_json(load_config(o.config_path));
    if (o.full_scale) {
        spec.n_symbols = 1ull << 18;
        spec.n_realizations = 100;
    }
    if (o.seed) spec.master_seed = *o.seed;
    if (o.realizations) spec.n_realizations = *o.realizations;
    if (o.symbols) spec.n_symbols = *o.symbols;

    SweepResult res = run_sweep(spec, resolve_threads(o.threads));
    emit(o, sweep_csv(spec, res), sweep_summary(spec, res));

    int rc = kExitOk;
    for (const SweepCell& c : res.cells) {
        if (!c.feasible) {
            if (assert_rs8) {
                std::cerr << "assert: infeasible cell rs=" << fmt_num(c.rs_hz)
                          << " df_max=" << fmt_num(c.df_max_hz) << "\n";
                rc = kExitAssert;
            }
            continue;
        }
        if (assert_rs8 && !(c.max_error_hz < c.rs_hz / 8.0)) {
            std::cerr << "assert: cell rs=" << fmt_num(c.rs_hz)
                      << " snr=" << fmt_num(c.snr_per_bit_db)
                      << " df_max=" << fmt_num(c.df_max_hz) << " error "
                      << fmt_num(c.max_error_hz) << " Hz >= rs/8\n";
            rc = kExitAssert;
        }
        if (o.assert_hz && !(c.max_error_hz <= *o.assert_hz)) {
            std::cerr << "assert: cell rs=" << fmt_num(c.rs_hz)
                      << " snr=" << fmt_num(c.snr_per_bit_db)
                      << " df_max=" << fmt_num(c.df_max_hz) << " error "
                      << fmt_num(c.max_error_hz) << " Hz exceeds bound\n";
            rc = kExitAssert;
        }
    }
    return rc;
}

int run_track_cmd(const CommonOpts& o, const std::string& capture_path,
                  const std::string& meta_path, const std::string& dump_iq_path,
                  std::optional<double> f_mean_flag) {
    ScenarioSpec spec = scenario_spec_from_json(load_config(o.config_path));
    apply_scenario_overrides(spec, o, 50);
    if (f_mean_flag) spec.f_mean_hz = *f_mean_flag;

    DualPolSignal sig;
    bool synthetic = capture_path.empty();
    double f_mean = 0.0;
    if (synthetic) {
        std::uint64_t seed = realization_seed(spec.master_seed, 0);
        f_mean = spec.f_mean_hz ? *spec.f_mean_hz
                                : draw_f_mean(seed, spec.f_mean_max_hz);
        sig = make_realization(spec, f_mean, seed);
        if (!dump_iq_path.empty()) {
            CaptureMeta meta;
            meta.sample_rate_hz = spec.fs_hz;
            meta.symbol_rate_hz = spec.rs_hz;
            meta.rolloff = spec.rolloff;
            write_capture(dump_iq_path, sig, meta);
        }
    } else {
        if (!dump_iq_path.empty())
            throw ConfigError("--dump-iq applies to synthesized runs only");
        CaptureMeta meta = read_capture_meta(
            meta_path.empty() ? sidecar_path(capture_path) : meta_path);
        sig = read_capture(capture_path, meta);
        spec.fs_hz = meta.sample_rate_hz;
        spec.rs_hz = meta.symbol_rate_hz;
        spec.rolloff = meta.rolloff;
    }

    TrackRunResult res =
        run_track_full(sig, spec.resolved_coarse(), spec.rs_hz, spec.rolloff);
    print_warnings(res.track.warnings);
    emit(o, track_csv(spec, res.track), track_summary(spec, res));

    if (o.assert_hz) {
        if (!synthetic || !spec.f_mean_hz)
            throw ConfigError(
                "track --assert needs a synthesized run with f_mean_hz pinned "
                "(the reference frequency must be known)");
        CfoProfile truth{f_mean, spec.f_pkpk_hz, spec.f_jitter_hz};
        double err = max_track_error(res.track, truth,
                                     spec.coarse.convergence_blocks, nullptr);
        if (!(err <= *o.assert_hz)) {
            std::cerr << "assert: max settled error " << fmt_num(err)
                      << " Hz exceeds bound " << fmt_num(*o.assert_hz) << " Hz\n";
            return kExitAssert;
        }
    }
    return kExitOk;
}

int run_residual_cmd(const CommonOpts& o) {
    ResidualSpec spec = residual_spec_from_json(load_config(o.config_path));
    if (o.full_scale) {
        spec.n_symbols = 1ull << 18;
        spec.n_realizations = 50;
    }
    if (o.seed) spec.master_seed = *o.seed;
    if (o.realizations) spec.n_realizations = *o.realizations;
    if (o.symbols) spec.n_symbols = *o.symbols;

    ResidualResult res = run_residual(spec, resolve_threads(o.threads));
    emit(o, residual_csv(spec, res), residual_summary(spec, res));

    if (o.assert_hz) {
        if (res.any_capture_fail) {
            std::cerr << "assert: at least one realization left the fine-stage "
                         "capture range\n";
            return kExitAssert;
        }
        if (!(res.max_residual_hz <= *o.assert_hz)) {
            std::cerr << "assert: max residual " << fmt_num(res.max_residual_hz)
                      << " Hz exceeds bound " << fmt_num(*o.assert_hz) << " Hz\n";
            return kExitAssert;
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Coarse carrier-frequency-offset estimation campaigns for coherent "
        "optical QPSK: synthesis, channel impairment, per-block estimation, "
        "and fine-stage verification"};
    app.require_subcommand(1);

    CommonOpts sc_o, sw_o, tr_o, re_o;
    bool assert_rs8 = false;
    std::string capture_path, meta_path, dump_iq_path;
    std::optional<double> f_mean_flag;

    CLI::App* sc = app.add_subcommand(
        "scenario", "Max settled estimation error over random-offset realizations");
    add_common(sc, sc_o, true);

    CLI::App* sw = app.add_subcommand(
        "sweep", "Heatmap campaign over (symbol rate, SNR, offset bound) cells");
    add_common(sw, sw_o, true);
    sw->add_flag("--assert-rs8", assert_rs8,
                 "Exit 3 unless every cell's max error is below rs/8");

    CLI::App* tr = app.add_subcommand(
        "track", "Per-block estimate trace for one synthesized run or a capture");
    add_common(tr, tr_o, false);
    tr->add_option("--capture", capture_path,
                   "Raw IQ capture (float32 [XI,XQ,YI,YQ] quadruples)");
    tr->add_option("--meta", meta_path,
                   "Capture metadata sidecar (default: <capture>.json)");
    tr->add_option("--dump-iq", dump_iq_path,
                   "Write the synthesized impaired signal to this capture file");
    tr->add_option("--f-mean", f_mean_flag, "Pin the mean offset in Hz");

    CLI::App* re = app.add_subcommand(
        "residual", "Two-stage (coarse + fourth-power) residual per (CFO, SNR) cell");
    add_common(re, re_o, true);

    try {
        app.parse(argc, argv);
        if (sc->parsed()) return run_scenario_cmd(sc_o);
        if (sw->parsed()) return run_sweep_cmd(sw_o, assert_rs8);
        if (tr->parsed())
            return run_track_cmd(tr_o, capture_path, meta_path, dump_iq_path,
                                 f_mean_flag);
        if (re->parsed()) return run_residual_cmd(re_o);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
