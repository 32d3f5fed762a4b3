#include <cmath>
#include <complex>
#include <vector>

#include "ccfoe/coarse.hpp"
#include "ccfoe/fine.hpp"
#include "ccfoe/prng.hpp"
#include "ccfoe/waveform.hpp"
#include "doctest.h"

using namespace ccfoe;

namespace {

std::vector<cplx> random_qpsk(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint8_t> bits(2 * n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
    return map_qpsk_gray(bits);
}

void rotate_df(std::vector<cplx>& s, double df_hz, double rs_hz) {
    const double w = 2.0 * 3.141592653589793238462643383279 * df_hz / rs_hz;
    for (std::size_t m = 0; m < s.size(); ++m)
        s[m] *= cplx(std::cos(w * static_cast<double>(m)),
                     std::sin(w * static_cast<double>(m)));
}

void add_symbol_noise(std::vector<cplx>& s, double snr_per_bit_db, std::uint64_t seed) {
    // Unit-energy symbols, 2 bits each: sigma^2 = 1 / (2 * 10^(snr/10)) total.
    const double sq = std::sqrt(0.5 / (2.0 * std::pow(10.0, snr_per_bit_db / 10.0)));
    Rng rng(seed);
    for (auto& v : s) v += cplx(sq * rng.gaussian(), sq * rng.gaussian());
}

}  // namespace

TEST_CASE("fourth-power estimate is near zero after a clean matched chain") {
    TxConfig tx;
    tx.sps = 4;
    auto sig = synthesize(tx, 4096 + 2 * static_cast<std::size_t>(tx.rrc_span_symbols));
    auto stream = matched_filter_decimate(sig, tx);
    REQUIRE(stream.x.size() >= 4096);

    const int n_fft = 4096;
    auto e = fourth_power_cfoe(stream, n_fft);
    const double quarter_bin = tx.symbol_rate_hz / (4.0 * n_fft) / 4.0;
    CHECK(std::abs(e.x_hz) < quarter_bin);
    CHECK(std::abs(e.y_hz) < quarter_bin);
}

TEST_CASE("ten megahertz residual at four gigabaud lands within one bin") {
    const double rs = 4e9, df = 10e6;
    const int n_fft = 1 << 14;
    SymbolStream stream;
    stream.symbol_rate_hz = rs;
    stream.x = random_qpsk(1 << 14, 21);
    stream.y = random_qpsk(1 << 14, 22);
    rotate_df(stream.x, df, rs);
    rotate_df(stream.y, -df, rs);  // rails are independent, signs included

    auto e = fourth_power_cfoe(stream, n_fft);
    const double bin = rs / (4.0 * n_fft);  // 61.035 kHz per estimate step
    CHECK(std::abs(e.x_hz - df) <= bin);
    CHECK(std::abs(e.y_hz + df) <= bin);
}

TEST_CASE("offsets beyond one eighth of the symbol rate fold") {
    // At rs/6 the quadrupled tone lands at 2rs/3, which aliases to -rs/3:
    // the estimator reports -rs/12 and cannot recover the true value.
    const double rs = 4e9, df = rs / 6.0;
    auto s = random_qpsk(1 << 13, 33);
    rotate_df(s, df, rs);
    double est = fourth_power_cfoe(s, rs, 1 << 13);
    CHECK(std::abs(est - (-rs / 12.0)) < 2e6);
    CHECK(std::abs(est - df) > 0.9e9);
    // Whatever the input, the report stays in the unambiguous interval.
    CHECK(est > -rs / 8.0);
    CHECK(est <= rs / 8.0);
}

TEST_CASE("fourth-power estimates stay unbiased in noise") {
    const double rs = 4e9, df = 2.7e6, snr_db = 5.0;
    const int n_fft = 1 << 12;
    const double bin = rs / (4.0 * n_fft);  // 244.14 kHz

    double err_sum = 0.0;
    int within = 0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
        auto s = random_qpsk(1 << 12, 100 + static_cast<std::uint64_t>(t));
        rotate_df(s, df, rs);
        add_symbol_noise(s, snr_db, 900 + static_cast<std::uint64_t>(t));
        double est = fourth_power_cfoe(s, rs, n_fft);
        double err = est - df;
        err_sum += err;
        if (std::abs(err) <= bin) ++within;
    }
    CHECK(within >= trials - 4);
    CHECK(std::abs(err_sum / trials) < 0.25 * bin);
}

TEST_CASE("fine stage sharpens the wide-range estimate") {
    // Full receive chain: wide-range estimate, counter-rotation, matched
    // filtering, fourth-power residual. The combined estimate must beat the
    // wide-range stage alone by a wide margin.
    const double rs = 4e9, df_true = 1.0123e9;
    TxConfig tx;  // 4 GBd, 16 sps, 64 GS/s
    auto sig = synthesize(tx, 8272);
    CfoProfile cfo;
    cfo.f_mean_hz = df_true;
    sig = apply_cfo(sig, cfo);
    ChannelConfig ch;
    ch.snr_per_bit_db = 10.0;
    ch.noise_seed = 7;
    sig = add_awgn(sig, ch, rs);

    CoarseConfig ccfg;
    ccfg.df_max_hz = 5e9;
    auto track = run_track(sig, ccfg, rs, tx.rolloff);
    const double coarse = track.filtered_hz.back();
    REQUIRE(std::isfinite(coarse));
    const double coarse_err = std::abs(df_true - coarse);
    CHECK(coarse_err < 100e6);

    auto stream = matched_filter_decimate(compensate(sig, coarse), tx);
    auto fine = fourth_power_cfoe(stream, 4096);
    for (double f : {fine.x_hz, fine.y_hz}) {
        const double total_err = std::abs(df_true - (coarse + f));
        CHECK(total_err < coarse_err);
        CHECK(total_err < 300e3);
    }
}

TEST_CASE("fourth-power estimator validates its inputs") {
    auto s = random_qpsk(64, 1);
    CHECK_THROWS_AS((void)fourth_power_cfoe(s, 4e9, 12), ConfigError);   // not pow2
    CHECK_THROWS_AS((void)fourth_power_cfoe(s, 4e9, 4), ConfigError);    // too small
    CHECK_THROWS_AS((void)fourth_power_cfoe(s, 0.0, 64), ConfigError);   // bad rate
    CHECK_THROWS_AS((void)fourth_power_cfoe(s, 4e9, 128), InputError);   // too short

    std::vector<cplx> silent(256, cplx(0.0, 0.0));
    CHECK(fourth_power_cfoe(silent, 4e9, 256) == 0.0);
}

TEST_CASE("matched filter rejects inconsistent records") {
    TxConfig tx;
    tx.sps = 4;
    auto sig = synthesize(tx, 256);

    DualPolSignal wrong_rate = sig;
    wrong_rate.sample_rate_hz *= 2.0;
    CHECK_THROWS_AS((void)matched_filter_decimate(wrong_rate, tx), ConfigError);

    DualPolSignal ragged = sig;
    ragged.x.pop_back();
    ragged.y.pop_back();
    CHECK_THROWS_AS((void)matched_filter_decimate(ragged, tx), InputError);

    auto brief = synthesize(tx, 50);  // under 3 spans of 20 symbols
    CHECK_THROWS_AS((void)matched_filter_decimate(brief, tx), InputError);
}
