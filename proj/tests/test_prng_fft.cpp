#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "ccfoe/fft.hpp"
#include "ccfoe/prng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ccfoe;

TEST_CASE("mix_seed is deterministic and decorrelates adjacent streams") {
    CHECK(mix_seed(42, 1) == mix_seed(42, 1));
    CHECK(mix_seed(42, 1) != mix_seed(42, 2));
    CHECK(mix_seed(42, 1) != mix_seed(43, 1));
    // Adjacent inputs should flip roughly half the output bits (avalanche).
    int bits = std::popcount(mix_seed(7, 0) ^ mix_seed(7, 1));
    CHECK(bits > 16);
    CHECK(bits < 48);
}

TEST_CASE("Rng reproduces the same stream for the same seed") {
    Rng a(123), b(123), c(124);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        std::uint64_t va = a.next_u64();
        if (va != b.next_u64()) all_equal = false;
        if (va != c.next_u64()) any_diff = true;
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("Rng uniform stays in range and has uniform moments") {
    Rng r(2024);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));

    Rng r2(7);
    for (int i = 0; i < 1000; ++i) {
        double v = r2.uniform(-3.0, 5.0);
        REQUIRE(v >= -3.0);
        REQUIRE(v < 5.0);
    }
}

TEST_CASE("Rng gaussian has standard-normal moments") {
    Rng r(5150);
    const int n = 1000000;
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = r.gaussian();
        sum += g;
        sum2 += g * g;
        sum4 += g * g * g * g;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.005);
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
    // Kurtosis of a standard normal is 3.
    CHECK(sum4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("is_pow2 classifies sizes") {
    CHECK(is_pow2(1));
    CHECK(is_pow2(2));
    CHECK(is_pow2(1024));
    CHECK_FALSE(is_pow2(0));
    CHECK_FALSE(is_pow2(3));
    CHECK_FALSE(is_pow2(1000));
}

TEST_CASE("fft matches a naive DFT on random input") {
    Rng r(99);
    std::vector<cplx> x(64);
    for (auto& v : x) v = cplx(r.gaussian(), r.gaussian());

    std::vector<cplx> fast = fft(x);
    std::vector<oracle::cplx> slow = oracle::naive_dft(
        std::vector<oracle::cplx>(x.begin(), x.end()));

    double scale = 0.0;
    for (const auto& v : slow) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < x.size(); ++k)
        CHECK(std::abs(fast[k] - slow[k]) < 1e-9 * scale);
}

TEST_CASE("fft of an on-grid tone is a single bin") {
    const int n = 256, k0 = 37;
    std::vector<cplx> x(n);
    for (int m = 0; m < n; ++m) {
        double ph = 2.0 * 3.14159265358979323846 * k0 * m / n;
        x[m] = cplx(std::cos(ph), std::sin(ph));
    }
    std::vector<cplx> sp = fft(x);
    CHECK(std::abs(sp[k0]) == doctest::Approx(n).epsilon(1e-12));
    for (int k = 0; k < n; ++k)
        if (k != k0) CHECK(std::abs(sp[k]) < 1e-8 * n);
}

TEST_CASE("fft preserves energy (Parseval)") {
    Rng r(4242);
    std::vector<cplx> x(1024);
    for (auto& v : x) v = cplx(r.gaussian(), r.gaussian());
    double time_e = 0.0;
    for (const auto& v : x) time_e += std::norm(v);

    std::vector<cplx> sp = fft(x);
    double freq_e = 0.0;
    for (const auto& v : sp) freq_e += std::norm(v);
    freq_e /= static_cast<double>(x.size());

    CHECK(freq_e == doctest::Approx(time_e).epsilon(1e-9));
}

TEST_CASE("fft rejects non-power-of-two lengths") {
    std::vector<cplx> x(17, cplx(1.0, 0.0));
    CHECK_THROWS_AS((void)fft(x), InputError);
}
