#include "ccfoe/fft.hpp"

#include <cmath>
#include <utility>

namespace ccfoe {

bool is_pow2(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

// Iterative radix-2 Cooley-Tukey with a per-call twiddle table. Sizes here are
// small (<= 2^16) and counts modest, so a table rebuilt per call is cheaper
// than managing shared plan state across threads.
void fft_inplace(std::vector<cplx>& a) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!is_pow2(n)) throw InputError("fft: length must be a power of two");

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    // Forward twiddles w[k] = exp(-j 2 pi k / n) for k in [0, n/2).
    static const double kTwoPi = 6.283185307179586476925286766559;
    std::vector<cplx> w(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        w[k] = cplx(std::cos(ang), std::sin(ang));
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w[k * step];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

std::vector<cplx> fft(std::span<const cplx> block) {
    std::vector<cplx> a(block.begin(), block.end());
    fft_inplace(a);
    return a;
}

}  // namespace ccfoe
