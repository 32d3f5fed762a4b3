#pragma once

#include <span>
#include <vector>

#include "ccfoe/types.hpp"

namespace ccfoe {

// In-place forward DFT, X[q] = sum_n x[n] exp(-j 2 pi q n / N).
// N must be a power of two. No scaling is applied.
void fft_inplace(std::vector<cplx>& a);

// Convenience: forward DFT of a block, leaving the input untouched.
std::vector<cplx> fft(std::span<const cplx> block);

bool is_pow2(std::size_t n);

}  // namespace ccfoe
