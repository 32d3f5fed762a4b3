#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written from first principles (naive DFT,
// explicit prefix sums, exhaustive searches, long-double solvers) so a bug in
// the production code cannot hide in a shared helper.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Bit-by-bit Fibonacci LFSR with feedback x^order + x^tap + 1, output = the
// feedback bit. Mirrors the standard ITU-style register recurrence.
inline std::vector<int> lfsr_bits(int order, int tap, std::uint64_t state, std::size_t n) {
    const std::uint64_t mask = (1ull << order) - 1;
    state &= mask;
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t fb = ((state >> (order - 1)) ^ (state >> (tap - 1))) & 1ull;
        state = ((state << 1) | fb) & mask;
        out[i] = static_cast<int>(fb);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Naive O(N^2) DFT, X[q] = sum_n x[n] exp(-j 2 pi q n / N).
inline std::vector<cplx> naive_dft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    const double w = -2.0 * 3.14159265358979323846 / static_cast<double>(n);
    for (std::size_t q = 0; q < n; ++q) {
        cplx acc(0.0, 0.0);
        for (std::size_t m = 0; m < n; ++m) {
            double ph = w * static_cast<double>(q) * static_cast<double>(m);
            acc += x[m] * cplx(std::cos(ph), std::sin(ph));
        }
        out[q] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Long-double Gaussian elimination with partial pivoting for small systems.
// Returns false when a pivot collapses.
template <std::size_t K>
inline bool solve_small(std::array<std::array<long double, K>, K> a,
                        std::array<long double, K>& b) {
    for (std::size_t col = 0; col < K; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < K; ++r)
            if (std::fabs(static_cast<double>(a[r][col])) >
                std::fabs(static_cast<double>(a[piv][col])))
                piv = r;
        if (a[piv][col] == 0.0L) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < K; ++r) {
            long double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < K; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = K; i-- > 0;) {
        long double s = b[i];
        for (std::size_t c = i + 1; c < K; ++c) s -= a[i][c] * b[c];
        b[i] = s / a[i][i];
    }
    return true;
}

// ---------------------------------------------------------------------------
// Least-squares continuous three-segment fit with FIXED knees, computed from
// scratch over the hinge basis
//   g1 = x - relu(x - k1), g2 = relu(x - k1) - relu(x - k2), g3 = relu(x - k2),
//   g4 = 1  (relu(t) = t for t >= 0, else 0; boundary belongs to the right).
// Returns the residual sum of squares, or +inf if the system is singular.
inline double hinge_sse(const std::vector<double>& x, const std::vector<double>& y,
                        double k1, double k2) {
    const std::size_t n = x.size();
    auto relu = [](double t) { return t >= 0.0 ? t : 0.0; };
    std::array<std::array<long double, 4>, 4> m{};
    std::array<long double, 4> rhs{};
    for (std::size_t i = 0; i < n; ++i) {
        double r1 = relu(x[i] - k1), r2 = relu(x[i] - k2);
        const double g[4] = {x[i] - r1, r1 - r2, r2, 1.0};
        for (int a = 0; a < 4; ++a) {
            rhs[a] += static_cast<long double>(g[a]) * y[i];
            for (int b = 0; b < 4; ++b)
                m[a][b] += static_cast<long double>(g[a]) * g[b];
        }
    }
    std::array<long double, 4> coef = rhs;
    if (!solve_small<4>(m, coef)) return std::numeric_limits<double>::infinity();
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r1 = relu(x[i] - k1), r2 = relu(x[i] - k2);
        double fit = static_cast<double>(coef[0]) * (x[i] - r1) +
                     static_cast<double>(coef[1]) * (r1 - r2) +
                     static_cast<double>(coef[2]) * r2 + static_cast<double>(coef[3]);
        double e = y[i] - fit;
        sse += e * e;
    }
    return sse;
}

// Exhaustive search over ordered sample-index knee pairs: the global SSE
// minimizer (i < j, both interior with at least two samples on each side).
struct GridSearchResult {
    std::size_t i = 0, j = 0;
    double k1 = 0.0, k2 = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

inline GridSearchResult exhaustive_knees(const std::vector<double>& x,
                                         const std::vector<double>& y) {
    const std::size_t n = x.size();
    GridSearchResult best;
    for (std::size_t i = 2; i + 4 < n; ++i) {
        for (std::size_t j = i + 2; j + 2 < n; ++j) {
            double sse = hinge_sse(x, y, x[i], x[j]);
            if (sse < best.sse) best = {i, j, x[i], x[j], sse};
        }
    }
    return best;
}

// Same search accelerated with prefix sums: every normal-equation entry for a
// knee pair is a closed form in range sums of {1, x, x^2, y, xy}, so each pair
// costs O(1) plus one 4x4 solve. SSE uses the identity
// sum (y - yhat)^2 = sum y^2 - c.b at the least-squares solution. Must agree
// with exhaustive_knees (checked by a dedicated self-test).
inline GridSearchResult exhaustive_knees_fast(const std::vector<double>& x,
                                              const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<long double> pc(n + 1, 0), px(n + 1, 0), pxx(n + 1, 0),
        py(n + 1, 0), pxy(n + 1, 0), pyy(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) {
        pc[k + 1] = pc[k] + 1.0L;
        px[k + 1] = px[k] + x[k];
        pxx[k + 1] = pxx[k] + static_cast<long double>(x[k]) * x[k];
        py[k + 1] = py[k] + y[k];
        pxy[k + 1] = pxy[k] + static_cast<long double>(x[k]) * y[k];
        pyy[k + 1] = pyy[k] + static_cast<long double>(y[k]) * y[k];
    }
    auto rng = [](const std::vector<long double>& p, std::size_t lo, std::size_t hi) {
        return p[hi] - p[lo];
    };

    GridSearchResult best;
    for (std::size_t i = 2; i + 4 < n; ++i) {
        const long double k1 = x[i];
        for (std::size_t j = i + 2; j + 2 < n; ++j) {
            const long double k2 = x[j];
            const long double d21 = k2 - k1;
            // Segment ranges: A = [0, i), B = [i, j), C = [j, n); a sample on a
            // knee belongs to the segment at its right, as in hinge_sse.
            const long double cA = rng(pc, 0, i), cB = rng(pc, i, j), cC = rng(pc, j, n);
            const long double xA = rng(px, 0, i), xB = rng(px, i, j), xC = rng(px, j, n);
            const long double xxA = rng(pxx, 0, i), xxB = rng(pxx, i, j), xxC = rng(pxx, j, n);
            const long double yA = rng(py, 0, i), yB = rng(py, i, j), yC = rng(py, j, n);
            const long double xyA = rng(pxy, 0, i), xyB = rng(pxy, i, j), xyC = rng(pxy, j, n);

            std::array<std::array<long double, 4>, 4> m{};
            std::array<long double, 4> b{};
            m[0][0] = xxA + k1 * k1 * (cB + cC);
            m[0][1] = k1 * (xB - k1 * cB) + k1 * d21 * cC;
            m[0][2] = k1 * (xC - k2 * cC);
            m[0][3] = xA + k1 * (cB + cC);
            m[1][1] = xxB - 2.0L * k1 * xB + k1 * k1 * cB + d21 * d21 * cC;
            m[1][2] = d21 * (xC - k2 * cC);
            m[1][3] = (xB - k1 * cB) + d21 * cC;
            m[2][2] = xxC - 2.0L * k2 * xC + k2 * k2 * cC;
            m[2][3] = xC - k2 * cC;
            m[3][3] = cA + cB + cC;
            for (int r = 1; r < 4; ++r)
                for (int c = 0; c < r; ++c) m[r][c] = m[c][r];
            b[0] = xyA + k1 * (yB + yC);
            b[1] = (xyB - k1 * yB) + d21 * yC;
            b[2] = xyC - k2 * yC;
            b[3] = yA + yB + yC;

            std::array<long double, 4> coef = b;
            if (!solve_small<4>(m, coef)) continue;
            long double sse = pyy[n];
            for (int a = 0; a < 4; ++a) sse -= coef[a] * b[a];
            double s = static_cast<double>(sse);
            if (s < best.sse) best = {i, j, x[i], x[j], s};
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Synthetic continuous three-segment sample generator for regression checks.
struct ThreeSegment {
    std::vector<double> x, y;
    double k1 = 0.0, k2 = 0.0;
    double p1 = 0.0, p2 = 0.0, p3 = 0.0, q1 = 0.0;

    double clean_at(double xv) const {
        if (xv < k1) return p1 * xv + q1;
        double q2 = q1 + (p1 - p2) * k1;
        if (xv < k2) return p2 * xv + q2;
        double q3 = q2 + (p2 - p3) * k2;
        return p3 * xv + q3;
    }
};

// Uniform grid on [-0.5, 0.5]; slope contrast between middle and outer
// segments at least `contrast`; optional gaussian noise of sigma =
// noise_frac * (y range).
inline ThreeSegment make_three_segment(std::size_t n, double k1, double k2, double p_outer,
                                       double contrast, double q1, double noise_frac,
                                       std::uint64_t seed) {
    ThreeSegment d;
    d.k1 = k1;
    d.k2 = k2;
    d.p1 = p_outer;
    d.p2 = p_outer * contrast;
    d.p3 = p_outer;
    d.q1 = q1;
    d.x.resize(n);
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.x[i] = -0.5 + static_cast<double>(i) / static_cast<double>(n - 1);
        d.y[i] = d.clean_at(d.x[i]);
    }
    if (noise_frac > 0.0) {
        double lo = d.y[0], hi = d.y[0];
        for (double v : d.y) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> g(0.0, noise_frac * (hi - lo));
        for (double& v : d.y) v += g(gen);
    }
    return d;
}

}  // namespace oracle
