#include "ccfoe/slr.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ccfoe {

namespace {

constexpr double kPivotRatioLimit = 1e12;  // partial-pivot condition guard
constexpr double kEdgeFrac = 1e-3;         // breakpoint keep-out near domain ends
constexpr double kC1Tol = 1e-9;            // degenerate quadratic threshold

void check_input(const RegressionInput& in) {
    if (in.x.size() != in.y.size())
        throw InputError("slr: x and y lengths differ");
    if (in.x.size() < 8)
        throw InputError("slr: need at least 8 samples");
    for (std::size_t i = 1; i < in.x.size(); ++i)
        if (!(in.x[i] > in.x[i - 1]))
            throw InputError("slr: x must be strictly increasing");
}

struct Solve4Result {
    std::array<double, 4> c{};
    bool singular = false;
    double pivot_ratio = 0.0;
};

// Dense 4x4 Gaussian elimination with partial pivoting. The pivot magnitude
// spread doubles as a cheap conditioning probe.
Solve4Result solve4(std::array<std::array<double, 4>, 4> m, std::array<double, 4> b) {
    Solve4Result r;
    double pmax = 0.0, pmin = 0.0;
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int row = col + 1; row < 4; ++row)
            if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
        if (piv != col) {
            std::swap(m[piv], m[col]);
            std::swap(b[piv], b[col]);
        }
        double p = std::abs(m[col][col]);
        if (p == 0.0 || !std::isfinite(p)) {
            r.singular = true;
            return r;
        }
        pmax = (col == 0) ? p : std::max(pmax, p);
        pmin = (col == 0) ? p : std::min(pmin, p);
        for (int row = col + 1; row < 4; ++row) {
            double f = m[row][col] / m[col][col];
            if (f == 0.0) continue;
            for (int k = col; k < 4; ++k) m[row][k] -= f * m[col][k];
            b[row] -= f * b[col];
        }
    }
    for (int col = 3; col >= 0; --col) {
        double acc = b[col];
        for (int k = col + 1; k < 4; ++k) acc -= m[col][k] * r.c[k];
        r.c[col] = acc / m[col][col];
    }
    r.pivot_ratio = pmax / pmin;
    return r;
}

// RMS residual of the best single line, relative to the y spread. Exactly
// collinear data makes the integral-equation normal matrix singular, so it is
// filtered out before the 4x4 solve and reported as a degenerate quadratic.
double relative_line_residual(const RegressionInput& in) {
    const std::size_t n = in.x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double ymin = in.y[0], ymax = in.y[0];
    for (std::size_t i = 0; i < n; ++i) {
        sx += in.x[i];
        sy += in.y[i];
        sxx += in.x[i] * in.x[i];
        sxy += in.x[i] * in.y[i];
        ymin = std::min(ymin, in.y[i]);
        ymax = std::max(ymax, in.y[i]);
    }
    const double nn = static_cast<double>(n);
    double den = nn * sxx - sx * sx;
    double slope = (nn * sxy - sx * sy) / den;
    double icept = (sy - slope * sx) / nn;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = in.y[i] - (slope * in.x[i] + icept);
        sse += r * r;
    }
    double spread = ymax - ymin;
    if (spread <= 0.0) return 0.0;  // constant y is collinear by definition
    return std::sqrt(sse / nn) / spread;
}

}  // namespace

TrapezoidPrimitives trapezoid_primitives(const RegressionInput& in) {
    check_input(in);
    const std::size_t n = in.x.size();
    TrapezoidPrimitives p;
    p.s_y.resize(n);
    p.s_xy.resize(n);
    p.s_y[0] = 0.0;
    p.s_xy[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double h = in.x[i] - in.x[i - 1];
        p.s_y[i] = p.s_y[i - 1] + 0.5 * h * (in.y[i] + in.y[i - 1]);
        p.s_xy[i] = p.s_xy[i - 1] +
                    0.5 * h * (in.x[i] * in.y[i] + in.x[i - 1] * in.y[i - 1]);
    }
    return p;
}

BreakpointResult fit_breakpoints(const RegressionInput& in) {
    check_input(in);
    BreakpointResult out;

    if (relative_line_residual(in) < 1e-9) {
        out.status = SlrStatus::DegenerateQuadratic;
        return out;
    }

    const TrapezoidPrimitives pr = trapezoid_primitives(in);
    const std::size_t n = in.x.size();

    // Accumulate the 4x4 normal equations of F = (F1, F2, F3, F4) against y.
    std::array<std::array<double, 4>, 4> m{};
    std::array<double, 4> b{};
    for (std::size_t i = 0; i < n; ++i) {
        const double x = in.x[i];
        const double y = in.y[i];
        const double f[4] = {
            6.0 * pr.s_xy[i] - 2.0 * x * pr.s_y[i] - x * x * y,
            x * y - 2.0 * pr.s_y[i],
            x,
            1.0,
        };
        for (int r = 0; r < 4; ++r) {
            for (int c = r; c < 4; ++c) m[r][c] += f[r] * f[c];
            b[r] += f[r] * y;
        }
    }
    for (int r = 1; r < 4; ++r)
        for (int c = 0; c < r; ++c) m[r][c] = m[c][r];

    const Solve4Result sol = solve4(m, b);
    if (sol.singular || sol.pivot_ratio > kPivotRatioLimit) {
        out.status = SlrStatus::IllConditioned;
        return out;
    }

    const double c1 = sol.c[0], c2 = sol.c[1];
    out.aux = {c1, c2, sol.c[2], sol.c[3], c2 * c2 - 4.0 * c1};

    const double range = in.x.back() - in.x.front();
    if (std::abs(c1) * range * range < kC1Tol) {
        out.status = SlrStatus::DegenerateQuadratic;
        return out;
    }
    if (out.aux.discriminant < 0.0) {
        out.status = SlrStatus::NoBreakpoints;
        return out;
    }

    // Roots of c1 t^2 - c2 t + 1, computed in the cancellation-free order.
    const double sq = std::sqrt(out.aux.discriminant);
    const double bb = -c2;
    const double q = -0.5 * (bb + std::copysign(sq, bb));
    double r1, r2;
    if (q != 0.0) {
        r1 = q / c1;
        r2 = 1.0 / q;
    } else {
        r1 = 0.0;
        r2 = 0.0;
    }
    if (!std::isfinite(r1) || !std::isfinite(r2)) {
        out.status = SlrStatus::IllConditioned;
        return out;
    }
    out.psi1 = std::min(r1, r2);
    out.psi2 = std::max(r1, r2);

    // Keep-out margin near the domain edges, and the middle segment must
    // actually be sampled; otherwise the root pair is geometric noise.
    const double lo = in.x.front() + range * kEdgeFrac;
    const double hi = in.x.back() - range * kEdgeFrac;
    bool in_range = out.psi1 > lo && out.psi2 < hi && out.psi1 < out.psi2;
    if (in_range) {
        std::size_t mid = 0;
        for (std::size_t i = 0; i < n && in.x[i] < out.psi2; ++i)
            if (in.x[i] >= out.psi1) ++mid;
        in_range = mid >= 2;
    }
    out.status = in_range ? SlrStatus::Ok : SlrStatus::BreakpointOutOfRange;
    return out;
}

SlopeResult fit_slopes(const RegressionInput& in, double psi1, double psi2) {
    check_input(in);
    if (!(in.x.front() < psi1 && psi1 < psi2 && psi2 < in.x.back()))
        throw InputError("fit_slopes: breakpoints must satisfy x_first < psi1 < psi2 < x_last");

    SlopeResult out;
    std::array<std::array<double, 4>, 4> m{};
    std::array<double, 4> b{};
    for (std::size_t i = 0; i < in.x.size(); ++i) {
        const double x = in.x[i];
        const double y = in.y[i];
        // Hinge terms with H(0) = 1: a sample exactly on a breakpoint belongs
        // to the segment to its right.
        const double h1 = (x >= psi1) ? x - psi1 : 0.0;
        const double h2 = (x >= psi2) ? x - psi2 : 0.0;
        const double g[4] = {x - h1, h1 - h2, h2, 1.0};
        for (int r = 0; r < 4; ++r) {
            for (int c = r; c < 4; ++c) m[r][c] += g[r] * g[c];
            b[r] += g[r] * y;
        }
    }
    for (int r = 1; r < 4; ++r)
        for (int c = 0; c < r; ++c) m[r][c] = m[c][r];

    const Solve4Result sol = solve4(m, b);
    if (sol.singular || sol.pivot_ratio > kPivotRatioLimit) {
        out.status = SlrStatus::IllConditioned;
        return out;
    }

    PiecewiseFit& f = out.fit;
    f.psi1 = psi1;
    f.psi2 = psi2;
    f.p1 = sol.c[0];
    f.p2 = sol.c[1];
    f.p3 = sol.c[2];
    f.q1 = sol.c[3];
    f.q2 = f.q1 + (f.p1 - f.p2) * psi1;
    f.q3 = f.q2 + (f.p2 - f.p3) * psi2;

    double sse = 0.0;
    for (std::size_t i = 0; i < in.x.size(); ++i) {
        double r = in.y[i] - evaluate(f, in.x[i]);
        sse += r * r;
    }
    out.sse = sse;
    out.status = SlrStatus::Ok;
    return out;
}

double evaluate(const PiecewiseFit& fit, double x) {
    if (x < fit.psi1) return fit.p1 * x + fit.q1;
    if (x < fit.psi2) return fit.p2 * x + fit.q2;
    return fit.p3 * x + fit.q3;
}

}  // namespace ccfoe
