#pragma once

#include <span>
#include <vector>

#include "ccfoe/types.hpp"

namespace ccfoe {

// Sample set for piecewise-linear fitting. Non-owning views; x must be
// strictly increasing with at least 8 points.
struct RegressionInput {
    std::span<const double> x;
    std::span<const double> y;
};

// Trapezoid-rule running integrals of y and x*y along the sample grid,
// anchored at the first sample (both start at zero).
struct TrapezoidPrimitives {
    std::vector<double> s_y;
    std::vector<double> s_xy;
};

// Fit outcome classification. Values other than Ok describe *data* that does
// not support a two-breakpoint model; they are expected in live operation and
// are not exceptions.
enum class SlrStatus {
    Ok,
    NoBreakpoints,          // quadratic discriminant < 0
    DegenerateQuadratic,    // leading coefficient ~ 0, at most one knee resolvable
    BreakpointOutOfRange,   // real roots, but outside the sampled domain
    IllConditioned,         // normal equations unusable
};

// Intermediate regression coefficients of the integral-equation stage, kept
// for diagnostics. The breakpoints are the roots of c1 t^2 - c2 t + 1 = 0.
struct AuxCoefficients {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    double discriminant = 0.0;
};

struct BreakpointResult {
    SlrStatus status = SlrStatus::IllConditioned;
    double psi1 = 0.0;  // roots in ascending order; populated for
    double psi2 = 0.0;  // BreakpointOutOfRange too, for diagnostics
    AuxCoefficients aux;
};

// Continuous three-segment model
//   y = p_i x + q_i on segments split at psi1 < psi2 (middle is [psi1, psi2)),
// with q2, q3 pinned by continuity at the breakpoints.
struct PiecewiseFit {
    double psi1 = 0.0, psi2 = 0.0;
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
    double q1 = 0.0, q2 = 0.0, q3 = 0.0;
};

struct SlopeResult {
    SlrStatus status = SlrStatus::IllConditioned;
    PiecewiseFit fit;
    double sse = 0.0;  // residual sum of squares of the returned fit
};

// Running trapezoid integrals used by the closed-form breakpoint stage.
TrapezoidPrimitives trapezoid_primitives(const RegressionInput& in);

// Closed-form two-breakpoint estimate. The piecewise-linear model is recast
// through its double integral equation; least squares over the regressors
//   F1 = 6 S_xy - 2 x S_y - x^2 y,  F2 = x y - 2 S_y,  F3 = x,  F4 = 1
// yields (c1..c4), and the breakpoints are the roots of c1 t^2 - c2 t + 1 = 0.
// Single pass over the data, no iteration, no initial guess.
BreakpointResult fit_breakpoints(const RegressionInput& in);

// Least-squares slopes/intercepts for known breakpoints, via the hinge basis
//   G1 = x - (x - psi1) H(x - psi1),
//   G2 = (x - psi1) H(x - psi1) - (x - psi2) H(x - psi2),
//   G3 = (x - psi2) H(x - psi2),  G4 = 1,      with H(0) = 1.
// Requires x_first < psi1 < psi2 < x_last.
SlopeResult fit_slopes(const RegressionInput& in, double psi1, double psi2);

// Model value at x, segments chosen as (-inf, psi1), [psi1, psi2), [psi2, inf).
double evaluate(const PiecewiseFit& fit, double x);

}  // namespace ccfoe
