#pragma once

#include "fbw/grid.hpp"

namespace fbw {

/// A derivative field. `field.mask` marks samples where some second-order
/// stencil fit inside the source mask; `onesided` marks those that needed a
/// one-sided stencil.
struct Derivative {
    ScalarField field;
    Mask onesided;
};

Derivative diff_x(const ScalarField& f);
Derivative diff_y(const ScalarField& f);

/// Compact second differences (three-point centered, four-point one-sided).
Derivative diff_xx(const ScalarField& f);
Derivative diff_yy(const ScalarField& f);

/// 5-point Laplacian on samples whose whole stencil is active.
ScalarField laplacian5(const ScalarField& f);

struct Gradient {
    ScalarField gx;
    ScalarField gy;
    Mask onesided;
};
Gradient gradient(const ScalarField& f);

struct Hessian {
    ScalarField xx;
    ScalarField xy;
    ScalarField yy;
    Mask onesided;
};
/// xx, yy compact; xy = d/dy of d/dx.
Hessian hessian(const ScalarField& f);

/// Elementwise combination helpers used across modules.
Mask mask_and(const Mask& a, const Mask& b);
Mask mask_or(const Mask& a, const Mask& b);

/// Samples of `m` whose 3x3 neighbourhood lies in `m`, eroded `layers` times.
Mask erode(const GridSpec& g, const Mask& m, int layers = 1);

}  // namespace fbw
