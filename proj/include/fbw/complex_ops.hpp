#pragma once

#include <vector>

#include "fbw/grid.hpp"

namespace fbw {

/// g = 2 d_z v = v_x - i v_y.
ComplexField complex_gradient(const ScalarField& v);

/// Pointwise |d_x Re F - d_y Im F| + |d_y Re F + d_x Im F| where all four
/// derivatives exist; mask marks those samples.
ScalarField cauchy_riemann_residual(const ComplexField& F);

/// A potential reconstructed from a 1-form by trapezoidal integration along
/// grid lines. `path_residual` is the sup discrepancy between the
/// row-first and the column-first sweep over samples both reached.
struct Potential {
    ScalarField field;
    double path_residual = 0.0;
    std::pair<int, int> base{0, 0};
};

/// Base point convention for every grid integration: the origin when it is an
/// active sample, else the active sample nearest to it.
std::pair<int, int> default_base(const GridSpec& g, const Mask& m);

/// Integrates a dx + b dy from `base` (value 0 there). Throws InputError if
/// base is inactive.
Potential integrate_potential(const OneForm& w, std::pair<int, int> base);

/// Same potential, integrated from a point on the widest row of the twice
/// eroded mask (middle of the band of widest rows), so every sample is reached
/// along that row and then its column; shifted to vanish at `base`.
Potential integrate_from_spine(const OneForm& w, std::pair<int, int> base);

/// Harmonic conjugate vbar with vbar(base) = 0 and vbar + i v holomorphic.
/// On a mask with holes a path discrepancy above `period_tol` raises
/// InputError reporting the period.
Potential harmonic_conjugate(const ScalarField& v, std::pair<int, int> base, double period_tol = 1e-6);

/// Bilinear interpolation of a sampled array; false when the containing cell
/// is not fully active or the point is outside the grid.
bool bilinear(const GridSpec& g, const std::vector<double>& v, const Mask& m, double x, double y, double& out);

/// Trapezoidal line integral of w along a polyline (bilinear sampling, steps
/// of at most h/2). Throws InputError when the path leaves the mask.
double integrate_form(const OneForm& w, const std::vector<Point2>& path);

}  // namespace fbw
