#pragma once

#include <functional>

#include "fbw/grid.hpp"

namespace fbw {

struct HarmonicOptions {
    /// Stop when the largest normalized point update drops below
    /// tol * max(1, sup |boundary data|).
    double tol = 1e-12;
    /// 0 selects 200 * (nx + ny) sweeps.
    int max_sweeps = 0;
    /// 0 selects the optimal SOR factor for the bounding box.
    double omega = 0.0;
};

/// A domain {level >= 0} cut out of a grid, with Dirichlet data on its
/// boundary. Samples with level > 0 away from the grid border are unknowns;
/// where a stencil arm leaves the domain the crossing is located on the arm
/// and the Shortley-Weller stencil uses `value` there.
struct CutDomain {
    GridSpec grid;
    std::function<double(double, double)> level;
    std::function<double(double, double)> value;
    /// Data at stencil-arm crossings; `value` is used when empty.
    std::function<double(double, double)> cut_value;
};

struct HarmonicSolution {
    ScalarField field;
    Mask unknown;
    int sweeps = 0;
    /// Largest normalized residual of the discrete equations at exit.
    double residual = 0.0;
};

/// Solves the 5-point Laplace equation on the interior of `data.mask`
/// (samples whose four neighbours are active), holding every other active
/// sample at its value in `data`.
HarmonicSolution solve_dirichlet_harmonic(const ScalarField& data, const HarmonicOptions& opt = {});

HarmonicSolution solve_dirichlet_harmonic(const CutDomain& dom, const HarmonicOptions& opt = {});

/// Fraction t in (0, 1] along p -> q where `level` changes sign, level(p) > 0.
double locate_crossing(const std::function<double(double, double)>& level, Point2 p, Point2 q);

}  // namespace fbw
