#pragma once

#include <vector>

#include "fbw/grid.hpp"

namespace fbw {

/// C1 bicubic Hermite interpolant from nodal values, first derivatives and
/// the mixed derivative. Evaluation fails outside cells with four active
/// corners.
class HermiteField {
public:
    HermiteField() = default;
    HermiteField(GridSpec g, std::vector<double> f, std::vector<double> fx, std::vector<double> fy,
                 std::vector<double> fxy, Mask mask);

    /// Builds derivative data from the field itself with the mask-aware stencils.
    static HermiteField from_field(const ScalarField& f);

    struct Value {
        double f = 0.0;
        double fx = 0.0;
        double fy = 0.0;
    };
    bool eval(double x, double y, Value& out) const;
    /// Like eval, but when the containing cell is not fully active the
    /// polynomial of the nearest active cell within `reach` cells is
    /// extended to (x, y).
    bool eval_near(double x, double y, Value& out, int reach = 1) const;
    const GridSpec& grid() const { return g_; }
    const Mask& mask() const { return mask_; }

private:
    Value cell_value(int i, int j, double s, double t) const;
    bool cell_active(int i, int j) const;

    GridSpec g_;
    std::vector<double> f_, fx_, fy_, fxy_;
    Mask mask_;
};

/// Four-point Lagrange interpolation of uniform samples v[k] at x0 + k h,
/// falling back to linear in the first and last cell. Clamps outside.
double cubic_sample(double x0, double h, const std::vector<double>& v, double x);

/// Linear interpolation on a sorted abscissa; clamps outside.
double linear_sample(const std::vector<double>& xs, const std::vector<double>& v, double x);

}  // namespace fbw
