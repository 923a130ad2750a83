#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbw {

/// Bad caller input: malformed grids, violated preconditions, bad config.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative method ran out of budget; carries the last residual.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

using Mask = std::vector<std::uint8_t>;

/// Uniform rectangular grid, same spacing in both axes.
/// Sample (i, j) sits at (x0 + i*h, y0 + j*h); storage is row-major in j.
struct GridSpec {
    double x0 = 0.0;
    double y0 = 0.0;
    double h = 1.0;
    int nx = 3;
    int ny = 3;

    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
    }
    double x(int i) const { return x0 + i * h; }
    double y(int j) const { return y0 + j * h; }
    double x1() const { return x(nx - 1); }
    double y1() const { return y(ny - 1); }
    bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }

    /// Throws InputError unless h > 0 and nx, ny >= 3.
    void validate() const;

    /// Grid covering [xa, xb] x [ya, yb] with spacing h; endpoints are snapped
    /// outward to multiples of h so that x = 0 and y = 0 are sample lines
    /// whenever they fall inside the box.
    static GridSpec covering(double xa, double xb, double ya, double yb, double h);

    bool operator==(const GridSpec&) const = default;
};

struct ScalarField {
    GridSpec grid;
    std::vector<double> values;
    Mask mask;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0);

    static ScalarField sample(const GridSpec& g, const std::function<double(double, double)>& fn);

    double& operator()(int i, int j) { return values[grid.idx(i, j)]; }
    double operator()(int i, int j) const { return values[grid.idx(i, j)]; }
    bool active(int i, int j) const { return grid.inside(i, j) && mask[grid.idx(i, j)] != 0; }

    /// Sup |values| over active samples.
    double sup_abs() const;
};

/// Samples of a complex function of z = x + iy.
struct ComplexField {
    GridSpec grid;
    std::vector<double> re;
    std::vector<double> im;
    Mask mask;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& g);
    bool active(int i, int j) const { return grid.inside(i, j) && mask[grid.idx(i, j)] != 0; }
};

/// The 1-form a dx + b dy sampled on a grid.
struct OneForm {
    GridSpec grid;
    std::vector<double> a;
    std::vector<double> b;
    Mask mask;

    OneForm() = default;
    explicit OneForm(const GridSpec& g);
    bool active(int i, int j) const { return grid.inside(i, j) && mask[grid.idx(i, j)] != 0; }
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Labels the 4-connected components of {m == want} (-1 elsewhere); returns
/// the label count.
int label_components(const GridSpec& g, const Mask& m, std::uint8_t want, std::vector<int>& label);

/// Number of 4-connected components of the active set.
int count_components(const GridSpec& g, const Mask& m);

/// Number of bounded holes: 4-connected components of the inactive set that
/// do not touch the grid border.
int count_holes(const GridSpec& g, const Mask& m);

/// Active sample closest to (px, py); throws InputError on an empty mask.
std::pair<int, int> nearest_active(const GridSpec& g, const Mask& m, double px, double py);

}  // namespace fbw
