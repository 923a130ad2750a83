#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fbw/bernoulli.hpp"
#include "fbw/membrane.hpp"

namespace fbw {

/// Sorted disjoint closed intervals inside [-1, 1]; a degenerate [a, a] is a point.
class IntervalUnion {
public:
    IntervalUnion() = default;
    /// Validates, sorts and merges touching or overlapping intervals.
    explicit IntervalUnion(std::vector<std::pair<double, double>> parts);

    const std::vector<std::pair<double, double>>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    bool contains(double x) const;
    /// Boundary points strictly inside (-1, 1), points counted once.
    std::vector<double> boundary() const;
    /// Maximal open components of [-1, 1] minus K.
    std::vector<std::pair<double, double>> complement() const;
    double lo() const { return parts_.front().first; }
    double hi() const { return parts_.back().second; }

private:
    std::vector<std::pair<double, double>> parts_;
};

struct FlatProfile {
    std::vector<double> xs, f;
    /// Samples where exp underflow forced the clamp to -1e-300.
    long clamped = 0;
    /// Smallest distance to the boundary of K among clamped samples.
    double clamp_distance = 0.0;
    std::vector<std::string> warnings;
};

/// f = -exp(-1/(x-a)^2) exp(-1/(b-x)^2) on each gap (a, b) of K, one factor on
/// the end gaps; f = 0 on K.
double flat_value(const IntervalUnion& K, double x);
FlatProfile build_f(const IntervalUnion& K, const std::vector<double>& xs);

struct HalfBundle {
    IntervalUnion K;
    GridSpec grid;
    std::vector<double> f;  // per column
    ScalarField v, vbar;
    /// Psi_f = (vbar, v) as an invertible chart on E_f.
    Chart psi;
    double cr_residual = 0.0;
    double hopf_min = 0.0;
    double top_value = 1.0;
    int sweeps = 0;
};

struct CounterexampleOptions {
    double height = 1.0;
    double pad = 0.5;
    double hopf_floor = 0.1;
};

/// Harmonic v on E_f = {y > f(x)} in the padded window, v = 0 on y = f and
/// v = y - mean f on the top edge; vbar(0, 0) = 0. Throws InputError when
/// min |grad v| on the free part of the boundary is below the Hopf floor.
HalfBundle build_half_bundle(const IntervalUnion& K, double h, const CounterexampleOptions& opt = {});

/// Preimage abscissa of (s, 0) under Psi_f restricted to y = 0.
double psi_preimage_x(const HalfBundle& b, double s);
/// v(x, 0) and grad v(x, 0) from the chart interpolants.
bool v_on_axis(const HalfBundle& b, double x, double& v, Point2& grad);

struct CounterexampleBundle {
    /// Shared with the graph and coefficient closures of the solution.
    std::shared_ptr<const HalfBundle> half;
    /// w+ and the odd reflection w-(s, t) = -w+(s, -t) on the (s, t) window.
    ScalarField w_plus, w_minus;
    /// Lambda+(s, t) = |grad v|^-2 o Psi^-1 for t >= 0, Lambda-(s, t) = Lambda+(s, -t).
    ScalarField lambda_plus, lambda_minus;
    double oddness = 0.0;
    double trace_agreement = 0.0;
    /// Sup |w+ - y o Psi^-1| over the plus phase (pointwise inversion cross-check).
    double inversion_discrepancy = 0.0;
    long flagged = 0;
};

/// Full construction; the solution lives on the (s, t) window with
/// coefficients Lambda(s) along the graphs and reference constants taken at
/// the base point.
std::pair<CounterexampleBundle, TwoPhaseSolution> assemble_counterexample(const IntervalUnion& K, double h,
                                                                          const CounterexampleOptions& opt = {});

struct BranchingVerdict {
    bool pass = false;
    std::vector<double> measured;  // x coordinates
    std::vector<double> expected;
    double hausdorff = 0.0;
    double h = 0.0;
};

/// Branching set with exact contact classification, mapped back through
/// Psi_f, against the boundary of K; pass iff Hausdorff distance <= 4h.
BranchingVerdict verify_branching_prescription(const CounterexampleBundle& b, const TwoPhaseSolution& sol);

}  // namespace fbw
