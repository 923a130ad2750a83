#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fbw/grid.hpp"
#include "fbw/report.hpp"
#include "fbw/stencil.hpp"

namespace fbw {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

/// Sampled two-phase configuration: u > 0 above the graph eta_plus, u < 0
/// below eta_minus, u = 0 in between. Graphs are sampled on the grid's
/// abscissae.
struct TwoPhaseSolution {
    double lambda_plus = 1.0;
    double lambda_minus = 1.0;
    ScalarField u;
    Mask plus;   // closure of {u > 0} on the grid: y >= eta_plus(x)
    Mask minus;  // closure of {u < 0}: y <= eta_minus(x)
    std::vector<double> xs;
    std::vector<double> eta_plus;
    std::vector<double> eta_minus;
    /// Sup deviation of u from the two-plane model.
    double flatness = 0.0;

    /// Continuous graphs when known (cut-cell geometry and bisection use them).
    Fn1 eta_plus_fn;
    Fn1 eta_minus_fn;

    /// Closed-form model for the analytic evaluation path, per phase (+1/-1).
    std::function<double(int, double, double)> exact_u;
    std::function<Point2(int, double, double)> exact_grad;
    std::function<double(int, double, double)> exact_laplacian;
    /// |grad u|^2 in closed form; optional.
    std::function<double(int, double, double)> exact_grad_sq;

    /// Variable free-boundary coefficients along the graphs, indexed by abscissa.
    Fn1 coef_plus;
    Fn1 coef_minus;

    double lambda() const;
    double coefficient(int phase, double x) const;
    /// u restricted to one phase closure (phase = +1 or -1).
    ScalarField phase_field(int phase) const;
    double graph(int phase, std::size_t i) const { return phase > 0 ? eta_plus[i] : eta_minus[i]; }
};

/// u = sqrt(L+) y above the axis and sqrt(L-) y below; eta = 0.
TwoPhaseSolution make_two_plane(double lambda_plus, double lambda_minus, const GridSpec& grid);

/// Harmonic phases between the given graphs and the outer box data. Throws
/// InputError when the graphs cross at some abscissa or the data has the
/// wrong sign.
TwoPhaseSolution assemble_from_graphs(const GridSpec& grid, const Fn1& eta_plus, const Fn1& eta_minus,
                                      double lambda_plus, double lambda_minus, const Fn2& outer);

/// Per-column graph extraction from a raw field: sign-change bracketing with
/// linear interpolation.
void extract_graphs(const ScalarField& u, std::vector<double>& eta_plus, std::vector<double>& eta_minus);

/// Sup |u - model| over the grid.
double flatness(const ScalarField& u, double lambda_plus, double lambda_minus);

struct TwoPhaseCheckOptions {
    double tol = 1e-6;
    /// Gap threshold separating contact from one-phase abscissae; < 0 selects 4h.
    double contact_tol = -1.0;
    /// Evaluate on the closed-form model instead of the grid.
    bool analytic = false;
    /// Reference constants for the jump line; default to the solution's.
    std::optional<double> ref_lambda_plus;
    std::optional<double> ref_lambda_minus;
};

/// Residuals of the two-phase system: interior Laplacians, graph traces,
/// one-phase gradient conditions, the contact inequality and the jump.
ResidualReport residuals_two_phase(const TwoPhaseSolution& sol, const TwoPhaseCheckOptions& opt = {});

struct PhaseGradients {
    Gradient plus;
    Gradient minus;
};
PhaseGradients phase_gradients(const TwoPhaseSolution& sol);

/// One-sided gradient of a phase at its graph point over abscissa i:
/// quadratic extrapolation of grid gradients from three layers inside the
/// phase, or the closed form when `grads` is null. False if unavailable.
bool graph_gradient(const TwoPhaseSolution& sol, const PhaseGradients* grads, int phase, std::size_t i,
                    Point2& grad);

/// Three rows strictly inside the phase over column i, nearest the graph first.
bool graph_layers(const TwoPhaseSolution& sol, int phase, int i, int rows[3]);
/// Quadratic through (ys[k], vs[k]) evaluated at y.
double quad_extrapolate(const double ys[3], const double vs[3], double y);

/// Trace of a phase on its graph over abscissa i (same extrapolation).
bool graph_trace(const TwoPhaseSolution& sol, bool analytic, int phase, std::size_t i, double& value);

struct BranchingSet {
    std::vector<double> points;
    double tol = 0.0;
    double h = 0.0;
};

/// Boundaries between contact {gap <= tol} and gap {gap > tol} runs of
/// sampled graph gaps, each located where the gap leaves its contact level.
/// Points closer than h are merged.
std::vector<double> locate_transitions(const std::vector<double>& xs, const std::vector<double>& gap, double tol,
                                       double h, const Fn1& gap_fn = {});

/// Branching abscissae of the solution; tol < 0 is an input error.
BranchingSet branching_set(const TwoPhaseSolution& sol, double tol);

/// Abscissa index classes: 1 for contact, 0 for one-phase, -1 for samples
/// adjacent to a transition (excluded from arc residuals).
std::vector<int> classify_abscissae(const TwoPhaseSolution& sol, double contact_tol);

}  // namespace fbw
