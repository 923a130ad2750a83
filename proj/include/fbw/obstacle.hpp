#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fbw/bernoulli.hpp"
#include "fbw/grid.hpp"
#include "fbw/membrane.hpp"
#include "fbw/report.hpp"

namespace fbw {

using Fn2 = std::function<double(double, double)>;

/// A named obstacle input: Dirichlet data on the box and, when known, the
/// closed-form solution.
struct ObstacleCase {
    std::string tag;
    Fn2 data;
    Fn2 exact;            // empty when unknown
    bool analytic = false; // assemble from `exact` instead of solving
};

/// halfspace | radial:R | strip:a | pinched:a,c | sing | zero
ObstacleCase obstacle_case(const std::string& tag);

struct ObstacleOptions {
    double tol = 1e-10;
    /// 0 selects 400 * (nx + ny) sweeps.
    int max_sweeps = 0;
    /// 0 selects the optimal SOR factor for the box.
    double omega = 0.0;
};

struct ObstacleSolution {
    GridSpec grid;
    ScalarField u;
    /// Omega = {u > 0}.
    Mask omega;
    /// Second differences on samples whose 3x3 block lies in Omega.
    ScalarField uxx, uxy, uyy;
    double residual = 0.0;
    int sweeps = 0;
    bool analytic = false;
    std::string tag;
};

/// Projected SOR for u >= 0, Delta u <= 1, u (1 - Delta u) = 0 with the box
/// border held at `data`, started from the solve at spacing 2h. The tolerance
/// is raised to the roundoff floor of the residual. Throws ConvergenceError
/// when the budget runs out.
ObstacleSolution solve_obstacle(const GridSpec& g, const Fn2& data, const ObstacleOptions& opt = {});
/// Samples a closed-form u (no solve).
ObstacleSolution assemble_obstacle(const GridSpec& g, const Fn2& u);
ObstacleSolution make_obstacle(const GridSpec& g, const ObstacleCase& c, const ObstacleOptions& opt = {});

/// max(0, Delta_h u - 1) everywhere and |Delta_h u - 1| where u > 0, over
/// samples with a full stencil.
double complementarity_residual(const ScalarField& u);

/// Omega samples at distance >= clearance from the contact set and two layers
/// off the box frame.
Mask clear_interior(const ObstacleSolution& sol, double clearance);

/// T = (x - u_x) + i u_y and S = (u_y - y) + i u_x on Omega.
struct ConjugatePair {
    ComplexField T, S;
    /// sup |T - iS - z|.
    double identity = 0.0;
    /// Cauchy-Riemann residual fields on the interior set.
    ScalarField cr_T, cr_S;
    double cr_T_sup = 0.0, cr_S_sup = 0.0;
    Mask interior;
};

/// `clearance` is the distance from the free boundary below which samples are
/// left out of the interior set.
ConjugatePair conjugate_pair(const ObstacleSolution& sol, double clearance = 0.125);

struct ObstacleForms {
    /// alpha1 = u_yy dx - u_xy dy, alpha2 = u_xy dx - u_xx dy on Omega.
    OneForm alpha1, alpha2;
    ResidualReport report;
    /// Periods of alpha1 and alpha2 around each hole of Omega.
    std::vector<std::pair<double, double>> periods;
};

ObstacleForms weierstrass_forms_obstacle(const ObstacleSolution& sol, double clearance = 0.125);

enum class Density { Reg, Sing, Unresolved, Flagged };
const char* density_name(Density d);

struct BoundarySample {
    int i = 0, j = 0;
    std::vector<double> theta_r;
    double theta = 0.0;
    Density label = Density::Unresolved;
    /// Unit normal pointing into Omega.
    Point2 normal;
};

/// Per-column graphs of the boundaries of {u_y > 0} (plus) and {u_y < 0} (minus).
struct DerivativeGraphs {
    std::vector<double> xs, eta_plus, eta_minus;
    std::vector<std::uint8_t> valid;
    long flagged_columns = 0;
    /// Samples where int{u = 0} and {eta- < y < eta+} disagree, away from the graphs.
    long interior_mismatch = 0;
};

struct BoundaryStratification {
    std::vector<BoundarySample> samples;
    std::vector<double> radii;
    long reg = 0, sing = 0, unresolved = 0, flagged = 0;
    DerivativeGraphs graphs;
};

/// Boundary samples are contact samples with a 4-neighbour in Omega. Radii
/// default to {8h, 16h, 32h}.
BoundaryStratification stratify_boundary(const ObstacleSolution& sol, std::vector<double> radii = {});
/// |B_r(c) cap (union of Omega cells)| / |B_r| with exact disk-square areas.
double omega_density(const ObstacleSolution& sol, Point2 c, double r);
double disk_rect_area(double cx, double cy, double r, double x0, double x1, double y0, double y1);

DerivativeGraphs derivative_graphs(const ObstacleSolution& sol);

/// |grad u_e|^2 - e . grad u_e on Reg samples with e . nu > 0.1, and the
/// e2 specialization |grad u_y|^2 - u_yy. The Hessian is read along nu at
/// t0, 1.5 t0, 2 t0 with t0 = h^0.4 / 4 and extrapolated quadratically to the
/// free boundary located from sqrt(2u) at 2h and 3h.
ResidualReport boundary_condition_check(const ObstacleSolution& sol, const BoundaryStratification& st,
                                        Point2 e = {0.0, 1.0});

struct ObstacleMembrane {
    MembraneState state;
    ResidualReport report;
    /// T = (x - u_x, u_y) on Omega three layers in; plus targets have t > 0, minus t < 0.
    Chart chart;
    /// First inverted row of the upper grid; rows in between are left out.
    int first_row = 0;
};

/// w+(s, t) = Re S o T^-1 (s, t) and w-(s, -t) on the upper (s, t) grid
/// (spacing h, |s| window 1/4 inside the box, t <= 1/4); row 0 holds the
/// traces -eta+- from the derivative graphs.
/// Harmonicity and the gradient identity are checked where every stencil
/// source lies in clear_interior(sol, clearance).
ObstacleMembrane obstacle_membrane(const ObstacleSolution& sol, const DerivativeGraphs& graphs,
                                   double tol = 1e-6, double clearance = 0.125);

/// Transitions of eta+ - eta- across `gap_tol` next to Sing samples.
BranchingSet branching_points_obstacle(const ObstacleSolution& sol, const BoundaryStratification& st,
                                       double gap_tol = -1.0);

/// Angle of the dominant eigenvector of the averaged Hessian against e2.
double first_stratum_angle(const ObstacleSolution& sol);
/// Bilinear resampling of u rotated by `angle` (same grid); second differences recomputed.
ObstacleSolution rotate_obstacle(const ObstacleSolution& sol, double angle);

}  // namespace fbw
