#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "fbw/bernoulli.hpp"
#include "fbw/interp.hpp"
#include "fbw/report.hpp"
#include "fbw/weierstrass.hpp"

namespace fbw {

struct ChartOptions {
    double j_min = 1e-3;
    int max_newton = 40;
    /// Convergence threshold relative to the image diameter.
    double newton_tol = 1e-10;
};

/// T(x, y) = (psi1, f v) on the working region {J > J_min}.
struct Chart {
    int phase = 1;
    GridSpec grid;
    Mask mask;
    ScalarField s, t;
    /// det DT from differences of the sampled chart, and 1/2 f^2 v_y (1 + |grad v|^2).
    ScalarField j_numeric, j_closed;
    double j_discrepancy = 0.0;
    double j_min = 0.0;
    double diam = 1.0;
    HermiteField hs, ht, hpsi2;
    ChartOptions opt;
    /// Forward samples binned in (s, t) for Newton seeds.
    double bucket = 1.0;
    double s0 = 0.0, t0 = 0.0;
    int bx = 1, by = 1;
    std::vector<std::vector<std::size_t>> bins;
};

Chart build_chart(const WeierstrassData& d, const WeierstrassSurface& surf, const ChartOptions& opt = {});

/// Chart of a general planar map (s, t) with nodal derivatives; the working
/// region is `mask` intersected with {det > J_min}. hpsi2 is left empty.
Chart make_chart(const GridSpec& g, const Mask& mask, const std::vector<double>& s, const std::vector<double>& t,
                 const std::vector<double>& sx, const std::vector<double>& sy, const std::vector<double>& tx,
                 const std::vector<double>& ty, const ChartOptions& opt = {});

struct Inverse {
    Point2 src;
    bool ok = false;
    double residual = 0.0;
    int iterations = 0;
};

/// Damped Newton on T(x, y) = target, seeded by the nearest forward sample.
Inverse invert_chart(const Chart& c, Point2 target);
std::vector<Inverse> invert_chart(const Chart& c, const std::vector<Point2>& targets);

/// Membrane fields on the upper half grid t >= 0 (row 0 is the trace t = 0).
/// The lower membrane is stored reflected: w_minus_r(s, t) = w-(s, -t).
struct MembraneState {
    GridSpec grid;
    ScalarField w_plus, w_minus_r, d;
    ScalarField b11, b12, b22;
    double g_sup = 0.0;
    double eig_min = 0.0, eig_max = 0.0;
    /// Per trace column: capillary targets and source abscissa of the plus trace.
    std::vector<double> target_plus, target_minus, src_x;
    bool has_targets = false;
    double c_lambda = 1.0;
    long flagged = 0;
};

/// d, B (8-point Gauss-Legendre in tau) and the eigenvalue range from the two fields.
MembraneState make_membrane_state(const GridSpec& upper, const ScalarField& w_plus, const ScalarField& w_minus_r);

struct MembraneOptions {
    ChartOptions chart;
    /// (s_lo, s_hi, t_max) window; derived from the chart images when empty.
    std::optional<std::array<double, 3>> window;
};

MembraneState build_membrane(const TwoPhaseSolution& sol, const WeierstrassPair& w, const MembraneOptions& opt = {});

struct MembraneCheckOptions {
    double tol = 1e-6;
    /// Coincidence threshold on the trace; < 0 selects 4h c_lambda.
    double contact_tol = -1.0;
};

/// Minimal surface equation per half, Neumann values off coincidence,
/// inequality slack on coincidence, ordering; with `sol` (constant
/// coefficients only) also the trace identity against the graphs.
ResidualReport membrane_residuals(const MembraneState& st, const TwoPhaseSolution* sol = nullptr,
                                  const MembraneCheckOptions& opt = {});

struct ThinObstacleResult {
    ResidualReport report;
    /// Maximal open intervals of {d > tol} on the trace.
    std::vector<std::pair<double, double>> intervals;
    int count = 0;
};

/// div(B grad d) = 0, trace sign, free flux, flux sign, complementarity.
/// Throws InputError when B is not positive definite.
ThinObstacleResult thin_obstacle_reduction(const MembraneState& st, const MembraneCheckOptions& opt = {});

}  // namespace fbw
