#pragma once

#include <utility>

#include "fbw/bernoulli.hpp"
#include "fbw/grid.hpp"
#include "fbw/report.hpp"

namespace fbw {

struct WeierstrassOptions {
    /// Sample g and v from the solution's closed form instead of the grid.
    bool analytic = false;
    double flatness_threshold = 0.1;
    /// < 0 selects 4h.
    double contact_tol = -1.0;
    double period_tol = 1e-6;
    double tol = 1e-6;
};

/// Data of one phase: constant f, Gauss map g = v_x - i v_y, and v.
struct WeierstrassData {
    int phase = 1;
    double f = 1.0;
    /// v = u / sqrt(other), other = the opposite phase's reference constant.
    double other = 1.0;
    ComplexField g;
    ScalarField v;
    bool hypothesis_ok = true;
    double flatness = 0.0;
};

std::pair<WeierstrassData, WeierstrassData> build_data(const TwoPhaseSolution& sol,
                                                       const WeierstrassOptions& opt = {});

struct Normals {
    ScalarField x, y, z;
};

/// Downward Gauss map: nu = (-2 Re g, -2 Im g, 1 - |g|^2) / (1 + |g|^2).
Normals normal_field(const WeierstrassData& d);

struct WeierstrassSurface {
    int phase = 1;
    ScalarField psi1, psi2;
    /// Third coordinate in closed form f v and by integration of f dv.
    ScalarField x3, x3_integrated;
    /// The same potentials from the real forms alpha_1, alpha_2.
    ScalarField psi1_forms, psi2_forms;
    Normals nu;
    std::pair<int, int> base{0, 0};
    double path_residual = 0.0;
    double x3_discrepancy = 0.0;
    double route_discrepancy = 0.0;
};

/// Path integration of the Weierstrass-Enneper forms from `base`, where
/// psi1 = psi2 = 0 and x3 = f v. Throws InputError on a period above
/// tolerance.
WeierstrassSurface integrate_surface(const WeierstrassData& d, std::pair<int, int> base,
                                     const WeierstrassOptions& opt = {});

/// Shared base point: a sample on both graphs (a contact point) nearest the
/// origin, else the default base of the plus phase.
std::pair<int, int> common_base(const TwoPhaseSolution& sol);

struct WeierstrassPair {
    WeierstrassData plus_data, minus_data;
    WeierstrassSurface plus, minus;
};

WeierstrassPair build_weierstrass(const TwoPhaseSolution& sol, const WeierstrassOptions& opt = {});

/// Cotangent mean curvature (both diagonal triangulations averaged,
/// barycentric areas) on interior vertices of the mesh indexed by the grid.
ScalarField mean_curvature(const WeierstrassSurface& s, const Mask& mask);

/// Surface value (psi1, psi2, x3) at the graph point over abscissa i, by
/// quadratic extrapolation from three layers inside the phase.
bool surface_trace(const TwoPhaseSolution& sol, const WeierstrassSurface& s, std::size_t i, double out[3]);

/// Mean curvature (on vertices at least two layers inside the mesh), boundary
/// angle on one-phase arcs, contact sign and
/// transmission.
ResidualReport verify_capillary(const TwoPhaseSolution& sol, const WeierstrassPair& w,
                                const WeierstrassOptions& opt = {});

/// Psi+ = Psi- on contact and the boundary speed c conj(tau) on one-phase arcs.
ResidualReport verify_boundary_transform(const TwoPhaseSolution& sol, const WeierstrassPair& w,
                                         const WeierstrassOptions& opt = {});

/// Conformality defects | |Psi_x| - |Psi_y| | + |Psi_x . Psi_y| at samples two
/// or more layers inside the mask.
ScalarField conformality_defect(const WeierstrassSurface& s);

}  // namespace fbw
