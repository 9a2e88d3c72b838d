#pragma once

#include <optional>
#include <string>
#include <vector>

#include "branching/field.hpp"
#include "branching/wells.hpp"

namespace branching {

/// Laminate w_h on a rectangle: K2 gives (x, y + alpha Z_h(y - y0)), K1 gives
/// (x + alpha Z_h(y - y0), y). Du lies in {A, B} a.e.; one cell per half period.
PiecewiseDeformation laminate(WellCase c, const Rect& rect, double h, double alpha);

/// Period-doubling cell on (x0, x0+l) x (y0, y0+h) for K2: identity on the horizontal
/// edges, sawtooth Z_{h/2} trace on the left, Z_h on the right. Five pieces separated
/// by quintic interfaces. Requires 0 < h <= l and alpha in (0, 1).
PiecewiseDeformation k2_cell(Vec2 origin, double ell, double h, double alpha);

/// Boundary-layer cell for K2: identity on the horizontal edges and on the left edge,
/// Z_h trace on the right. Requires 0 < h <= l.
PiecewiseDeformation k2_boundary_cell(Vec2 origin, double ell, double h, double alpha);

/// K1 counterparts; the shear acts on the first component. `profile` may be Linear.
PiecewiseDeformation k1_cell(Vec2 origin, double ell, double h, double alpha,
                             Profile profile = Profile::Quintic);
PiecewiseDeformation k1_boundary_cell(Vec2 origin, double ell, double h, double alpha,
                                      Profile profile = Profile::Quintic);

/// Stripe layout of a global assembly on (0, L/2) x (0, H): stripe i spans (x_{i+1}, x_i)
/// with period h_i and width ell_i; the boundary layer fills (0, x_tau).
struct BranchingSchedule {
    WellCase well_case = WellCase::K2;
    double theta = 0.0;
    long long n = 0;              ///< oscillations in the central stripe
    int tau = 0;                  ///< last refinement index; -1 when degenerate
    std::vector<double> x;        ///< x_i = (L/2) theta^i
    std::vector<double> h;        ///< h_i = H / (2^i N)
    std::vector<double> ell;      ///< ell_i = theta^i (1 - theta) L / 2
    bool degenerate = false;      ///< h_0 > ell_0: boundary-layer-only assembly
    double length = 0.0;          ///< L
    double height = 0.0;          ///< H

    /// Index of the last refinement stripe that is actually assembled (max(tau, 0)).
    int last() const { return tau < 0 ? 0 : tau; }
    /// Number of cells in the left half: sum_{i<tau} N 2^i + N 2^tau.
    long long cells_per_half() const;
};

/// Default geometric factor: 2^{-5/4} for K2, 1/3 for K1.
double default_theta(WellCase c);

/// N = ceil(alpha^{1/5} H / (eps^{1/5} L^{4/5}) + 4H/L) for K2,
/// N = ceil(alpha^{1/3} H / (eps^{1/3} L^{2/3}) + 4H/L) for K1.
long long oscillation_count(WellCase c, double alpha, double epsilon, double length,
                            double height);

BranchingSchedule branching_schedule(WellCase c, double alpha, double epsilon, double length,
                                     double height, std::optional<double> theta = std::nullopt);

struct AssemblyOptions {
    std::optional<double> theta;
    Profile k1_profile = Profile::Quintic;
    /// Refuse assemblies with more cells than this (each cell has five pieces).
    long long max_cells = 2'000'000;
};

/// Global branched field on (0, L) x (0, H): refinement stripes and boundary layer on the
/// left half, reflected copy on the right half (mirror for K2, point reflection for K1).
/// Seams between cells carry explicit jump curves.
PiecewiseDeformation assemble_branched(const WellSpec& spec, const BranchingSchedule& schedule,
                                       const AssemblyOptions& options = {});

/// Schedule + assembly with horizontal stripes.
PiecewiseDeformation horizontal_branched(const WellSpec& spec, double epsilon, double length,
                                         double height, const AssemblyOptions& options = {});

/// K1 only: horizontal assembly on the swapped domain (0, H) x (0, L), conjugated by the
/// coordinate swap so that stripes run along e_2.
PiecewiseDeformation vertical_branched_k1(const WellSpec& spec, double epsilon, double length,
                                          double height, const AssemblyOptions& options = {});

}  // namespace branching
