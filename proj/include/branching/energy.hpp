#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "branching/constructions.hpp"
#include "branching/field.hpp"
#include "branching/wells.hpp"

namespace branching {

struct QuadratureSpec {
    int base_order = 8;            ///< Gauss points per axis per panel
    int max_refinement_depth = 12;
    double rel_tol = 1e-8;
    int line_points = 16;          ///< Gauss points per jump-curve panel

    /// Throws PreconditionError unless base_order >= 2 and rel_tol > 0.
    void validate() const;
};

struct Integral {
    double value = 0.0;
    double error = 0.0;
    bool limit_hit = false; ///< some panel stopped at max_refinement_depth
};

/// E = int dist^2(Du, K) + eps (|D^2u| on cell interiors + |[Du]| on jump curves).
struct EnergyBreakdown {
    double elastic = 0.0;
    double tv_bulk = 0.0;
    double tv_jump = 0.0;
    double epsilon = 0.0;
    double total = 0.0;
    double error_estimate = 0.0;
    bool refinement_limit_hit = false;
};

/// int dist^2(Du, K_j) over all cells; tensor Gauss on the graph parameterization of each
/// cell with panel-wise comparison of the p- and 2p-point rules.
Integral elastic_energy(const PiecewiseDeformation& def, const WellSpec& spec,
                        const QuadratureSpec& quad = {});
/// Same integral restricted to the listed cells.
Integral elastic_energy(const PiecewiseDeformation& def, std::span<const std::size_t> cells,
                        const WellSpec& spec, const QuadratureSpec& quad = {});
/// int |D^2u| (Frobenius) over cell interiors.
Integral tv_bulk(const PiecewiseDeformation& def, const QuadratureSpec& quad = {});
/// sum over jump curves of int |Du+ - Du-| ds.
Integral tv_jump(const PiecewiseDeformation& def, const QuadratureSpec& quad = {});

EnergyBreakdown total_energy(const PiecewiseDeformation& def, const WellSpec& spec,
                             double epsilon, const QuadratureSpec& quad = {});

struct BestConstruction {
    PiecewiseDeformation field;
    EnergyBreakdown energy;
    std::string label; ///< "identity", "horizontal" or "vertical"
};

/// Lowest-energy candidate among the identity, the horizontal assembly and (K1 only) the
/// vertical assembly. Candidates whose assembly exceeds options.max_cells are skipped.
BestConstruction best_construction(const WellSpec& spec, double epsilon, double length,
                                   double height, const QuadratureSpec& quad = {},
                                   const AssemblyOptions& options = {});

}  // namespace branching
