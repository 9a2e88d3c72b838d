#pragma once

#include <ostream>

#include "branching/bounds.hpp"
#include "branching/field.hpp"
#include "branching/wells.hpp"

namespace branching::cli {

/// Domain colored by nearest well, shaded by the optimal rotation angle, with jump curves.
void write_construction_svg(const PiecewiseDeformation& def, const WellSpec& spec,
                            std::ostream& os, int long_side_pixels = 240);

/// Regime map over the (log10 L/eps, log10 H/eps) plane.
void write_phase_svg(const PhaseGrid& grid, std::ostream& os);

}  // namespace branching::cli
