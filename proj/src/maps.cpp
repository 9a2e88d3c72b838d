#include <cmath>

#include "branching/field.hpp"

namespace branching {

const char* to_string(MapFamily f) {
    switch (f) {
    case MapFamily::Identity: return "identity";
    case MapFamily::SawtoothShear: return "sawtooth";
    case MapFamily::K2Cell: return "k2_cell";
    case MapFamily::K2Boundary: return "k2_boundary";
    case MapFamily::K1Cell: return "k1_cell";
    case MapFamily::K1Boundary: return "k1_boundary";
    }
    return "?";
}

namespace {

// Period-doubling cell, one rank-one connection: the second component follows the
// sawtooth, the first corrects with rotations so that the off-diagonal strain cancels.
LocalJets k2_cell(const CellMap& m, const Jet& x, const Jet& y) {
    const double a = m.alpha;
    const double h = m.h;
    const double l = m.ell;
    const Jet s = (1.0 / l) * x;
    const Jet g = profile_jet(m.profile, s);
    const Jet g1 = profile_derivative_jet(m.profile, s);
    const double c = a * (1.0 - a) * h / (4.0 * l);
    switch (m.piece) {
    case 1: return {x, (1.0 + a) * y};
    case 2:
        return {x + c * g1 * (h / 8.0 + (h / 8.0) * g - y),
                (1.0 - a) * y + a * h * (0.25 + 0.25 * g)};
    case 3: return {x - (a * (1.0 - a) * h * h / (16.0 * l)) * g1, (1.0 + a) * y - a * h / 2.0};
    case 4:
        return {x - c * g1 * (7.0 * h / 8.0 - (h / 8.0) * g - y),
                (1.0 - a) * y + a * h * (0.75 - 0.25 * g)};
    default: return {x, (1.0 + a) * y - a * h};
    }
}

LocalJets k2_boundary(const CellMap& m, const Jet& x, const Jet& y) {
    const double a = m.alpha;
    const double h = m.h;
    const Jet g = profile_jet(m.profile, (1.0 / m.ell) * x);
    switch (m.piece) {
    case 1: return {x, y + a * y};
    case 2: return {x, y + (0.25 * a * h) * g};
    case 3: return {x, y + a * (h / 2.0 - y)};
    case 4: return {x, y - (0.25 * a * h) * g};
    default: return {x, y + a * (y - h)};
    }
}

LocalJets k1_cell(const CellMap& m, const Jet& x, const Jet& y) {
    const double a = m.alpha;
    const double h = m.h;
    const Jet g = profile_jet(m.profile, (1.0 / m.ell) * x);
    switch (m.piece) {
    case 1: return {x + a * y, y};
    case 2: return {x - a * y + a * h / 4.0 + (a * h / 4.0) * g, y};
    case 3: return {x + a * y - a * h / 2.0, y};
    case 4: return {x - a * y + 3.0 * a * h / 4.0 - (a * h / 4.0) * g, y};
    default: return {x + a * y - a * h, y};
    }
}

LocalJets k1_boundary(const CellMap& m, const Jet& x, const Jet& y) {
    const double a = m.alpha;
    const double h = m.h;
    const Jet g = profile_jet(m.profile, (1.0 / m.ell) * x);
    switch (m.piece) {
    case 1: return {x + a * y, y};
    case 2: return {x + (0.25 * a * h) * g, y};
    case 3: return {x + a * (h / 2.0 - y), y};
    case 4: return {x - (0.25 * a * h) * g, y};
    default: return {x + a * (y - h), y};
    }
}

}  // namespace

LocalJets evaluate_map(const CellMap& m, double x_local, double y_local) {
    const Jet x = Jet::var_x(x_local);
    const Jet y = Jet::var_y(y_local);
    switch (m.family) {
    case MapFamily::Identity: return {x, y};
    case MapFamily::SawtoothShear: {
        // piece 1/2 pins the slope to +1/-1 so boundary points take the cell's one-sided limit
        const double slope = m.piece == 1   ? 1.0
                             : m.piece == 2 ? -1.0
                                            : sawtooth_slope(m.h, y_local);
        const Jet z = compose(y, sawtooth(m.h, y_local), slope, 0.0);
        if (m.axis == WellCase::K1) return {x + m.alpha * z, y};
        return {x, y + m.alpha * z};
    }
    case MapFamily::K2Cell: return k2_cell(m, x, y);
    case MapFamily::K2Boundary: return k2_boundary(m, x, y);
    case MapFamily::K1Cell: return k1_cell(m, x, y);
    case MapFamily::K1Boundary: return k1_boundary(m, x, y);
    }
    return {x, y};
}

}  // namespace branching
