#pragma once

#include "branching/jet.hpp"

namespace branching {

/// Z_h(t) = h Z(t/h) with Z(t) = dist(t + 1/4, Z) - 1/4: h-periodic, slope +-1, Z_h(0) = 0,
/// range [-h/4, h/4]. Throws PreconditionError if h <= 0.
double sawtooth(double h, double t);
/// Slope of Z_h at t (+1 on (-h/4, h/4) mod h, -1 elsewhere; kinks take the left slope).
double sawtooth_slope(double h, double t);

struct GammaValues {
    double g = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

/// gamma(t) = 10t^3 - 15t^4 + 6t^5 with its first three derivatives. gamma and its first two
/// derivatives vanish at 0 and match (1, 0, 0) at 1.
GammaValues quintic_gamma(double t);

/// Interface profile used by the cell boundaries.
enum class Profile { Quintic, Linear };

/// profile(s) as a jet in the argument jet s.
Jet profile_jet(Profile p, const Jet& s);
/// profile'(s) as a jet.
Jet profile_derivative_jet(Profile p, const Jet& s);
GammaValues profile_values(Profile p, double s);

}  // namespace branching
