#include "branching/profiles.hpp"

#include <cmath>

#include "branching/errors.hpp"

namespace branching {

double sawtooth(double h, double t) {
    if (!(h > 0.0)) throw PreconditionError("sawtooth period must be positive");
    const double x = t / h + 0.25;
    return h * (std::abs(x - std::round(x)) - 0.25);
}

double sawtooth_slope(double h, double t) {
    if (!(h > 0.0)) throw PreconditionError("sawtooth period must be positive");
    const double x = t / h + 0.25;
    const double frac = x - std::floor(x);
    return (frac > 0.0 && frac <= 0.5) ? 1.0 : -1.0;
}

GammaValues quintic_gamma(double t) {
    const double t2 = t * t;
    return {t2 * t * (10.0 + t * (-15.0 + 6.0 * t)),
            30.0 * t2 * (1.0 - t) * (1.0 - t),
            60.0 * t * (1.0 - t) * (1.0 - 2.0 * t),
            60.0 - 360.0 * t + 360.0 * t2};
}

GammaValues profile_values(Profile p, double s) {
    if (p == Profile::Linear) return {s, 1.0, 0.0, 0.0};
    return quintic_gamma(s);
}

Jet profile_jet(Profile p, const Jet& s) {
    const GammaValues g = profile_values(p, s.v);
    return compose(s, g.g, g.d1, g.d2);
}

Jet profile_derivative_jet(Profile p, const Jet& s) {
    const GammaValues g = profile_values(p, s.v);
    return compose(s, g.d1, g.d2, g.d3);
}

}  // namespace branching
