#pragma once

namespace branching {

/// Second-order forward-mode jet in two variables (x, y): value, gradient and Hessian.
/// Cell maps are written once over Jet so that Du and D^2u are exact.
struct Jet {
    double v = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dxx = 0.0;
    double dxy = 0.0;
    double dyy = 0.0;

    static constexpr Jet constant(double c) { return {c, 0, 0, 0, 0, 0}; }
    static constexpr Jet var_x(double x) { return {x, 1, 0, 0, 0, 0}; }
    static constexpr Jet var_y(double y) { return {y, 0, 1, 0, 0, 0}; }
};

constexpr Jet operator+(const Jet& a, const Jet& b) {
    return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}
constexpr Jet operator-(const Jet& a, const Jet& b) {
    return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}
constexpr Jet operator-(const Jet& a) { return {-a.v, -a.dx, -a.dy, -a.dxx, -a.dxy, -a.dyy}; }
constexpr Jet operator*(double s, const Jet& a) {
    return {s * a.v, s * a.dx, s * a.dy, s * a.dxx, s * a.dxy, s * a.dyy};
}
constexpr Jet operator*(const Jet& a, double s) { return s * a; }
constexpr Jet operator+(const Jet& a, double c) { return {a.v + c, a.dx, a.dy, a.dxx, a.dxy, a.dyy}; }
constexpr Jet operator+(double c, const Jet& a) { return a + c; }
constexpr Jet operator-(const Jet& a, double c) { return a + (-c); }
constexpr Jet operator-(double c, const Jet& a) { return (-a) + c; }
constexpr Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v,
            a.dx * b.v + a.v * b.dx,
            a.dy * b.v + a.v * b.dy,
            a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx,
            a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
            a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy};
}

/// Composition f(a) given f, f', f'' at a.v.
constexpr Jet compose(const Jet& a, double f, double f1, double f2) {
    return {f,
            f1 * a.dx,
            f1 * a.dy,
            f1 * a.dxx + f2 * a.dx * a.dx,
            f1 * a.dxy + f2 * a.dx * a.dy,
            f1 * a.dyy + f2 * a.dy * a.dy};
}

}  // namespace branching
