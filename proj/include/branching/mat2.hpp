#pragma once

#include <array>
#include <cmath>
#include <ostream>

namespace branching {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
    constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// 2x2 real matrix, row-major: [[a11, a12], [a21, a22]].
struct Mat2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a21 = 0.0;
    double a22 = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }
    static Mat2 rotation(double phi) {
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        return {c, -s, s, c};
    }
    /// Coordinate swap [[0,1],[1,0]].
    static constexpr Mat2 swap() { return {0.0, 1.0, 1.0, 0.0}; }

    constexpr Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    constexpr Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    constexpr Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    constexpr Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    constexpr Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    constexpr bool operator==(const Mat2&) const = default;

    constexpr Mat2 transpose() const { return {a11, a21, a12, a22}; }
    constexpr double det() const { return a11 * a22 - a12 * a21; }
    constexpr double trace() const { return a11 + a22; }
    /// Entries are infinite or NaN when det() == 0.
    constexpr Mat2 inverse() const {
        const double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    constexpr double norm_sq() const { return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22; }
    double norm() const { return std::sqrt(norm_sq()); }
    bool finite() const {
        return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) &&
               std::isfinite(a22);
    }
};

constexpr Mat2 operator*(double s, const Mat2& m) { return m * s; }

inline std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << "[[" << m.a11 << ", " << m.a12 << "], [" << m.a21 << ", " << m.a22 << "]]";
}

inline std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << "(" << v.x << ", " << v.y << ")";
}

/// Second gradient D^2u: entry [k][i][j] = d^2 u_k / dx_i dx_j.
struct Tensor3 {
    std::array<std::array<std::array<double, 2>, 2>, 2> t{};

    double norm() const {
        double s = 0.0;
        for (const auto& a : t)
            for (const auto& b : a)
                for (double c : b) s += c * c;
        return std::sqrt(s);
    }
};

}  // namespace branching
