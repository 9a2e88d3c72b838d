#include "branching/wells.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "branching/errors.hpp"

namespace branching {

const char* to_string(WellCase c) { return c == WellCase::K1 ? "k1" : "k2"; }

WellSpec::WellSpec(WellCase c, double alpha) : case_(c), alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw PreconditionError("alpha must lie in [0, 1), got " + std::to_string(alpha));
    if (c == WellCase::K1) {
        a_ = {1.0, -alpha, 0.0, 1.0};
        b_ = {1.0, alpha, 0.0, 1.0};
    } else {
        a_ = Mat2::diag(1.0, 1.0 - alpha);
        b_ = Mat2::diag(1.0, 1.0 + alpha);
    }
}

WellMatrices well_matrices(const WellSpec& spec) { return {spec.a(), spec.b()}; }

OrbitDistance dist_to_rotated_well(const Mat2& f, const Mat2& g) {
    // max_Q tr(Q^T F G^T) is attained at (cos, sin) parallel to (M11+M22, M21-M12).
    const Mat2 m = f * g.transpose();
    const double p = m.a11 + m.a22;
    const double q = m.a21 - m.a12;
    const double r = std::hypot(p, q);

    OrbitDistance out;
    Mat2 rot = Mat2::identity();
    if (r <= 1e-14 * std::max(1.0, f.norm() * g.norm())) {
        out.degenerate = true;
    } else {
        rot = {p / r, -q / r, q / r, p / r};
        out.angle = std::atan2(q, p);
    }
    // Evaluate |F - QG| directly; the expanded |F|^2+|G|^2-2r form cancels badly near the orbit.
    out.distance = (f - rot * g).norm();
    return out;
}

WellDistanceResult dist_to_wells(const Mat2& f, const WellSpec& spec) {
    const OrbitDistance da = dist_to_rotated_well(f, spec.a());
    const OrbitDistance db = dist_to_rotated_well(f, spec.b());
    const double tie_tol = 1e-14 * (1.0 + std::max(da.distance, db.distance));
    if (da.distance <= db.distance + tie_tol)
        return {da.distance, WellTag::A, da.angle, da.degenerate};
    return {db.distance, WellTag::B, db.angle, db.degenerate};
}

WellEnergy well_energy(const Mat2& f, const WellSpec& spec) {
    const WellDistanceResult d = dist_to_wells(f, spec);
    const Mat2& g = d.nearest_well == WellTag::A ? spec.a() : spec.b();
    const Mat2 q = d.degenerate ? Mat2::identity() : Mat2::rotation(d.optimal_angle);
    const Mat2 diff = f - q * g;
    return {diff.norm_sq(), 2.0 * diff};
}

namespace {

double det_connection(const WellSpec& spec, double phi) {
    return (spec.a() - Mat2::rotation(phi) * spec.b()).det();
}

double bisect(const WellSpec& spec, double lo, double hi, double tol) {
    double flo = det_connection(spec, lo);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = det_connection(spec, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double golden_min_abs(const WellSpec& spec, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = std::abs(det_connection(spec, c));
    double fd = std::abs(det_connection(spec, d));
    while (hi - lo > tol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = std::abs(det_connection(spec, c));
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = std::abs(det_connection(spec, d));
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

RankOneConnections rank_one_connections(const WellSpec& spec, int grid_points, double tol) {
    if (!(spec.alpha() > 0.0)) throw PreconditionError("rank_one_connections requires alpha > 0");
    if (grid_points < 8) throw PreconditionError("grid_points must be at least 8");

    const double two_pi = 2.0 * std::numbers::pi;
    const double step = two_pi / grid_points;
    // Scale for "touches zero": det is O(1) in magnitude away from roots.
    const double zero_tol = 1e-10;

    std::vector<double> values(grid_points);
    for (int k = 0; k < grid_points; ++k) values[k] = det_connection(spec, k * step);

    std::vector<double> roots;
    for (int k = 0; k < grid_points; ++k) {
        const int next = (k + 1) % grid_points;
        const double fk = values[k];
        const double fn = values[next];
        const double lo = k * step;
        const double hi = lo + step;
        if (fk == 0.0) {
            roots.push_back(lo);
            continue;
        }
        if (fn != 0.0 && (fk < 0.0) != (fn < 0.0)) {
            roots.push_back(bisect(spec, lo, hi, tol));
            continue;
        }
        // Touching root: grid-local minimum of |det| between neighbours.
        const double fp = values[(k + grid_points - 1) % grid_points];
        if (std::abs(fk) <= std::abs(fp) && std::abs(fk) < std::abs(fn) &&
            (fp < 0.0) == (fk < 0.0) && (fn < 0.0) == (fk < 0.0)) {
            const double phi = golden_min_abs(spec, lo - step, hi, tol);
            if (std::abs(det_connection(spec, phi)) < zero_tol) roots.push_back(phi);
        }
    }
    for (double& r : roots) {
        r = std::fmod(r, two_pi);
        if (r < 0.0) r += two_pi;
        if (two_pi - r < 1e-9) r = 0.0;
    }
    std::sort(roots.begin(), roots.end());
    // Merge duplicates produced by neighbouring brackets (including wrap-around at 0).
    std::vector<double> merged;
    for (double r : roots)
        if (merged.empty() || r - merged.back() > 10 * step) merged.push_back(r);
    if (merged.size() > 1 && merged.front() + two_pi - merged.back() <= 10 * step)
        merged.pop_back();

    return {merged, spec.well_case() == WellCase::K1 ? 2u : 1u};
}

double interface_degeneracy_gap(const WellSpec& spec, const Vec2& v) {
    return (spec.a() * v).norm() - (spec.b() * v).norm();
}

Mat2 conjugation_rotation(double alpha) {
    const double s = 1.0 / std::sqrt(1.0 + alpha * alpha);
    return Mat2{1.0, -alpha, alpha, 1.0} * s;
}

}  // namespace branching
