#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "branching/mat2.hpp"
#include "branching/profiles.hpp"
#include "branching/wells.hpp"

namespace branching {

struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double width = 1.0;
    double height = 1.0;

    /// Throws PreconditionError unless width and height are positive.
    Rect(double x0_, double y0_, double w, double h);
    Rect() = default;

    double area() const { return width * height; }
    double x1() const { return x0 + width; }
    double y1() const { return y0 + height; }
    bool contains(const Vec2& p, double tol = 0.0) const {
        return p.x >= x0 - tol && p.x <= x1() + tol && p.y >= y0 - tol && p.y <= y1() + tol;
    }
};

/// Local curve y = c0 + c1 * profile(X / length), X in [0, length].
struct Curve {
    double c0 = 0.0;
    double c1 = 0.0;
    Profile profile = Profile::Quintic;

    double value(double x_local, double length) const;
    double slope(double x_local, double length) const;
};

enum class MapFamily { Identity, SawtoothShear, K2Cell, K2Boundary, K1Cell, K1Boundary };

const char* to_string(MapFamily f);

/// Closed-form map of one cell piece, in coordinates local to the cell origin.
struct CellMap {
    MapFamily family = MapFamily::Identity;
    int piece = 0;      ///< 1..5 for the cell families
    double ell = 1.0;   ///< cell width
    double h = 1.0;     ///< cell height (sawtooth period for SawtoothShear)
    double alpha = 0.0;
    Profile profile = Profile::Quintic;
    /// SawtoothShear only: K2 shears the second component (y + alpha Z_h(y)),
    /// K1 the first (x + alpha Z_h(y)).
    WellCase axis = WellCase::K2;
};

/// Planar isometry p -> lin * p + shift.
struct Isometry {
    Mat2 lin = Mat2::identity();
    Vec2 shift{};

    Vec2 apply(const Vec2& p) const { return lin * p + shift; }
    Vec2 apply_inverse(const Vec2& p) const { return lin.transpose() * (p - shift); }
    /// (this o other)(p) = this(other(p)).
    Isometry compose(const Isometry& other) const {
        return {lin * other.lin, lin * other.shift + shift};
    }
};

/// Graph-bounded subdomain {x0 < x < x0 + width, y0 + lower(X) < y < y0 + upper(X)}
/// (pre-transform coordinates) carrying a closed-form map. The field on the cell is
/// v(p) = frame(origin + m(frame^{-1}(p) - origin)).
struct AnalyticCell {
    Vec2 origin{};
    double width = 1.0;
    Curve lower;
    Curve upper;
    CellMap map;
    Isometry frame;

    double area() const;
};

/// A curve across which only Du may jump.
struct JumpCurve {
    enum class Kind {
        Graph,         ///< upper curve of minus_cell, shared with plus_cell above it
        VerticalSeam,  ///< pre-transform segment x = fixed, y in [from, to]
        HorizontalSeam ///< pre-transform segment y = fixed, x in [from, to]
    };
    Kind kind = Kind::Graph;
    std::size_t minus_cell = 0; ///< below (Graph, HorizontalSeam) or left (VerticalSeam)
    std::size_t plus_cell = 0;  ///< above or right
    double fixed = 0.0;
    double from = 0.0;
    double to = 0.0;
    Isometry frame;

    /// Pre-transform point at parameter t in [0, 1].
    Vec2 local_point(const std::vector<AnalyticCell>& cells, double t) const;
};

enum class TransformTag { MirrorX, Rotate90, PointReflect };

struct Evaluation {
    Vec2 value;
    Mat2 gradient;
};

struct CoverageReport {
    double area_residual = 0.0;       ///< |sum of cell areas - domain area| / domain area
    double continuity_residual = 0.0; ///< max value mismatch across jump curves and seams
    double boundary_residual = 0.0;   ///< max |u(x) - x| on sampled boundary points
    std::size_t cells = 0;
    std::size_t jumps = 0;
    bool ok(double area_tol = 1e-9, double value_tol = 1e-10) const {
        return area_residual <= area_tol && continuity_residual <= value_tol &&
               boundary_residual <= value_tol;
    }
};

/// Deformation as analytic cells plus gradient-jump curves. Immutable once built;
/// transforms compose into every cell frame and are recorded in transform_stack().
class PiecewiseDeformation {
public:
    PiecewiseDeformation(Rect domain, std::vector<AnalyticCell> cells,
                         std::vector<JumpCurve> jumps);

    /// u(x) = x on the whole rectangle.
    static PiecewiseDeformation identity(const Rect& domain);
    /// Cells of `a` followed by cells of `b` on the bounding rectangle of both domains.
    static PiecewiseDeformation merge(const PiecewiseDeformation& a,
                                      const PiecewiseDeformation& b);

    const Rect& domain() const { return domain_; }
    const std::vector<AnalyticCell>& cells() const { return cells_; }
    const std::vector<JumpCurve>& jumps() const { return jumps_; }
    const std::vector<TransformTag>& transform_stack() const { return transforms_; }

    /// Containing cell; boundary points resolve to the cell below, then to the left.
    /// Throws DomainError outside the domain.
    std::size_t locate(const Vec2& p) const;
    /// Cell containing p + delta * dir for a small delta (one-sided limits).
    std::size_t locate_side(const Vec2& p, const Vec2& dir) const;

    Evaluation evaluate(const Vec2& p) const;
    Evaluation evaluate_in(std::size_t cell, const Vec2& p) const;
    /// Throws BoundaryError unless p lies strictly inside a cell.
    Tensor3 second_gradient(const Vec2& p) const;
    Tensor3 second_gradient_in(std::size_t cell, const Vec2& p) const;
    /// Du(plus side) - Du(minus side) at parameter t in [0, 1].
    Mat2 gradient_jump(const JumpCurve& curve, double t) const;
    /// Value mismatch across the curve at parameter t.
    double value_mismatch(const JumpCurve& curve, double t) const;
    /// Global point and arclength density at parameter t.
    Vec2 jump_point(const JumpCurve& curve, double t) const;
    double jump_speed(const JumpCurve& curve, double t) const;

    /// Plain-text manifest, one line per cell then one per jump curve. Debug format.
    std::string manifest() const;

private:
    friend PiecewiseDeformation apply_transform(const PiecewiseDeformation&, const Isometry&,
                                                TransformTag, const Rect&);
    void build_index();
    bool contains(std::size_t cell, const Vec2& p, double tol) const;
    double size_scale() const;

    Rect domain_;
    std::vector<AnalyticCell> cells_;
    std::vector<JumpCurve> jumps_;
    std::vector<TransformTag> transforms_;

    // uniform bucket grid over the domain, CSR layout
    int nbx_ = 1;
    int nby_ = 1;
    std::vector<std::size_t> bucket_start_;
    std::vector<std::size_t> bucket_cells_;
};

/// u'(x,y) = (2a - u1(2a - x, y), u2(2a - x, y)) on the rectangle mirrored about x = a.
PiecewiseDeformation mirror_x(const PiecewiseDeformation& def, double axis_x);
/// v(x,y) = Z u(Z(x,y)), Z the coordinate swap. Width and height exchange.
PiecewiseDeformation rotate_90(const PiecewiseDeformation& def);
/// v(p) = 2c - u(2c - p): point reflection about c.
PiecewiseDeformation point_reflect(const PiecewiseDeformation& def, const Vec2& center);

/// Tiling, continuity across jump curves (`samples_per_curve` each) and boundary trace
/// (`boundary_samples` points on the domain boundary).
CoverageReport coverage_check(const PiecewiseDeformation& def, int samples_per_curve = 64,
                              int boundary_samples = 256);

/// Cell-local map evaluation: local value (relative to origin) as jets.
struct LocalJets {
    Jet u1;
    Jet u2;
};
LocalJets evaluate_map(const CellMap& m, double x_local, double y_local);

}  // namespace branching
