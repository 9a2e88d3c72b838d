#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "branching/field.hpp"
#include "branching/wells.hpp"

namespace branching {

/// Regular nx x ny grid on a rectangle; each grid cell is split along its lower-left to
/// upper-right diagonal into two positively oriented triangles.
class Mesh {
public:
    /// Throws MeshError unless nx, ny >= 2.
    Mesh(const Rect& domain, int nx, int ny);

    const Rect& domain() const { return domain_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double dx() const { return domain_.width / nx_; }
    double dy() const { return domain_.height / ny_; }
    std::size_t node_count() const { return static_cast<std::size_t>(nx_ + 1) * (ny_ + 1); }
    std::size_t node(int i, int j) const { return static_cast<std::size_t>(j) * (nx_ + 1) + i; }
    Vec2 position(std::size_t n) const;
    bool on_boundary(std::size_t n) const;
    std::size_t free_node_count() const { return static_cast<std::size_t>(nx_ - 1) * (ny_ - 1); }

    struct Triangle {
        std::size_t v[3];
        double area;
        Mat2 inverse_edges; ///< [x1 - x0, x2 - x0]^{-1}
    };
    struct Edge {
        std::size_t minus; ///< triangle indices sharing the edge
        std::size_t plus;
        double length;
    };
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<Edge>& interior_edges() const { return edges_; }

private:
    Rect domain_;
    int nx_;
    int ny_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
};

/// Nodal deformed positions, two values per node. Boundary nodes hold their coordinates.
struct DiscreteField {
    const Mesh* mesh = nullptr;
    std::vector<double> values;

    static DiscreteField identity(const Mesh& mesh);
    Vec2 at(std::size_t n) const { return {values[2 * n], values[2 * n + 1]}; }
    /// Constant gradient on triangle t.
    Mat2 gradient(std::size_t t) const;
    /// Largest |u(x) - x| over boundary nodes.
    double boundary_residual() const;
};

struct DiscreteEnergy {
    double elastic = 0.0;
    double tv = 0.0;       ///< Huber-smoothed jump total variation over interior edges
    double tv_exact = 0.0; ///< unsmoothed sum of len(e) |Du+ - Du-|
    double epsilon = 0.0;
    double total = 0.0;    ///< elastic + epsilon * tv
    double total_exact() const { return elastic + epsilon * tv_exact; }
};

/// Huber smoothing r^2 / (2 delta) below delta, r - delta/2 above.
double huber(double r, double delta);

/// Throws MeshError if a triangle is degenerate.
DiscreteEnergy discrete_energy(const DiscreteField& field, const WellSpec& spec, double epsilon,
                               double delta_huber);
/// Gradient of discrete_energy(...).total with respect to all nodal values; boundary entries
/// are zero.
std::vector<double> discrete_gradient(const DiscreteField& field, const WellSpec& spec,
                                      double epsilon, double delta_huber);

struct MinimizeOptions {
    int max_iter = 5000;
    double tol_factor = 1e-8; ///< stop when |grad| <= tol_factor * sqrt(free node count)
    int history = 10;
    double delta_huber = -1.0; ///< negative: 1e-6 * alpha
    double armijo = 1e-4;
    int max_backtracks = 60;
};

struct MinimizeResult {
    DiscreteField field;
    std::vector<double> energy_trace;
    DiscreteEnergy final_energy;
    int iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
    double gradient_norm = 0.0;
};

/// L-BFGS with Armijo backtracking over the interior nodes. Throws PreconditionError unless
/// the boundary nodes of `initial` hold their coordinates.
MinimizeResult minimize(const DiscreteField& initial, const WellSpec& spec, double epsilon,
                        const MinimizeOptions& options = {});

struct Seed {
    DiscreteField field;
    double finest_period = 0.0; ///< smallest cell height h of the construction (0 if none)
    bool under_resolved = false; ///< finest period spans fewer than 2 mesh cells
};

/// Samples def at the mesh nodes; boundary nodes are snapped to the identity.
Seed seed_from_construction(const PiecewiseDeformation& def, const Mesh& mesh);

struct MultiStartResult {
    std::vector<std::string> labels;
    std::vector<MinimizeResult> runs;
    std::size_t best = 0;
    const MinimizeResult& best_run() const { return runs[best]; }
};

/// Runs minimize from every (label, start) pair; best = lowest final total.
MultiStartResult multi_start(const std::vector<std::pair<std::string, DiscreteField>>& starts,
                             const WellSpec& spec, double epsilon,
                             const MinimizeOptions& options = {});

/// CSV with header x,y,u1,u2 and 17 significant digits.
void write_field_csv(const DiscreteField& field, std::ostream& os);

}  // namespace branching
