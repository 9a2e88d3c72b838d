#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "branching/field.hpp"
#include "branching/wells.hpp"

namespace branching {

/// min over branches of the sum of each branch's addends.
struct BoundValue {
    double value = 0.0;
    int branch = 1;                               ///< 1-based index of the minimizing branch
    std::vector<std::vector<double>> branch_terms; ///< addends of every branch
};

/// K1 scaling: min{a^{4/3}e^{2/3}L^{1/3}H + aeL, a^{4/3}e^{2/3}LH^{1/3} + a^4LH + aeH, a^2LH}.
BoundValue f_bound(double alpha, double epsilon, double length, double height);
/// K2 scaling: min{a^{6/5}e^{4/5}L^{1/5}H + aeL, a^2LH}.
BoundValue g_bound(double alpha, double epsilon, double length, double height);
/// f for K1, g for K2.
BoundValue scaling_bound(WellCase c, double alpha, double epsilon, double length, double height);

enum class Regime { A, BR, HL, VB1, VB2, VL };
const char* to_string(Regime r);

/// Winning branch, then the largest addend inside it. Ties resolve in listed order.
Regime classify_regime(WellCase c, double alpha, double epsilon, double length, double height);

/// min{a e (L + H), a^2 L H}.
double thin_domain_bound(WellCase c, double alpha, double epsilon, double length,
                         double height);

struct PhasePoint {
    double log10_l_over_eps = 0.0;
    double log10_h_over_eps = 0.0;
    Regime regime = Regime::A;
    double bound_value = 0.0;
};

/// Regime grid with eps = 1: nx points on [l_min, l_max] (log10 L/eps), ny on [h_min, h_max].
struct PhaseGrid {
    WellCase well_case = WellCase::K2;
    double alpha = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<PhasePoint> points; ///< row-major, index j * nx + i (j along H)

    const PhasePoint& at(int i, int j) const { return points[static_cast<std::size_t>(j) * nx + i]; }
    /// Distinct regimes present, in enum order.
    std::vector<Regime> regimes() const;
    /// Number of 4-connected components of the given regime.
    int components(Regime r) const;
};

PhaseGrid phase_diagram(WellCase c, double alpha, double l_min, double l_max, int nx,
                        double h_min, double h_max, int ny);

/// Cell integrals of a density over a uniform nx x ny grid on (0, L) x (0, H).
struct DensityGrid {
    int nx = 0;
    int ny = 0;
    double length = 0.0;
    double height = 0.0;
    std::vector<double> mass; ///< row-major, j * nx + i

    DensityGrid() = default;
    DensityGrid(int nx_, int ny_, double length_, double height_);
    double& at(int i, int j) { return mass[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j) const { return mass[static_cast<std::size_t>(j) * nx + i]; }
    double total() const;
    /// Integral over [x0, x1] x [y0, y1], assuming a constant density inside each grid cell.
    double integrate(double x0, double x1, double y0, double y1) const;
};

/// Elastic, total-variation (bulk plus jump) and |d_1 u_2| masses sampled from a field.
struct FieldDensities {
    DensityGrid elastic;
    DensityGrid tv;
    DensityGrid d1u2;
};
FieldDensities sample_densities(const PiecewiseDeformation& def, const WellSpec& spec, int nx,
                                int ny, int points_per_axis = 4);

/// Horizontal stripe S = (0,L) x (s, s+lambda) and vertical stripe S' = (s', s'+lambda) x (0,H).
struct StripePair {
    bool found = false;
    int k = 0; ///< S index, s = k lambda
    int i = 0; ///< S' index, s' = i lambda
    double s = 0.0;
    double s_prime = 0.0;
    double lambda = 0.0;
    double energy_s = 0.0;
    double energy_s_prime = 0.0;
    double energy_q = 0.0; ///< on S n S'
    double d1u2_q = 0.0;
    double energy_total = 0.0;
    double d1u2_total = 0.0;
    double constant = 20.0;
};

/// First stripe pair (k, then i) of the lambda-lattice with E[S] <= c lambda/H E,
/// E[S'] <= c lambda/L E, E[Q] <= c lambda^2/(LH) E and the same for |d_1 u_2|, c = 20.
/// Throws PreconditionError unless lambda is in (0, min{L, H}] and the grids agree.
StripePair localize_stripes(const DensityGrid& elastic, const DensityGrid& tv,
                            const DensityGrid& d1u2, double epsilon, double lambda);

struct AveragingReport {
    double l1_parallel = 0.0;      ///< ||v.e - 1||_1
    double bound_parallel = 0.0;   ///< 2 |w|^{1/2} ||d||_2
    double l1_perp = 0.0;          ///< ||v.e_perp||_1
    double bound_perp = 0.0;       ///< 3 |w|^{3/4} ||d||_2^{1/2} + |w|^{1/2} ||d||_2
    double margin_parallel() const { return bound_parallel - l1_parallel; }
    double margin_perp() const { return bound_perp - l1_perp; }
    bool holds(double tol = 1e-12) const {
        return margin_parallel() >= -tol && margin_perp() >= -tol;
    }
};

/// Equal-weight samples of a region of measure `area`. Throws HypothesisError if the mean
/// of v.e - 1 exceeds 1e-9 in magnitude or |v| > 1 + d (beyond 1e-12) at some sample.
AveragingReport check_averaging_inequality(const std::vector<Vec2>& v, const std::vector<double>& d,
                                       const Vec2& e, double area);

struct AveragingSample {
    std::vector<Vec2> v;
    std::vector<double> d;
    Vec2 e;
};
/// Random samples satisfying the hypotheses; candidates failing them are redrawn.
AveragingSample random_averaging_sample(std::mt19937_64& rng, int n);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; ///< root-mean-square residual in log space
};
/// Least-squares line through (log x, log y). Throws PreconditionError for fewer than two
/// points or nonpositive data.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace branching
