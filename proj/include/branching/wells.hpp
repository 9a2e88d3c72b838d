#pragma once

#include <vector>

#include "branching/mat2.hpp"

namespace branching {

enum class WellCase { K1, K2 };
enum class WellTag { A, B };

const char* to_string(WellCase c);

/// Two-well set SO(2)A u SO(2)B.
///
/// K1: A = [[1,-alpha],[0,1]], B = [[1,alpha],[0,1]] (equal determinant, two rank-one
/// connections). K2: A = diag(1,1-alpha), B = diag(1,1+alpha) (one degenerate connection).
class WellSpec {
public:
    /// Throws PreconditionError unless 0 <= alpha < 1. alpha = 0 is accepted as the
    /// degenerate single-well limit.
    WellSpec(WellCase c, double alpha);

    WellCase well_case() const { return case_; }
    double alpha() const { return alpha_; }
    const Mat2& a() const { return a_; }
    const Mat2& b() const { return b_; }

    /// Lower-bound statements for K2 assume alpha < 1/2.
    bool outside_k2_lower_bound_range() const { return case_ == WellCase::K2 && alpha_ >= 0.5; }

private:
    WellCase case_;
    double alpha_;
    Mat2 a_;
    Mat2 b_;
};

struct WellMatrices {
    Mat2 a;
    Mat2 b;
};

WellMatrices well_matrices(const WellSpec& spec);

struct OrbitDistance {
    double distance = 0.0;
    double angle = 0.0;      ///< angle of the minimizing rotation, in [-pi, pi]
    bool degenerate = false; ///< minimizing rotation not unique; angle reported as 0
};

/// min over Q in SO(2) of |F - Q G| (Frobenius), with the minimizing angle.
OrbitDistance dist_to_rotated_well(const Mat2& f, const Mat2& g);

struct WellDistanceResult {
    double distance = 0.0;
    WellTag nearest_well = WellTag::A;
    double optimal_angle = 0.0;
    bool degenerate = false;
};

/// Distance to SO(2)A u SO(2)B. Equal distances resolve to WellA.
WellDistanceResult dist_to_wells(const Mat2& f, const WellSpec& spec);

/// dist^2(F, K) and its derivative with respect to F (active branch; ties toward WellA).
struct WellEnergy {
    double value = 0.0;
    Mat2 gradient;
};
WellEnergy well_energy(const Mat2& f, const WellSpec& spec);

struct RankOneConnections {
    std::vector<double> angles; ///< roots of det(A - Q(phi) B) in [0, 2pi), ascending
    std::size_t expected = 0;   ///< 2 for K1, 1 for K2
    bool matches_expected() const { return angles.size() == expected; }
};

/// Rotations Q(phi) with det(A - Q(phi)B) = 0, found on a uniform grid of
/// `grid_points` angles. Sign changes are bisected; grid-local minima of |det| that
/// touch zero (double roots, as in K2) are refined by golden-section search.
RankOneConnections rank_one_connections(const WellSpec& spec, int grid_points = 10000,
                                        double tol = 1e-12);

/// |A v| - |B v| for a unit vector v.
double interface_degeneracy_gap(const WellSpec& spec, const Vec2& v);

/// R_a = (1+alpha^2)^{-1/2} [[1,-alpha],[alpha,1]], the rotation bringing Z A1 Z back near A1.
Mat2 conjugation_rotation(double alpha);

}  // namespace branching
