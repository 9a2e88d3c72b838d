#include <cmath>
#include <random>

#include "branching/errors.hpp"
#include "branching/wells.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace branching;

TEST_CASE("well matrices") {
    const auto k1 = well_matrices(WellSpec(WellCase::K1, 0.5));
    CHECK(k1.a == Mat2{1.0, -0.5, 0.0, 1.0});
    CHECK(k1.b == Mat2{1.0, 0.5, 0.0, 1.0});
    const auto k2 = well_matrices(WellSpec(WellCase::K2, 0.2));
    CHECK(k2.a == Mat2::diag(1.0, 0.8));
    CHECK(k2.b == Mat2::diag(1.0, 1.2));
    const auto k0 = well_matrices(WellSpec(WellCase::K2, 0.0));
    CHECK(k0.a == Mat2::identity());
    CHECK(k0.b == Mat2::identity());
    CHECK(k1.a.det() == doctest::Approx(1.0));
    CHECK(k2.a.det() == doctest::Approx(0.8));
    CHECK(k2.b.det() == doctest::Approx(1.2));
    CHECK_THROWS_AS(WellSpec(WellCase::K1, 1.0), PreconditionError);
    CHECK_THROWS_AS(WellSpec(WellCase::K1, -0.1), PreconditionError);
    CHECK(WellSpec(WellCase::K2, 0.6).outside_k2_lower_bound_range());
    CHECK_FALSE(WellSpec(WellCase::K1, 0.6).outside_k2_lower_bound_range());
}

TEST_CASE("orbit distance examples against the angle scan") {
    const double alpha = 0.2;
    const Mat2 a2 = Mat2::diag(1.0, 1.0 - alpha);
    const Mat2 a1{1.0, -alpha, 0.0, 1.0};

    const OrbitDistance self = dist_to_rotated_well(a2, a2);
    CHECK(std::abs(self.distance) < 1e-12);
    CHECK(std::abs(self.angle) < 1e-12);

    const auto scan_a2 = oracle::angle_scan(Mat2::identity(), a2, 1'000'000);
    const OrbitDistance d2 = dist_to_rotated_well(Mat2::identity(), a2);
    CHECK(std::abs(d2.distance - scan_a2.distance) < 1e-10);
    CHECK(std::abs(d2.distance - 0.2) < 1e-12);

    const auto scan_a1 = oracle::angle_scan(Mat2::identity(), a1, 1'000'000);
    const OrbitDistance d1 = dist_to_rotated_well(Mat2::identity(), a1);
    CHECK(std::abs(d1.distance - scan_a1.distance) < 1e-10);
    const double closed = std::sqrt(4.0 + alpha * alpha - 2.0 * std::sqrt(4.0 + alpha * alpha));
    CHECK(std::abs(d1.distance - closed) < 1e-12);
    CHECK(std::abs(d1.distance - 0.1416) < 1e-4);
}

TEST_CASE("degenerate orbit rotation is flagged") {
    // F G^T = [[1,0],[0,-1]] has zero trace and zero antisymmetric part.
    const OrbitDistance d = dist_to_rotated_well(Mat2::diag(1.0, -1.0), Mat2::identity());
    CHECK(d.degenerate);
    CHECK(d.angle == 0.0);
    CHECK(d.distance == doctest::Approx(2.0));
}

TEST_CASE("dist_to_wells examples") {
    const WellSpec k2(WellCase::K2, 0.2);
    const auto at_b = dist_to_wells(k2.b(), k2);
    CHECK(at_b.distance < 1e-14);
    CHECK(at_b.nearest_well == WellTag::B);

    const auto tie = dist_to_wells(Mat2::identity(), k2);
    CHECK(tie.distance == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(tie.nearest_well == WellTag::A);
    CHECK(oracle::angle_scan(Mat2::identity(), k2.a()).distance == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(oracle::angle_scan(Mat2::identity(), k2.b()).distance == doctest::Approx(0.2).epsilon(1e-10));

    const WellSpec k1(WellCase::K1, 0.2);
    const auto rotated = dist_to_wells(Mat2::rotation(0.3) * k1.a(), k1);
    CHECK(rotated.distance < 1e-12);
    CHECK(rotated.nearest_well == WellTag::A);
    CHECK(rotated.optimal_angle == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("orbit distance properties on random matrices") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    double worst_invariance = 0.0, worst_oracle = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Mat2 f = oracle::random_matrix(rng);
        const Mat2 g = oracle::random_matrix(rng);
        const Mat2 r = Mat2::rotation(ang(rng));
        const double d = dist_to_rotated_well(f, g).distance;
        worst_invariance = std::max(worst_invariance, std::abs(dist_to_rotated_well(r * f, g).distance - d));
        worst_oracle = std::max(worst_oracle, std::abs(oracle::angle_scan(f, g).distance - d));
        if (k < 100)
            for (int t = 0; t < 100; ++t)
                CHECK(d <= (f - Mat2::rotation(ang(rng)) * g).norm() + 1e-12);
    }
    CHECK(worst_invariance < 1e-10);
    CHECK(worst_oracle < 1e-9);
}

TEST_CASE("rank-one connections") {
    for (double alpha : {0.1, 0.2, 0.4}) {
        const auto k2 = rank_one_connections(WellSpec(WellCase::K2, alpha));
        REQUIRE(k2.angles.size() == 1);
        CHECK(std::abs(k2.angles[0]) < 1e-9);
        CHECK(k2.matches_expected());

        const auto k1 = rank_one_connections(WellSpec(WellCase::K1, alpha));
        REQUIRE(k1.angles.size() == 2);
        CHECK(k1.matches_expected());
        // det(A1 - Q B1) = 2 - 2 cos phi - 2 alpha sin phi vanishes at 0 and 2 atan(alpha).
        CHECK(std::abs(k1.angles[0]) < 1e-9);
        CHECK(k1.angles[1] == doctest::Approx(2.0 * std::atan(alpha)).epsilon(1e-10));
        const WellSpec spec(WellCase::K1, alpha);
        for (double phi : k1.angles)
            CHECK(std::abs((spec.a() - Mat2::rotation(phi) * spec.b()).det()) < 1e-12);
    }
}

TEST_CASE("interface degeneracy orders") {
    const WellSpec k1(WellCase::K1, 0.2), k2(WellCase::K2, 0.2);
    CHECK(interface_degeneracy_gap(k1, {1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(interface_degeneracy_gap(k2, {1.0, 0.0}) == doctest::Approx(0.0));
    const double t = 1e-4;
    const Vec2 v{std::cos(t), std::sin(t)};
    CHECK(interface_degeneracy_gap(k1, v) / t == doctest::Approx(-2.0 * 0.2).epsilon(1e-3));
    CHECK(std::abs(interface_degeneracy_gap(k2, v) / t) < 1e-3);
    const double q = interface_degeneracy_gap(k2, v) / (t * t);
    CHECK(std::isfinite(q));
    CHECK(std::abs(q) > 0.01);
}

TEST_CASE("swap conjugation and R_a") {
    std::mt19937_64 rng(11);
    const Mat2 z = Mat2::swap();
    for (double alpha : {0.05, 0.1, 0.2, 0.4, 0.9}) {
        const WellSpec k1(WellCase::K1, alpha);
        const Mat2 r = conjugation_rotation(alpha);
        CHECK(r.det() == doctest::Approx(1.0));
        CHECK((r * z * k1.a() * z - k1.a()).norm() <= alpha * alpha + 1e-15);
    }
    const WellSpec k1(WellCase::K1, 0.2);
    for (int k = 0; k < 1000; ++k) {
        const Mat2 f = oracle::random_matrix(rng);
        CHECK(dist_to_wells(z * f * z, k1).distance <= dist_to_wells(f, k1).distance + 0.04 + 1e-12);
    }
}

TEST_CASE("well energy gradient matches finite differences") {
    std::mt19937_64 rng(3);
    for (auto c : {WellCase::K1, WellCase::K2}) {
        const WellSpec spec(c, 0.2);
        for (int k = 0; k < 50; ++k) {
            const Mat2 f = Mat2::identity() + oracle::random_matrix(rng, -0.5, 0.5);
            const WellEnergy e = well_energy(f, spec);
            CHECK(e.value == doctest::Approx(std::pow(dist_to_wells(f, spec).distance, 2)));
            const double h = 1e-6;
            double* entries[4];
            Mat2 fp = f, fm = f;
            const double g[4] = {e.gradient.a11, e.gradient.a12, e.gradient.a21, e.gradient.a22};
            for (int i = 0; i < 4; ++i) {
                fp = f;
                fm = f;
                entries[0] = &fp.a11; entries[1] = &fp.a12; entries[2] = &fp.a21; entries[3] = &fp.a22;
                *entries[i] += h;
                entries[0] = &fm.a11; entries[1] = &fm.a12; entries[2] = &fm.a21; entries[3] = &fm.a22;
                *entries[i] -= h;
                const double fd = (well_energy(fp, spec).value - well_energy(fm, spec).value) / (2 * h);
                CHECK(fd == doctest::Approx(g[i]).epsilon(1e-5).scale(1.0));
            }
        }
    }
}
