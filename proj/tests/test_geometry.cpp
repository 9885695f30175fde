#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sarmoco/geometry.hpp"
#include "support.hpp"

using namespace sarmoco;
using sarmoco::test::kPi;
using sarmoco::test::Rng;

TEST(VpcPositions, SingleCenteredElement) {
    const Trajectory traj({0, 0, 0}, {6.94, 0, 0}, 1, 1e-3);
    ArrayConfig arr;
    arr.count = 1;
    const auto p = vpc_positions(traj, arr, 0);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0], (Vec3{0, 0, 0}));
}

TEST(VpcPositions, TwoElementsSymmetric) {
    const Trajectory traj({0, 0, 0}, {0, 0, 0}, 1, 1e-3);
    ArrayConfig arr;
    arr.count = 2;
    const auto p = vpc_positions(traj, arr, 0);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_DOUBLE_EQ(p[0].y, -0.0005);
    EXPECT_DOUBLE_EQ(p[1].y, 0.0005);
}

TEST(VpcPositions, FollowTrajectory) {
    // 3 pulses at 1 s PRI: tau = -1, 0, 1.
    const Trajectory traj({0, 0, 0}, {6.94, 0, 0}, 3, 1.0);
    ASSERT_DOUBLE_EQ(traj.slow_time(2), 1.0);
    const auto p = vpc_positions(traj, ArrayConfig{}, 2);
    ASSERT_EQ(p.size(), 8u);
    const Vec3 c = traj.position(1.0);
    for (const auto& v : p) EXPECT_DOUBLE_EQ(v.x, c.x);
}

TEST(VpcPositions, MountingOffsetShiftsAll) {
    const Trajectory traj({1, 2, 3}, {0, 0, 0}, 1, 1e-3);
    ArrayConfig arr;
    arr.mounting_offset = {0.5, 0, 0.25};
    const auto p = vpc_positions(traj, arr, 0);
    for (const auto& v : p) {
        EXPECT_DOUBLE_EQ(v.x, 1.5);
        EXPECT_DOUBLE_EQ(v.z, 3.25);
    }
    EXPECT_EQ(aperture_center(traj, arr), (Vec3{1.5, 2, 3.25}));
}

TEST(UnitVector, Boresight) {
    const Vec3 u = unit_vector({0, 0, 0}, {10, 0, 0});
    EXPECT_EQ(u, (Vec3{1, 0, 0}));
}

TEST(UnitVector, IncidenceRay) {
    const double th = 87.0 * kPi / 180.0;
    const Vec3 u = unit_vector({0, 0, 0}, Vec3{std::sin(th), 0, std::cos(th)} * 25.0);
    EXPECT_NEAR(u.x, 0.998629534754574, 1e-12);
    EXPECT_NEAR(u.y, 0.0, 1e-15);
    EXPECT_NEAR(u.z, 0.052335956242944, 1e-12);
}

TEST(UnitVector, CrossTrack) {
    const Vec3 u = unit_vector({0, 0, 1}, {0, 5, 1});
    EXPECT_EQ(u, (Vec3{0, 1, 0}));
}

TEST(UnitVector, CoincidentPointsRejected) {
    EXPECT_THROW(unit_vector({1, 1, 1}, {1, 1, 1}), std::invalid_argument);
}

TEST(Wavevector, Examples) {
    const Vec3 kx = wavevector({1, 0, 0}, 0.004);
    EXPECT_NEAR(kx.x, 1000.0 * kPi, 1e-9);
    EXPECT_EQ(kx.y, 0.0);
    const Vec3 ky = wavevector({0, 1, 0}, 0.004);
    EXPECT_NEAR(ky.y, 3141.59265358979, 1e-9);
    const double th = 87.0 * kPi / 180.0;
    const Vec3 k = wavevector({std::sin(th), 0, std::cos(th)}, 0.004);
    EXPECT_NEAR(k.x, 3137.3, 0.05);
    EXPECT_NEAR(k.z, 164.4, 0.05);
}

TEST(RangeHistory, StationaryBothModes) {
    const Trajectory traj({0, 0, 0}, {0, 0, 0}, 5, 1e-3);
    ArrayConfig arr;
    arr.count = 1;
    for (std::size_t m = 0; m < 5; ++m) {
        EXPECT_EQ(range_history(0, m, {20, 0, 0}, traj, arr, RangeMode::exact), 20.0);
        EXPECT_EQ(range_history(0, m, {20, 0, 0}, traj, arr, RangeMode::plane_wave), 20.0);
    }
}

TEST(RangeHistory, PlaneWaveMotion) {
    // 3 pulses, PRI 10 ms: pulse 2 sits at tau = 0.01 s.
    const Trajectory traj({0, 0, 0}, {15, 0, 0}, 3, 0.01);
    ArrayConfig arr;
    arr.count = 1;
    EXPECT_NEAR(range_history(0, 2, {20, 0, 0}, traj, arr, RangeMode::plane_wave), 19.85, 1e-12);
}

TEST(RangeHistory, PlaneWaveCloseOnShortAperture) {
    // 0.5 m aperture: 50 pulses at 1.4 ms and 6.94 m/s ~ 0.34 m, plus the array.
    const Trajectory traj({0, 0, 0}, {6.94, 0, 0}, 50, 1.4e-3);
    const ArrayConfig arr;
    const double lambda = 0.004;
    const Vec3 target{20, 0, 0};
    double worst = 0.0;
    for (std::size_t m = 0; m < traj.pulses(); ++m)
        for (std::size_t n = 0; n < arr.count; ++n)
            worst = std::max(worst, std::abs(range_history(n, m, target, traj, arr, RangeMode::exact) -
                                             range_history(n, m, target, traj, arr, RangeMode::plane_wave)));
    EXPECT_LT(worst, lambda / 16.0);
}

TEST(RangeHistory, ExactIsEuclidean) {
    Rng rng(11);
    const Trajectory traj({0.3, -0.2, 0.5}, {6.94, 0.1, 0}, 9, 1e-3);
    const ArrayConfig arr;
    for (int trial = 0; trial < 50; ++trial) {
        const Vec3 t = rng.vec(-30, 30) + Vec3{40, 0, 0};
        const std::size_t m = rng.index(0, 8), n = rng.index(0, 7);
        const Vec3 p = vpc_positions(traj, arr, m)[n];
        EXPECT_NEAR(range_history(n, m, t, traj, arr, RangeMode::exact), (t - p).norm(), 1e-12);
    }
}

TEST(GeometryProperty, UnitVectorHasUnitNorm) {
    Rng rng(1);
    for (int trial = 0; trial < 2000; ++trial) {
        const Vec3 a = rng.vec(-100, 100);
        Vec3 b = rng.vec(-100, 100);
        if ((b - a).norm() < 1e-6) continue;
        EXPECT_NEAR(unit_vector(a, b).norm(), 1.0, 1e-12);
    }
}

TEST(GeometryProperty, ExactRangeTranslationInvariant) {
    Rng rng(2);
    for (int trial = 0; trial < 500; ++trial) {
        const Vec3 ref = rng.vec(-5, 5);
        const Vec3 vel = rng.vec(-10, 10);
        const Vec3 target = rng.vec(-50, 50);
        const Vec3 shift = rng.vec(-100, 100);
        const std::size_t pulses = rng.index(1, 300);
        const Trajectory a(ref, vel, pulses, 1e-3);
        const Trajectory b(ref + shift, vel, pulses, 1e-3);
        const ArrayConfig arr;
        const std::size_t m = rng.index(0, pulses - 1), n = rng.index(0, arr.count - 1);
        const double ra = range_history(n, m, target, a, arr, RangeMode::exact);
        const double rb = range_history(n, m, target + shift, b, arr, RangeMode::exact);
        EXPECT_NEAR(ra, rb, 1e-11 * std::max(1.0, ra));
    }
}

TEST(GeometryProperty, PlaneWaveQuadraticBound) {
    Rng rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        // Stationary array with a wide spacing so the bound is non-trivial.
        ArrayConfig arr;
        arr.count = rng.index(2, 16);
        arr.spacing = rng.uniform(0.001, 0.05);
        const Trajectory traj({0, 0, 0}, {0, 0, 0}, 1, 1e-3);
        const double r0 = rng.uniform(5, 60);
        const double phi = rng.uniform(-0.3, 0.3);
        const Vec3 target{r0 * std::cos(phi), r0 * std::sin(phi), 0};
        const double L = 0.5 * double(arr.count - 1) * arr.spacing;
        for (std::size_t n = 0; n < arr.count; ++n) {
            const double e = range_history(n, 0, target, traj, arr, RangeMode::exact);
            const double p = range_history(n, 0, target, traj, arr, RangeMode::plane_wave);
            EXPECT_LE(std::abs(e - p), L * L / (2.0 * r0) + 1e-12);
        }
    }
}

TEST(GeometryProperty, SlowTimeSumsToZero) {
    for (std::size_t pulses : {1u, 2u, 3u, 7u, 200u, 201u, 1024u}) {
        const Trajectory traj({0, 0, 0}, {6.94, 0, 0}, pulses, 1e-3);
        const auto tau = traj.slow_time_axis();
        ASSERT_EQ(tau.size(), pulses);
        // Mirrored pulses cancel exactly; a running sum only up to round-off.
        double paired = 0.0;
        for (std::size_t m = 0; m < pulses / 2; ++m) paired += tau[m] + tau[pulses - 1 - m];
        if (pulses % 2) paired += tau[pulses / 2];
        EXPECT_EQ(paired, 0.0) << pulses;
        EXPECT_NEAR(std::accumulate(tau.begin(), tau.end(), 0.0), 0.0, 1e-12);
        for (std::size_t m = 0; m < pulses; ++m) EXPECT_EQ(tau[m], -tau[pulses - 1 - m]);
    }
}

TEST(GeometryErrors, InvalidInputs) {
    EXPECT_THROW(Trajectory({0, 0, 0}, {1, 0, 0}, 0, 1e-3), std::invalid_argument);
    EXPECT_THROW(Trajectory({0, 0, 0}, {1, 0, 0}, 10, 0.0), std::invalid_argument);
    ArrayConfig arr;
    arr.count = 0;
    EXPECT_THROW(arr.validate(), std::invalid_argument);
    EXPECT_THROW(GroundGrid(0, 0.0, 10, 0, 0.1, 10, 0), std::invalid_argument);
}
