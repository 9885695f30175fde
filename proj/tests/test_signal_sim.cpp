#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "sarmoco/metrics.hpp"
#include "sarmoco/signal_sim.hpp"
#include "support.hpp"

using namespace sarmoco;
using sarmoco::test::kPi;
using sarmoco::test::Rng;

namespace {

ArrayConfig one_vpc() {
    ArrayConfig a;
    a.count = 1;
    return a;
}

std::complex<double> sample(const DataCube& c, std::size_t m, std::size_t n, std::size_t b) {
    return std::complex<double>(c.at(m, n, b));
}

}  // namespace

TEST(Sinc, Values) {
    EXPECT_EQ(sinc(0.0), 1.0);
    EXPECT_NEAR(sinc(1.0), 0.0, 1e-16);
    EXPECT_NEAR(sinc(0.5), 2.0 / kPi, 1e-15);
    EXPECT_NEAR(sinc(-0.5), 2.0 / kPi, 1e-15);
}

TEST(Simulate, OnBinSampleIsUnitPhasor) {
    // Bin 800 of the default axis is 20 m.
    const RadarConfig radar;
    const Trajectory traj({0, 0, 0}, {0, 0, 0}, 1, radar.pri);
    const auto cube = simulate_range_compressed(test::single({20, 0, 0}), traj, one_vpc(), radar);
    const double r0 = radar.bin_range(800);
    const auto expected = std::polar(1.0, -4.0 * kPi * r0 / radar.wavelength);
    const auto s = sample(cube, 0, 0, 800);
    EXPECT_NEAR(std::abs(s), 1.0, 1e-6);
    EXPECT_NEAR(std::abs(s - expected), 0.0, 1e-5);
    EXPECT_LT(std::abs(sample(cube, 0, 0, 802)), 1e-6);  // r0 + rho
}

TEST(Simulate, SymmetricPairAtHalfResolution) {
    const RadarConfig radar;
    const Trajectory traj({0, 0, 0}, {0, 0, 0}, 1, radar.pri);
    Scene scene;
    const double r0 = radar.bin_range(800);
    scene.scatterers.push_back({{r0 - radar.range_resolution / 2, 0, 0}, {1, 0}, {}});
    scene.scatterers.push_back({{r0 + radar.range_resolution / 2, 0, 0}, {1, 0}, {}});
    const auto cube = simulate_range_compressed(scene, traj, one_vpc(), radar);
    // Two-way phase difference over 5 cm is 50 pi, so the pair adds in phase.
    EXPECT_NEAR(std::abs(sample(cube, 0, 0, 800)), 2.0 * std::sin(kPi / 2) / (kPi / 2), 1e-5);
    EXPECT_NEAR(std::abs(sample(cube, 0, 0, 800)), 1.2732395, 1e-5);
}

TEST(Simulate, LinearInReflectivity) {
    Rng rng(5);
    const auto radar = test::window(10, 40);
    const Trajectory traj({0, 0, 0}, {6.94, 0, 0}, 20, radar.pri);
    const ArrayConfig arr;
    for (int trial = 0; trial < 5; ++trial) {
        Scene a = test::single({rng.uniform(15, 35), rng.uniform(-5, 5), 0}, rng.unit_phasor() * 2.0);
        Scene b = test::single({rng.uniform(15, 35), rng.uniform(-5, 5), 0}, rng.unit_phasor() * 0.5);
        Scene ab;
        ab.scatterers = {a.scatterers[0], b.scatterers[0]};
        auto sum = simulate_range_compressed(a, traj, arr, radar);
        sum += simulate_range_compressed(b, traj, arr, radar);
        const auto joint = simulate_range_compressed(ab, traj, arr, radar);
        double worst = 0.0;
        for (std::size_t i = 0; i < joint.samples().size(); ++i)
            worst = std::max(worst, double(std::abs(joint.samples()[i] - sum.samples()[i])));
        EXPECT_LT(worst, 2e-6);
    }
}

TEST(Simulate, RangeMigrationFollowsPlatform) {
    const auto radar = test::window(15, 25);
    const std::size_t pulses = 51;
    const Trajectory traj({0, 0, 0}, {15, 0, 0}, pulses, radar.pri);
    const auto cube = simulate_range_compressed(test::single({20, 0, 0}), traj, one_vpc(), radar);
    std::vector<double> tau, peak_range;
    for (std::size_t m = 0; m < pulses; ++m) {
        const auto prof = cube.profile(m, 0);
        std::size_t best = 0;
        for (std::size_t b = 1; b < prof.size(); ++b)
            if (std::abs(prof[b]) > std::abs(prof[best])) best = b;
        const double r = 20.0 - 15.0 * traj.slow_time(m);
        EXPECT_LE(std::abs(radar.bin_range(best) - r), radar.bin_spacing / 2 + 1e-9);
        tau.push_back(traj.slow_time(m));
        peak_range.push_back(radar.bin_range(best));
    }
    const auto fit = fit_line(tau, peak_range);
    // 15 * PRI per pulse.
    EXPECT_NEAR(fit.slope * radar.pri, -15.0 * radar.pri, 0.05 * 15.0 * radar.pri);
}

TEST(Simulate, PhaseLawAtPeakBin) {
    const auto radar = test::window(15, 25);
    const Trajectory traj({0, 0, 0}, {6.94, 0.3, 0}, 40, radar.pri);
    const ArrayConfig arr;
    const Vec3 target{21.3, 2.1, 0};
    const auto cube = simulate_range_compressed(test::single(target), traj, arr, radar);
    for (std::size_t m = 0; m < traj.pulses(); ++m) {
        for (std::size_t n = 0; n < arr.count; ++n) {
            const double r = range_history(n, m, target, traj, arr, RangeMode::exact);
            const auto b = std::size_t(std::lround((r - radar.first_bin_range) / radar.bin_spacing));
            const double expected = -4.0 * kPi * r / radar.wavelength;
            const auto err = sample(cube, m, n, b) * std::polar(1.0, -expected);
            // Within half a bin the sinc envelope is positive.
            EXPECT_NEAR(std::arg(err), 0.0, 1e-4);
        }
    }
}

TEST(Simulate, NoiseVarianceMatchesPower) {
    auto radar = test::window(10, 20);
    Scene scene;
    scene.noise = {0.5, 42};
    const Trajectory traj({0, 0, 0}, {6.94, 0, 0}, 50, radar.pri);
    const auto cube = simulate_range_compressed(scene, traj, ArrayConfig{}, radar);
    double re = 0, im = 0, p = 0, pr = 0;
    for (const auto& z : cube.samples()) {
        re += z.real();
        im += z.imag();
        p += std::norm(std::complex<double>(z));
        pr += double(z.real()) * z.real();
    }
    const double n = double(cube.samples().size());
    EXPECT_NEAR(p / n, 0.5, 0.5 * 0.02);
    EXPECT_NEAR(pr / n, 0.25, 0.25 * 0.03);
    EXPECT_NEAR(re / n, 0.0, 0.01);
    EXPECT_NEAR(im / n, 0.0, 0.01);
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
    const auto radar = test::window(10, 30);
    Scene scene;
    Rng rng(9);
    for (int i = 0; i < 6; ++i)
        scene.scatterers.push_back({{rng.uniform(12, 28), rng.uniform(-5, 5), 0}, rng.unit_phasor(), {}});
    scene.noise = {0.01, 7};
    const Trajectory traj({0, 0, 0}, {6.94, 0, 0}, 30, radar.pri);
    const auto a = simulate_range_compressed(scene, traj, ArrayConfig{}, radar, 1);
    const auto b = simulate_range_compressed(scene, traj, ArrayConfig{}, radar, 3);
    ASSERT_EQ(a.samples().size(), b.samples().size());
    EXPECT_EQ(std::memcmp(a.samples().data(), b.samples().data(), a.samples().size_bytes()), 0);

    scene.noise.seed = 8;
    const auto c = simulate_range_compressed(scene, traj, ArrayConfig{}, radar, 1);
    EXPECT_NE(std::memcmp(a.samples().data(), c.samples().data(), a.samples().size_bytes()), 0);
}

TEST(Simulate, MovingScattererTracksItsOwnRange) {
    const auto radar = test::window(15, 25);
    const Trajectory traj({0, 0, 0}, {0, 0, 0}, 21, radar.pri);
    Scene scene;
    scene.scatterers.push_back({{20, 0, 0}, {1, 0}, {-2, 0, 0}});
    const auto cube = simulate_range_compressed(scene, traj, one_vpc(), radar);
    const double tau = traj.slow_time(20);
    const double r = 20.0 - 2.0 * tau;
    const auto expected = std::polar(sinc((radar.bin_range(200) - r) / radar.range_resolution),
                                     -4.0 * kPi * r / radar.wavelength);
    EXPECT_LT(std::abs(sample(cube, 20, 0, 200) - expected), 1e-5);
}

TEST(Simulate, Validation) {
    RadarConfig radar;
    radar.bin_spacing = 0.03;
    EXPECT_THROW(radar.validate(), std::invalid_argument);
    Scene bad = test::single({20, 0, 0}, {0, 0});
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    Scene noisy;
    noisy.noise.power = -1;
    EXPECT_THROW(noisy.validate(), std::invalid_argument);
    const Trajectory traj({0, 0, 0}, {0, 0, 0}, 1, 2e-3);
    EXPECT_THROW(simulate_range_compressed(Scene{}, traj, ArrayConfig{}, RadarConfig{}),
                 std::invalid_argument);
}

TEST(ApplyVelocityError, Examples) {
    const Trajectory traj({1, 2, 0}, {6.94, 0, 0}, 200, 1e-3);
    const auto same = apply_velocity_error(traj, {0, 0, 0});
    EXPECT_EQ(same.velocity(), traj.velocity());
    EXPECT_EQ(same.reference_position(), traj.reference_position());
    EXPECT_EQ(same.pulses(), traj.pulses());

    const auto nav = apply_velocity_error(traj, {0.2622, -0.0114, 0});
    EXPECT_NEAR(nav.velocity().x, 7.2022, 1e-12);
    EXPECT_NEAR(nav.velocity().y, -0.0114, 1e-12);
    EXPECT_EQ(nav.velocity().z, 0.0);
    EXPECT_EQ(nav.reference_position(), traj.reference_position());
}
