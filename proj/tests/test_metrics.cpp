#include <gtest/gtest.h>

#include <cmath>

#include "sarmoco/metrics.hpp"
#include "support.hpp"

using namespace sarmoco;
using sarmoco::test::kPi;
using sarmoco::test::Rng;

namespace {

SarImage random_image(Rng& rng, std::size_t nx, std::size_t ny) {
    SarImage img(GroundGrid(0, 0.05, nx, 0, 0.05, ny, 0));
    for (auto& z : img.pixels()) z = std::complex<float>(rng.unit_phasor() * rng.uniform(0, 1));
    return img;
}

// -3 dB half width of |sinc(x)| by bisection.
double sinc_half_width() {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(sinc(mid)) > std::sqrt(0.5) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

TEST(Entropy, SinglePixelIsZero) {
    SarImage img(GroundGrid(0, 1, 5, 0, 1, 4, 0));
    img.at(2, 3) = {0.0f, 3.0f};
    EXPECT_EQ(image_entropy(img), 0.0);
}

TEST(Entropy, UniformMagnitudeIsLogPixelCount) {
    Rng rng(1);
    SarImage img(GroundGrid(0, 1, 12, 0, 1, 7, 0));
    for (auto& z : img.pixels()) z = std::complex<float>(rng.unit_phasor() * 2.0);
    EXPECT_NEAR(image_entropy(img), std::log(84.0), 1e-6);
}

TEST(Entropy, ZeroImageRejected) {
    SarImage img(GroundGrid(0, 1, 3, 0, 1, 3, 0));
    EXPECT_THROW(image_entropy(img), std::invalid_argument);
}

TEST(MetricsProperty, EntropyAndWidthInvariantToComplexScale) {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        auto img = random_image(rng, rng.index(3, 30), rng.index(3, 30));
        // Plant a clear interior peak so widths exist.
        const std::size_t r = img.grid().ny() / 2, c = img.grid().nx() / 2;
        img.at(r, c) = {5.0f, 0.0f};
        const auto scale = rng.unit_phasor() * std::pow(10.0, rng.uniform(-3, 3));
        SarImage scaled = img;
        for (auto& z : scaled.pixels()) z = std::complex<float>(std::complex<double>(z) * scale);
        EXPECT_NEAR(image_entropy(img), image_entropy(scaled), 1e-5);
        EXPECT_NEAR(image_contrast(img), image_contrast(scaled), 1e-5);
        EXPECT_EQ(peak_pixel(img), peak_pixel(scaled));
        EXPECT_NEAR(impulse_response_width(img, {r, c}, Axis::x),
                    impulse_response_width(scaled, {r, c}, Axis::x), 1e-6);
        const double e = image_entropy(img);
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, std::log(double(img.grid().size())) + 1e-9);
    }
}

TEST(Width, DiscreteDelta) {
    SarImage img(GroundGrid(0, 0.01, 9, 0, 0.02, 9, 0));
    img.at(4, 4) = {1.0f, 0.0f};
    const double wx = impulse_response_width(img, {4, 4}, Axis::x);
    const double wy = impulse_response_width(img, {4, 4}, Axis::y);
    EXPECT_GT(wx, 0.0);
    EXPECT_LE(wx, 2 * 0.01);
    EXPECT_LE(wy, 2 * 0.02);
    // Linear interpolation to 1/sqrt(2) on either side.
    EXPECT_NEAR(wx, 2 * (1 - std::sqrt(0.5)) * 0.01, 1e-9);
}

TEST(Width, SampledSincMainlobe) {
    // 1 mm samples of |sinc(x / 5 cm)| along x.
    const double rho = 0.05, d = 0.001;
    SarImage img(GroundGrid(-0.1, d, 201, 0, d, 3, 0));
    for (std::size_t iy = 0; iy < 3; ++iy)
        for (std::size_t ix = 0; ix < 201; ++ix)
            img.at(iy, ix) = {float(std::abs(sinc(img.grid().x(ix) / rho)) * (iy == 1 ? 1.0 : 0.5)), 0.0f};
    const double w = impulse_response_width(img, {1, 100}, Axis::x);
    EXPECT_NEAR(w, 2 * sinc_half_width() * rho, 1e-4);
    EXPECT_NEAR(2 * sinc_half_width() * rho, 0.0443, 1e-4);
}

TEST(Width, BoundaryAndUnbracketedPeaksRejected) {
    SarImage img(GroundGrid(0, 1, 5, 0, 1, 5, 0));
    img.at(0, 2) = {1.0f, 0.0f};
    EXPECT_THROW(impulse_response_width(img, {0, 2}, Axis::y), std::invalid_argument);
    SarImage flat(GroundGrid(0, 1, 5, 0, 1, 5, 0));
    for (auto& z : flat.pixels()) z = {1.0f, 0.0f};
    EXPECT_THROW(impulse_response_width(flat, {2, 2}, Axis::x), std::invalid_argument);
}

TEST(Contrast, UniformIsZero) {
    SarImage img(GroundGrid(0, 1, 4, 0, 1, 4, 0));
    for (auto& z : img.pixels()) z = {0.0f, 2.0f};
    EXPECT_NEAR(image_contrast(img), 0.0, 1e-12);
}

TEST(FocusMetrics, CollectsFields) {
    SarImage img(GroundGrid(0, 0.05, 9, 0, 0.05, 9, 0));
    img.at(3, 5) = {4.0f, 0.0f};
    img.at(3, 4) = {2.0f, 0.0f};
    const auto fm = focus_metrics(img);
    EXPECT_EQ(fm.peak, (PixelIndex{3, 5}));
    EXPECT_FLOAT_EQ(fm.peak_magnitude, 4.0f);
    ASSERT_TRUE(fm.width_x.has_value());
    ASSERT_TRUE(fm.width_y.has_value());
    EXPECT_GT(*fm.width_x, *fm.width_y);
    EXPECT_NEAR(fm.entropy, image_entropy(img), 0.0);
}

TEST(FocusMetrics, EdgePeakHasNoWidth) {
    SarImage img(GroundGrid(0, 0.05, 9, 0, 0.05, 9, 0));
    img.at(0, 0) = {4.0f, 0.0f};
    const auto fm = focus_metrics(img);
    EXPECT_FALSE(fm.width_x.has_value());
    EXPECT_FALSE(fm.width_y.has_value());
}

TEST(PeakPixel, FirstOnTies) {
    SarImage img(GroundGrid(0, 1, 4, 0, 1, 4, 0));
    img.at(2, 1) = {1.0f, 0.0f};
    img.at(1, 3) = {0.0f, 1.0f};
    EXPECT_EQ(peak_pixel(img), (PixelIndex{1, 3}));
}

TEST(Localization, PeaksOnScatterers) {
    const GroundGrid grid(0, 0.05, 40, -1, 0.05, 40, 0);
    SarImage img(grid);
    std::vector<Scatterer> truth{{{0.52, -0.48, 0}, {1, 0}, {}}, {{1.5, 0.3, 0}, {1, 0}, {}}};
    img.at(10, 10) = {3.0f, 0.0f};  // (0.5, -0.5)
    img.at(26, 30) = {2.0f, 0.0f};  // (1.5, 0.3)
    const auto loc = localization_error(img, truth);
    ASSERT_EQ(loc.size(), 2u);
    EXPECT_TRUE(loc[0].detected);
    EXPECT_NEAR(loc[0].error, std::hypot(0.02, 0.02), 1e-9);
    EXPECT_LE(loc[0].error, std::hypot(0.05, 0.05));
    EXPECT_TRUE(loc[1].detected);
    EXPECT_NEAR(loc[1].error, 0.0, 1e-9);
}

TEST(Localization, EmptySceneEmptyReport) {
    SarImage img(GroundGrid(0, 1, 3, 0, 1, 3, 0));
    EXPECT_TRUE(localization_error(img, {}).empty());
}

TEST(Localization, MissesOutsideGridOrWithoutPeak) {
    const GroundGrid grid(0, 0.1, 30, 0, 0.1, 30, 0);
    SarImage img(grid);
    img.at(5, 5) = {1.0f, 0.0f};
    img.at(5, 6) = {2.0f, 0.0f};
    std::vector<Scatterer> truth{{{10, 10, 0}, {1, 0}, {}}, {{2.5, 2.5, 0}, {1, 0}, {}}};
    const auto loc = localization_error(img, truth, 2.0);
    EXPECT_FALSE(loc[0].detected);
    // Nothing bright within two pixels of (2.5, 2.5).
    EXPECT_FALSE(loc[1].detected);
}

TEST(MetricsProperty, LocalizationTranslationSymmetric) {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const double sx = double(rng.index(0, 40)) * 0.05, sy = double(rng.index(0, 40)) * 0.05;
        const GroundGrid a(0, 0.05, 40, 0, 0.05, 40, 0);
        const GroundGrid b(sx, 0.05, 40, sy, 0.05, 40, 0);
        SarImage ia(a), ib(b);
        Rng pixels(trial);
        for (std::size_t p = 0; p < a.size(); ++p) {
            const auto z = std::complex<float>(pixels.uniform(0, 1), 0);
            ia.pixels()[p] = z;
            ib.pixels()[p] = z;
        }
        std::vector<Scatterer> ta, tb;
        for (int k = 0; k < 4; ++k) {
            const Vec3 p{rng.uniform(0.2, 1.8), rng.uniform(0.2, 1.8), 0};
            ta.push_back({p, {1, 0}, {}});
            tb.push_back({p + Vec3{sx, sy, 0}, {1, 0}, {}});
        }
        const auto la = localization_error(ia, ta, 3.0);
        const auto lb = localization_error(ib, tb, 3.0);
        for (std::size_t k = 0; k < la.size(); ++k) {
            EXPECT_EQ(la[k].detected, lb[k].detected);
            EXPECT_EQ(la[k].peak, lb[k].peak);
            EXPECT_NEAR(la[k].error, lb[k].error, 1e-9);
        }
    }
}

TEST(FitLine, ExactAndNoisy) {
    const std::vector<double> x{0, 1, 2, 3, 4};
    const std::vector<double> y{1, 3, 5, 7, 9};
    const auto f = fit_line(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);

    Rng rng(3);
    std::vector<double> xs, ys;
    for (int i = 0; i < 1000; ++i) {
        xs.push_back(i);
        ys.push_back(-0.5 * i + 4 + rng.uniform(-1, 1));
    }
    const auto g = fit_line(xs, ys);
    EXPECT_NEAR(g.slope, -0.5, 1e-3);
    EXPECT_GT(g.r_squared, 0.99);
    EXPECT_LT(g.r_squared, 1.0);

    const std::vector<double> one{1.0};
    EXPECT_THROW(fit_line(one, one), std::invalid_argument);
    const std::vector<double> same{2, 2, 2};
    EXPECT_THROW(fit_line(same, y.size() == 5 ? std::vector<double>{1, 2, 3} : same), std::invalid_argument);
}
