#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "sarmoco/geometry.hpp"
#include "sarmoco/signal_sim.hpp"

namespace sarmoco {

/// How range-compressed samples are read at fractional bin positions.
enum class RangeInterpolator {
    linear,  ///< two-tap linear interpolation of the complex samples
    sinc8,   ///< eight-tap truncated sinc
};

struct FocusOptions {
    RangeInterpolator interpolator = RangeInterpolator::linear;
    unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// Complex image on a ground grid, row-major (iy, ix).
class SarImage {
public:
    explicit SarImage(const GroundGrid& grid);
    SarImage(const GroundGrid& grid, std::vector<std::complex<float>> pixels);

    [[nodiscard]] const GroundGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::complex<float>& at(std::size_t iy, std::size_t ix) {
        return pixels_[iy * grid_.nx() + ix];
    }
    [[nodiscard]] const std::complex<float>& at(std::size_t iy, std::size_t ix) const {
        return pixels_[iy * grid_.nx() + ix];
    }
    [[nodiscard]] std::span<const std::complex<float>> pixels() const noexcept { return pixels_; }
    [[nodiscard]] std::span<std::complex<float>> pixels() noexcept { return pixels_; }

private:
    GroundGrid grid_;
    std::vector<std::complex<float>> pixels_;
};

/// One low-resolution image per pulse: I_m(tau_m; x) on a shared grid,
/// stored (m, iy, ix) with m slowest.
class ImageStack {
public:
    ImageStack(const GroundGrid& grid, std::vector<double> tau);

    [[nodiscard]] const GroundGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<double>& tau() const noexcept { return tau_; }
    [[nodiscard]] std::size_t pulses() const noexcept { return tau_.size(); }

    [[nodiscard]] std::complex<float>& at(std::size_t m, std::size_t iy, std::size_t ix) {
        return data_[(m * grid_.ny() + iy) * grid_.nx() + ix];
    }
    [[nodiscard]] const std::complex<float>& at(std::size_t m, std::size_t iy,
                                                std::size_t ix) const {
        return data_[(m * grid_.ny() + iy) * grid_.nx() + ix];
    }
    [[nodiscard]] std::span<std::complex<float>> image(std::size_t m) {
        return {data_.data() + m * grid_.size(), grid_.size()};
    }
    [[nodiscard]] std::span<const std::complex<float>> image(std::size_t m) const {
        return {data_.data() + m * grid_.size(), grid_.size()};
    }
    [[nodiscard]] std::span<const std::complex<float>> data() const noexcept { return data_; }
    [[nodiscard]] std::span<std::complex<float>> data() noexcept { return data_; }

    /// Slow-time history of one pixel.
    [[nodiscard]] std::vector<std::complex<double>> series(std::size_t iy, std::size_t ix) const;

    /// Range lookups that fell outside the sampled window, per pulse.
    std::vector<std::size_t> clipped_lookups;

private:
    GroundGrid grid_;
    std::vector<double> tau_;
    std::vector<std::complex<float>> data_;
};

struct PulseImage {
    std::vector<std::complex<float>> pixels;
    std::size_t clipped_lookups = 0;
};

/// Low-resolution image of pulse m: for every pixel, the sum over VPCs of the
/// interpolated sample at the pixel's range (from `nav`) times exp(+j 4 pi r / lambda).
PulseImage backproject_pulse(const DataCube& cube, const Trajectory& nav, const ArrayConfig& arr,
                             const GroundGrid& grid, std::size_t m, const RadarConfig& radar,
                             const FocusOptions& opts = {});

ImageStack backproject_stack(const DataCube& cube, const Trajectory& nav, const ArrayConfig& arr,
                             const GroundGrid& grid, const RadarConfig& radar,
                             const FocusOptions& opts = {});

/// Slow-time histories of arbitrary points, stored (m, point) with m slowest.
struct PointHistories {
    std::size_t points = 0;
    std::size_t pulses = 0;
    std::vector<std::complex<float>> values;
    std::size_t clipped_lookups = 0;

    [[nodiscard]] const std::complex<float>& at(std::size_t m, std::size_t i) const {
        return values[m * points + i];
    }
};

/// Same per-point values as backproject_stack, for points off the grid.
PointHistories backproject_points(const DataCube& cube, const Trajectory& nav,
                                  const ArrayConfig& arr, std::span<const Vec3> points,
                                  const RadarConfig& radar, const FocusOptions& opts = {});

/// Pixel-wise sum over pulses. Optional per-pulse real weights (uniform if empty).
SarImage coherent_sum(const ImageStack& stack, std::span<const double> weights = {});

/// Equivalent to coherent_sum(backproject_stack(...)) bit for bit, without
/// holding the stack in memory.
SarImage focus_image(const DataCube& cube, const Trajectory& nav, const ArrayConfig& arr,
                     const GroundGrid& grid, const RadarConfig& radar,
                     const FocusOptions& opts = {});

}  // namespace sarmoco
