#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sarmoco/geometry.hpp"

namespace sarmoco {

/// Point scatterer. A non-zero velocity turns it into a moving target whose
/// position at slow time tau is position + velocity * tau.
struct Scatterer {
    Vec3 position{};
    std::complex<double> reflectivity{1.0, 0.0};
    Vec3 velocity{};
};

/// Circular complex white Gaussian noise; `power` is E|n|^2 per sample.
struct NoiseModel {
    double power = 0.0;
    std::uint64_t seed = 0;
};

struct Scene {
    std::vector<Scatterer> scatterers;
    NoiseModel noise{};

    void validate() const;
};

struct RadarConfig {
    double wavelength = 0.004;
    double range_resolution = 0.05;
    double bin_spacing = 0.025;
    double first_bin_range = 0.0;
    std::size_t num_bins = 2400;
    double pri = 1e-3;
    /// Nominal navigation velocity accuracy (m/s); bounds plausible residual Doppler.
    double nav_accuracy = 0.2;

    void validate() const;
    [[nodiscard]] double bin_range(std::size_t b) const noexcept {
        return first_bin_range + bin_spacing * double(b);
    }
};

/// Range-compressed samples s(r_b, n, tau_m), stored pulse-major:
/// index = (m * N + n) * bins + b.
class DataCube {
public:
    DataCube(std::size_t num_bins, std::size_t num_vpcs, std::size_t num_pulses,
             double first_bin_range, double bin_spacing, double pri, double wavelength);

    [[nodiscard]] std::size_t num_bins() const noexcept { return num_bins_; }
    [[nodiscard]] std::size_t num_vpcs() const noexcept { return num_vpcs_; }
    [[nodiscard]] std::size_t num_pulses() const noexcept { return num_pulses_; }
    [[nodiscard]] double first_bin_range() const noexcept { return first_bin_range_; }
    [[nodiscard]] double bin_spacing() const noexcept { return bin_spacing_; }
    [[nodiscard]] double pri() const noexcept { return pri_; }
    [[nodiscard]] double wavelength() const noexcept { return wavelength_; }

    [[nodiscard]] std::complex<float>& at(std::size_t m, std::size_t n, std::size_t b) {
        return samples_[(m * num_vpcs_ + n) * num_bins_ + b];
    }
    [[nodiscard]] const std::complex<float>& at(std::size_t m, std::size_t n,
                                                std::size_t b) const {
        return samples_[(m * num_vpcs_ + n) * num_bins_ + b];
    }
    [[nodiscard]] std::span<const std::complex<float>> profile(std::size_t m,
                                                               std::size_t n) const {
        return {samples_.data() + (m * num_vpcs_ + n) * num_bins_, num_bins_};
    }
    [[nodiscard]] std::span<std::complex<float>> profile(std::size_t m, std::size_t n) {
        return {samples_.data() + (m * num_vpcs_ + n) * num_bins_, num_bins_};
    }
    [[nodiscard]] std::span<const std::complex<float>> samples() const noexcept {
        return samples_;
    }
    [[nodiscard]] std::span<std::complex<float>> samples() noexcept { return samples_; }

    /// Sample-wise sum; metadata must match.
    DataCube& operator+=(const DataCube& other);

private:
    std::size_t num_bins_;
    std::size_t num_vpcs_;
    std::size_t num_pulses_;
    double first_bin_range_;
    double bin_spacing_;
    double pri_;
    double wavelength_;
    std::vector<std::complex<float>> samples_;
};

/// sin(pi x) / (pi x), with sinc(0) = 1.
double sinc(double x) noexcept;

/// Coherent sum over scatterers of
///   alpha * sinc((r_b - R) / rho_r) * exp(-j 4 pi R / lambda)
/// with R the exact VPC-to-scatterer distance, plus white noise.
/// Deterministic for a given noise seed regardless of `threads`.
DataCube simulate_range_compressed(const Scene& scene, const Trajectory& traj,
                                   const ArrayConfig& arr, const RadarConfig& radar,
                                   unsigned threads = 0);

/// Navigation track reported with a constant velocity error: v_nav = v + dv.
Trajectory apply_velocity_error(const Trajectory& traj, const Vec3& dv);

}  // namespace sarmoco
