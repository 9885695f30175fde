#include "sarmoco/signal_sim.hpp"

#include <numbers>
#include <random>
#include <stdexcept>

#include "parallel.hpp"

namespace sarmoco {

void Scene::validate() const {
    for (const auto& s : scatterers) {
        if (!s.position.is_finite() || !s.velocity.is_finite())
            throw std::invalid_argument("scatterer position/velocity must be finite");
        if (!(std::abs(s.reflectivity) > 0.0) || !std::isfinite(std::abs(s.reflectivity)))
            throw std::invalid_argument("scatterer reflectivity must be non-zero and finite");
    }
    if (!(noise.power >= 0.0) || !std::isfinite(noise.power))
        throw std::invalid_argument("noise power must be >= 0");
}

void RadarConfig::validate() const {
    if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
    if (!(range_resolution > 0.0)) throw std::invalid_argument("range resolution must be > 0");
    if (!(bin_spacing > 0.0)) throw std::invalid_argument("bin spacing must be > 0");
    if (bin_spacing > 0.5 * range_resolution * (1.0 + 1e-12))
        throw std::invalid_argument("bin spacing must not exceed half the range resolution");
    if (num_bins < 2) throw std::invalid_argument("need at least two range bins");
    if (!(pri > 0.0)) throw std::invalid_argument("PRI must be > 0");
    if (!(nav_accuracy > 0.0)) throw std::invalid_argument("nav accuracy must be > 0");
    if (!std::isfinite(first_bin_range)) throw std::invalid_argument("first bin range not finite");
}

DataCube::DataCube(std::size_t num_bins, std::size_t num_vpcs, std::size_t num_pulses,
                   double first_bin_range, double bin_spacing, double pri, double wavelength)
    : num_bins_(num_bins),
      num_vpcs_(num_vpcs),
      num_pulses_(num_pulses),
      first_bin_range_(first_bin_range),
      bin_spacing_(bin_spacing),
      pri_(pri),
      wavelength_(wavelength) {
    if (num_bins_ == 0 || num_vpcs_ == 0 || num_pulses_ == 0)
        throw std::invalid_argument("data cube dimensions must be non-zero");
    if (!(bin_spacing_ > 0.0) || !(pri_ > 0.0) || !(wavelength_ > 0.0))
        throw std::invalid_argument("data cube axis metadata must be positive");
    samples_.assign(num_bins_ * num_vpcs_ * num_pulses_, {0.0f, 0.0f});
}

DataCube& DataCube::operator+=(const DataCube& other) {
    if (other.num_bins_ != num_bins_ || other.num_vpcs_ != num_vpcs_ ||
        other.num_pulses_ != num_pulses_ || other.first_bin_range_ != first_bin_range_ ||
        other.bin_spacing_ != bin_spacing_)
        throw std::invalid_argument("data cube dimensions differ");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
    return *this;
}

double sinc(double x) noexcept {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

DataCube simulate_range_compressed(const Scene& scene, const Trajectory& traj,
                                   const ArrayConfig& arr, const RadarConfig& radar,
                                   unsigned threads) {
    scene.validate();
    arr.validate();
    radar.validate();
    if (std::abs(traj.pri() - radar.pri) > 1e-12 * radar.pri)
        throw std::invalid_argument("trajectory PRI differs from radar PRI");

    DataCube cube(radar.num_bins, arr.count, traj.pulses(), radar.first_bin_range,
                  radar.bin_spacing, radar.pri, radar.wavelength);
    const double k = 4.0 * std::numbers::pi / radar.wavelength;
    const std::size_t bins = radar.num_bins;

    detail::parallel_for(traj.pulses(), threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::complex<double>> acc(bins);
        for (std::size_t m = begin; m < end; ++m) {
            const double tau = traj.slow_time(m);
            const auto vpcs = vpc_positions(traj, arr, m);
            // Per-pulse stream so the noise is independent of the worker layout.
            std::seed_seq seq{std::uint64_t(scene.noise.seed), std::uint64_t(m)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * scene.noise.power));

            for (std::size_t n = 0; n < arr.count; ++n) {
                std::fill(acc.begin(), acc.end(), std::complex<double>{});
                for (const auto& s : scene.scatterers) {
                    const Vec3 target = s.position + s.velocity * tau;
                    const double range = (target - vpcs[n]).norm();
                    const std::complex<double> carrier =
                        s.reflectivity * std::polar(1.0, -k * range);
                    for (std::size_t b = 0; b < bins; ++b) {
                        acc[b] += carrier * sinc((radar.bin_range(b) - range) /
                                                 radar.range_resolution);
                    }
                }
                auto out = cube.profile(m, n);
                for (std::size_t b = 0; b < bins; ++b) {
                    std::complex<double> v = acc[b];
                    if (scene.noise.power > 0.0) {
                        const double re = gauss(rng);
                        const double im = gauss(rng);
                        v += std::complex<double>(re, im);
                    }
                    out[b] = std::complex<float>(v);
                }
            }
        }
    });
    return cube;
}

Trajectory apply_velocity_error(const Trajectory& traj, const Vec3& dv) {
    return Trajectory(traj.reference_position(), traj.velocity() + dv, traj.pulses(), traj.pri());
}

}  // namespace sarmoco
