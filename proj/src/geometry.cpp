#include "sarmoco/geometry.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace sarmoco {

namespace {

constexpr double kUnitTolerance = 1e-12;

}  // namespace

Trajectory::Trajectory(const Vec3& reference_position, const Vec3& velocity, std::size_t pulses,
                       double pri)
    : reference_position_(reference_position), velocity_(velocity), pulses_(pulses), pri_(pri) {
    if (pulses_ < 1) throw std::invalid_argument("trajectory needs at least one pulse");
    if (!(pri_ > 0.0) || !std::isfinite(pri_)) throw std::invalid_argument("PRI must be > 0");
    if (!reference_position_.is_finite() || !velocity_.is_finite())
        throw std::invalid_argument("trajectory position/velocity must be finite");
}

double Trajectory::slow_time(std::size_t m) const {
    if (m >= pulses_)
        throw std::out_of_range("pulse index " + std::to_string(m) + " out of range (M=" +
                                std::to_string(pulses_) + ")");
    return (double(m) - 0.5 * double(pulses_ - 1)) * pri_;
}

std::vector<double> Trajectory::slow_time_axis() const {
    std::vector<double> tau(pulses_);
    for (std::size_t m = 0; m < pulses_; ++m) tau[m] = slow_time(m);
    return tau;
}

void ArrayConfig::validate() const {
    if (count < 1) throw std::invalid_argument("array needs at least one VPC");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("VPC spacing must be > 0");
    if (!mounting_offset.is_finite()) throw std::invalid_argument("mounting offset not finite");
}

double ArrayConfig::element_offset(std::size_t n) const {
    if (n >= count)
        throw std::out_of_range("VPC index " + std::to_string(n) + " out of range (N=" +
                                std::to_string(count) + ")");
    return (double(n) - 0.5 * double(count - 1)) * spacing;
}

GroundGrid::GroundGrid(double x_min, double dx, std::size_t nx, double y_min, double dy,
                       std::size_t ny, double height)
    : x_min_(x_min), dx_(dx), nx_(nx), y_min_(y_min), dy_(dy), ny_(ny), height_(height) {
    if (!(dx_ > 0.0) || !(dy_ > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
    if (nx_ == 0 || ny_ == 0) throw std::invalid_argument("grid must not be empty");
    if (!std::isfinite(x_min_) || !std::isfinite(y_min_) || !std::isfinite(height_))
        throw std::invalid_argument("grid origin must be finite");
}

GroundGrid GroundGrid::from_extent(double x_min, double x_max, double dx, double y_min,
                                   double y_max, double dy, double height) {
    if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
    if (x_max < x_min || y_max < y_min) throw std::invalid_argument("grid extent is empty");
    // Small slack so that extents that are exact multiples of the spacing
    // include their end point despite rounding.
    const auto count = [](double lo, double hi, double d) {
        return static_cast<std::size_t>(std::floor((hi - lo) / d + 1e-9)) + 1;
    };
    return GroundGrid(x_min, dx, count(x_min, x_max, dx), y_min, dy, count(y_min, y_max, dy),
                      height);
}

std::vector<Vec3> vpc_positions(const Trajectory& traj, const ArrayConfig& arr, std::size_t m) {
    arr.validate();
    const Vec3 center = traj.position(traj.slow_time(m)) + arr.mounting_offset;
    std::vector<Vec3> out(arr.count);
    for (std::size_t n = 0; n < arr.count; ++n) {
        out[n] = center + Vec3{0.0, arr.element_offset(n), 0.0};
    }
    return out;
}

Vec3 aperture_center(const Trajectory& traj, const ArrayConfig& arr) {
    return traj.position(0.0) + arr.mounting_offset;
}

Vec3 unit_vector(const Vec3& origin, const Vec3& target) {
    const Vec3 d = target - origin;
    const double r = d.norm();
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("unit_vector: zero-length or non-finite separation");
    return d * (1.0 / r);
}

Vec3 wavevector(const Vec3& u, double wavelength) {
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw std::invalid_argument("wavelength must be > 0");
    if (!u.is_finite() || std::abs(u.norm() - 1.0) > kUnitTolerance)
        throw std::invalid_argument("wavevector: direction is not a unit vector");
    return u * (4.0 * std::numbers::pi / wavelength);
}

double range_history(std::size_t n, std::size_t m, const Vec3& target, const Trajectory& traj,
                     const ArrayConfig& arr, RangeMode mode) {
    const double tau = traj.slow_time(m);
    const double offset = arr.element_offset(n);
    if (mode == RangeMode::exact) {
        const Vec3 vpc = traj.position(tau) + arr.mounting_offset + Vec3{0.0, offset, 0.0};
        return (target - vpc).norm();
    }
    const Vec3 center = aperture_center(traj, arr);
    const double r0 = (target - center).norm();
    const Vec3 u = unit_vector(center, target);
    return r0 - u.dot(traj.velocity()) * tau - offset * u.y;
}

}  // namespace sarmoco
