#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace sarmoco {

/// Cartesian vector in the local frame: x along the direction of motion,
/// y cross-track (left), z up. Used for positions (m), velocities (m/s)
/// and wavevectors (rad/m).
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3& operator+=(const Vec3& o) noexcept {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) noexcept {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3& operator*=(double s) noexcept {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) noexcept { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) noexcept { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3& a) noexcept { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return a *= s; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

    [[nodiscard]] constexpr double dot(const Vec3& o) const noexcept {
        return x * o.x + y * o.y + z * o.z;
    }
    [[nodiscard]] double norm() const noexcept { return std::sqrt(dot(*this)); }
    [[nodiscard]] bool is_finite() const noexcept {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

/// Constant-velocity platform track. Pulse m is fired at slow time
/// tau_m = (m - (M-1)/2) * PRI so that tau = 0 is the aperture center.
class Trajectory {
public:
    Trajectory(const Vec3& reference_position, const Vec3& velocity, std::size_t pulses,
               double pri);

    [[nodiscard]] const Vec3& reference_position() const noexcept { return reference_position_; }
    [[nodiscard]] const Vec3& velocity() const noexcept { return velocity_; }
    [[nodiscard]] std::size_t pulses() const noexcept { return pulses_; }
    [[nodiscard]] double pri() const noexcept { return pri_; }

    [[nodiscard]] double slow_time(std::size_t m) const;
    [[nodiscard]] std::vector<double> slow_time_axis() const;
    [[nodiscard]] Vec3 position(double tau) const noexcept {
        return reference_position_ + velocity_ * tau;
    }

private:
    Vec3 reference_position_;
    Vec3 velocity_;
    std::size_t pulses_;
    double pri_;
};

/// Uniform linear virtual array along y, indices centered on the array middle.
struct ArrayConfig {
    std::size_t count = 8;
    double spacing = 0.001;
    Vec3 mounting_offset{};

    void validate() const;
    /// Signed y offset of VPC n: (n - (N-1)/2) * spacing.
    [[nodiscard]] double element_offset(std::size_t n) const;
};

/// Regular (x, y) grid of pixels, all at the focusing height.
/// Pixel (iy, ix) sits at (x_min + ix*dx, y_min + iy*dy, height).
class GroundGrid {
public:
    GroundGrid(double x_min, double dx, std::size_t nx, double y_min, double dy, std::size_t ny,
               double height);

    /// Grid covering [x_min, x_max] x [y_min, y_max] inclusive of the start edges.
    static GroundGrid from_extent(double x_min, double x_max, double dx, double y_min,
                                  double y_max, double dy, double height);

    [[nodiscard]] double x_min() const noexcept { return x_min_; }
    [[nodiscard]] double dx() const noexcept { return dx_; }
    [[nodiscard]] std::size_t nx() const noexcept { return nx_; }
    [[nodiscard]] double y_min() const noexcept { return y_min_; }
    [[nodiscard]] double dy() const noexcept { return dy_; }
    [[nodiscard]] std::size_t ny() const noexcept { return ny_; }
    [[nodiscard]] double height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return nx_ * ny_; }

    [[nodiscard]] double x(std::size_t ix) const noexcept { return x_min_ + dx_ * double(ix); }
    [[nodiscard]] double y(std::size_t iy) const noexcept { return y_min_ + dy_ * double(iy); }
    [[nodiscard]] Vec3 pixel(std::size_t iy, std::size_t ix) const noexcept {
        return {x(ix), y(iy), height_};
    }

    friend bool operator==(const GroundGrid&, const GroundGrid&) = default;

private:
    double x_min_;
    double dx_;
    std::size_t nx_;
    double y_min_;
    double dy_;
    std::size_t ny_;
    double height_;
};

enum class RangeMode { exact, plane_wave };

/// Positions of all N virtual phase centers at pulse m.
std::vector<Vec3> vpc_positions(const Trajectory& traj, const ArrayConfig& arr, std::size_t m);

/// Array center at tau = 0; the linearization point for look directions.
Vec3 aperture_center(const Trajectory& traj, const ArrayConfig& arr);

/// Unit line-of-sight vector from `origin` towards `target`.
Vec3 unit_vector(const Vec3& origin, const Vec3& target);

/// (4 pi / lambda) * u, the two-way wavevector along u.
Vec3 wavevector(const Vec3& u, double wavelength);

/// Distance from VPC n at pulse m to `target`.
///
/// `exact` is the Euclidean distance. `plane_wave` is the far-field
/// linearization r0 - (u . v) tau - c_n dy u_y around the aperture center,
/// with c_n the centered element index.
double range_history(std::size_t n, std::size_t m, const Vec3& target, const Trajectory& traj,
                     const ArrayConfig& arr, RangeMode mode);

}  // namespace sarmoco
