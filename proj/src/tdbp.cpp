#include "sarmoco/tdbp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fast_trig.hpp"
#include "parallel.hpp"

namespace sarmoco {

SarImage::SarImage(const GroundGrid& grid) : grid_(grid), pixels_(grid.size()) {}

SarImage::SarImage(const GroundGrid& grid, std::vector<std::complex<float>> pixels)
    : grid_(grid), pixels_(std::move(pixels)) {
    if (pixels_.size() != grid_.size())
        throw std::invalid_argument("image pixel count does not match grid");
}

ImageStack::ImageStack(const GroundGrid& grid, std::vector<double> tau)
    : clipped_lookups(tau.size(), 0), grid_(grid), tau_(std::move(tau)) {
    if (tau_.empty()) throw std::invalid_argument("image stack needs at least one pulse");
    data_.assign(tau_.size() * grid_.size(), {0.0f, 0.0f});
}

std::vector<std::complex<double>> ImageStack::series(std::size_t iy, std::size_t ix) const {
    if (iy >= grid_.ny() || ix >= grid_.nx()) throw std::out_of_range("pixel outside grid");
    std::vector<std::complex<double>> out(pulses());
    for (std::size_t m = 0; m < pulses(); ++m) out[m] = std::complex<double>(at(m, iy, ix));
    return out;
}

namespace {

void check_inputs(const DataCube& cube, const Trajectory& nav, const ArrayConfig& arr,
                  const RadarConfig& radar) {
    arr.validate();
    if (cube.num_vpcs() != arr.count) throw std::invalid_argument("cube VPC count != array size");
    if (cube.num_pulses() != nav.pulses())
        throw std::invalid_argument("cube pulse count != trajectory pulse count");
    if (std::abs(cube.wavelength() - radar.wavelength) > 1e-12 * radar.wavelength)
        throw std::invalid_argument("cube wavelength != radar wavelength");
}

constexpr int kSincHalfTaps = 4;

struct LinearTaps {
    static bool read(const std::complex<float>* profile, std::size_t size, double f, double& re,
                     double& im) {
        std::size_t i = static_cast<std::size_t>(f);
        if (i >= size - 1) i = size - 2;
        const double w = f - double(i);
        const double are = profile[i].real(), aim = profile[i].imag();
        re = are + w * (double(profile[i + 1].real()) - are);
        im = aim + w * (double(profile[i + 1].imag()) - aim);
        return true;
    }
};

struct SincTaps {
    static bool read(const std::complex<float>* profile, std::size_t size, double f, double& re,
                     double& im) {
        const auto base = static_cast<std::ptrdiff_t>(std::floor(f));
        re = 0.0;
        im = 0.0;
        for (std::ptrdiff_t k = base - kSincHalfTaps + 1; k <= base + kSincHalfTaps; ++k) {
            if (k < 0 || k >= static_cast<std::ptrdiff_t>(size)) continue;
            const double w = sinc(f - double(k));
            re += w * profile[std::size_t(k)].real();
            im += w * profile[std::size_t(k)].imag();
        }
        return true;
    }
};

// Sum over VPCs for one point; vx holds VPC x coordinates and ryz2 the
// squared y/z distances from the point to each VPC.
template <typename Taps>
inline std::complex<float> accumulate_point(const std::vector<const std::complex<float>*>& profiles,
                                            std::size_t bins, double px, const double* vx,
                                            const double* ryz2, std::size_t count, double k,
                                            double first, double inv_dr, double last,
                                            std::size_t& clipped) {
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t n = 0; n < count; ++n) {
        const double ddx = px - vx[n];
        const double r = std::sqrt(ddx * ddx + ryz2[n]);
        const double f = (r - first) * inv_dr;
        if (!(f >= 0.0) || f > last) {
            ++clipped;
            continue;
        }
        double s_re, s_im;
        Taps::read(profiles[n], bins, f, s_re, s_im);
        double sn, c;
        detail::sincos(k * r, sn, c);
        acc_re += s_re * c - s_im * sn;
        acc_im += s_re * sn + s_im * c;
    }
    return {float(acc_re), float(acc_im)};
}

// One image row of one pulse. Lookups at fractional bin f outside
// [0, bins - 1] contribute nothing and are counted.
template <typename Taps>
std::size_t backproject_row(const std::vector<const std::complex<float>*>& profiles,
                            std::size_t bins, const std::vector<Vec3>& vpcs, const GroundGrid& grid,
                            std::size_t iy, double k, double first, double inv_dr,
                            std::complex<float>* out) {
    const std::size_t count = vpcs.size();
    std::vector<double> vx(count), ryz2(count);
    const double py = grid.y(iy);
    const double pz = grid.height();
    for (std::size_t n = 0; n < count; ++n) {
        vx[n] = vpcs[n].x;
        const double ddy = py - vpcs[n].y;
        const double ddz = pz - vpcs[n].z;
        ryz2[n] = ddy * ddy + ddz * ddz;
    }
    const double last = double(bins - 1);
    std::size_t clipped = 0;
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
        out[ix] = accumulate_point<Taps>(profiles, bins, grid.x(ix), vx.data(), ryz2.data(), count,
                                         k, first, inv_dr, last, clipped);
    }
    return clipped;
}

// Shared kernel for one pulse: every focusing path goes through here so that
// pixel values are identical whichever entry point is used.
std::size_t backproject_into(const DataCube& cube, const Trajectory& nav, const ArrayConfig& arr,
                             const GroundGrid& grid, std::size_t m, double wavelength,
                             const FocusOptions& opts, std::span<std::complex<float>> out) {
    const auto vpcs = vpc_positions(nav, arr, m);
    const double k = 4.0 * std::numbers::pi / wavelength;
    const double first = cube.first_bin_range();
    const double inv_dr = 1.0 / cube.bin_spacing();
    const std::size_t nx = grid.nx();
    const std::size_t bins = cube.num_bins();

    std::vector<const std::complex<float>*> profiles;
    profiles.reserve(arr.count);
    for (std::size_t n = 0; n < arr.count; ++n) profiles.push_back(cube.profile(m, n).data());

    std::vector<std::size_t> clipped_per_row(grid.ny(), 0);
    detail::parallel_for(grid.ny(), opts.threads, [&](std::size_t row_begin, std::size_t row_end) {
        for (std::size_t iy = row_begin; iy < row_end; ++iy) {
            std::complex<float>* row = out.data() + iy * nx;
            clipped_per_row[iy] =
                opts.interpolator == RangeInterpolator::linear
                    ? backproject_row<LinearTaps>(profiles, bins, vpcs, grid, iy, k, first, inv_dr, row)
                    : backproject_row<SincTaps>(profiles, bins, vpcs, grid, iy, k, first, inv_dr, row);
        }
    });
    std::size_t total = 0;
    for (auto c : clipped_per_row) total += c;
    return total;
}

template <typename Taps>
std::size_t backproject_points_pulse(const std::vector<const std::complex<float>*>& profiles,
                                     std::size_t bins, const std::vector<Vec3>& vpcs,
                                     std::span<const Vec3> points, double k, double first,
                                     double inv_dr, std::complex<float>* out) {
    const std::size_t count = vpcs.size();
    std::vector<double> vx(count), ryz2(count);
    for (std::size_t n = 0; n < count; ++n) vx[n] = vpcs[n].x;
    const double last = double(bins - 1);
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t n = 0; n < count; ++n) {
            const double ddy = points[i].y - vpcs[n].y;
            const double ddz = points[i].z - vpcs[n].z;
            ryz2[n] = ddy * ddy + ddz * ddz;
        }
        out[i] = accumulate_point<Taps>(profiles, bins, points[i].x, vx.data(), ryz2.data(), count,
                                        k, first, inv_dr, last, clipped);
    }
    return clipped;
}

}  // namespace

PointHistories backproject_points(const DataCube& cube, const Trajectory& nav,
                                  const ArrayConfig& arr, std::span<const Vec3> points,
                                  const RadarConfig& radar, const FocusOptions& opts) {
    check_inputs(cube, nav, arr, radar);
    PointHistories h;
    h.points = points.size();
    h.pulses = nav.pulses();
    h.values.assign(h.points * h.pulses, {0.0f, 0.0f});
    if (points.empty()) return h;
    const double k = 4.0 * std::numbers::pi / radar.wavelength;
    const double first = cube.first_bin_range();
    const double inv_dr = 1.0 / cube.bin_spacing();
    const std::size_t bins = cube.num_bins();
    std::vector<std::size_t> clipped(h.pulses, 0);
    detail::parallel_for(h.pulses, opts.threads, [&](std::size_t begin, std::size_t end) {
        std::vector<const std::complex<float>*> profiles(arr.count);
        for (std::size_t m = begin; m < end; ++m) {
            const auto vpcs = vpc_positions(nav, arr, m);
            for (std::size_t n = 0; n < arr.count; ++n) profiles[n] = cube.profile(m, n).data();
            std::complex<float>* out = h.values.data() + m * h.points;
            clipped[m] = opts.interpolator == RangeInterpolator::linear
                             ? backproject_points_pulse<LinearTaps>(profiles, bins, vpcs, points, k,
                                                                    first, inv_dr, out)
                             : backproject_points_pulse<SincTaps>(profiles, bins, vpcs, points, k,
                                                                  first, inv_dr, out);
        }
    });
    for (auto c : clipped) h.clipped_lookups += c;
    return h;
}

PulseImage backproject_pulse(const DataCube& cube, const Trajectory& nav, const ArrayConfig& arr,
                             const GroundGrid& grid, std::size_t m, const RadarConfig& radar,
                             const FocusOptions& opts) {
    check_inputs(cube, nav, arr, radar);
    if (m >= nav.pulses()) throw std::out_of_range("pulse index out of range");
    PulseImage img;
    img.pixels.assign(grid.size(), {0.0f, 0.0f});
    img.clipped_lookups = backproject_into(cube, nav, arr, grid, m, radar.wavelength, opts,
                                           img.pixels);
    return img;
}

ImageStack backproject_stack(const DataCube& cube, const Trajectory& nav, const ArrayConfig& arr,
                             const GroundGrid& grid, const RadarConfig& radar,
                             const FocusOptions& opts) {
    check_inputs(cube, nav, arr, radar);
    ImageStack stack(grid, nav.slow_time_axis());
    for (std::size_t m = 0; m < nav.pulses(); ++m) {
        stack.clipped_lookups[m] =
            backproject_into(cube, nav, arr, grid, m, radar.wavelength, opts, stack.image(m));
    }
    return stack;
}

SarImage coherent_sum(const ImageStack& stack, std::span<const double> weights) {
    if (!weights.empty() && weights.size() != stack.pulses())
        throw std::invalid_argument("slow-time weights do not match pulse count");
    const std::size_t npix = stack.grid().size();
    std::vector<std::complex<double>> acc(npix);
    for (std::size_t m = 0; m < stack.pulses(); ++m) {
        const auto img = stack.image(m);
        const double w = weights.empty() ? 1.0 : weights[m];
        for (std::size_t p = 0; p < npix; ++p) acc[p] += w * std::complex<double>(img[p]);
    }
    SarImage out(stack.grid());
    auto px = out.pixels();
    for (std::size_t p = 0; p < npix; ++p) px[p] = std::complex<float>(acc[p]);
    return out;
}

SarImage focus_image(const DataCube& cube, const Trajectory& nav, const ArrayConfig& arr,
                     const GroundGrid& grid, const RadarConfig& radar, const FocusOptions& opts) {
    check_inputs(cube, nav, arr, radar);
    const std::size_t npix = grid.size();
    std::vector<std::complex<float>> pulse(npix);
    std::vector<std::complex<double>> acc(npix);
    for (std::size_t m = 0; m < nav.pulses(); ++m) {
        backproject_into(cube, nav, arr, grid, m, radar.wavelength, opts, pulse);
        for (std::size_t p = 0; p < npix; ++p) acc[p] += 1.0 * std::complex<double>(pulse[p]);
    }
    SarImage out(grid);
    auto px = out.pixels();
    for (std::size_t p = 0; p < npix; ++p) px[p] = std::complex<float>(acc[p]);
    return out;
}

}  // namespace sarmoco
