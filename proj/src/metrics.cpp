#include "sarmoco/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace sarmoco {

PixelIndex peak_pixel(const SarImage& img) {
    const auto px = img.pixels();
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < px.size(); ++i) {
        const double m = std::abs(std::complex<double>(px[i]));
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    return {best / img.grid().nx(), best % img.grid().nx()};
}

double impulse_response_width(const SarImage& img, PixelIndex peak, Axis axis) {
    const auto& g = img.grid();
    if (peak.row >= g.ny() || peak.col >= g.nx()) throw std::out_of_range("peak outside grid");
    const std::size_t len = axis == Axis::x ? g.nx() : g.ny();
    const std::size_t pos = axis == Axis::x ? peak.col : peak.row;
    const double spacing = axis == Axis::x ? g.dx() : g.dy();
    if (pos == 0 || pos + 1 >= len) throw std::invalid_argument("peak lies on the grid boundary");

    const auto mag = [&](std::size_t i) {
        const auto& v = axis == Axis::x ? img.at(peak.row, i) : img.at(i, peak.col);
        return std::abs(std::complex<double>(v));
    };
    const double top = mag(pos);
    if (!(top > 0.0) || mag(pos - 1) > top || mag(pos + 1) > top)
        throw std::invalid_argument("peak is not a local maximum");
    const double level = top / std::sqrt(2.0);

    // Walk outwards until the cut drops below -3 dB, then interpolate.
    const auto crossing = [&](int dir) {
        std::size_t i = pos;
        while (true) {
            const auto next = std::ptrdiff_t(i) + dir;
            if (next < 0 || next >= std::ptrdiff_t(len))
                throw std::invalid_argument("-3 dB width not bracketed within the grid");
            const double a = mag(i);
            const double b = mag(std::size_t(next));
            if (b < level) {
                const double t = (a - level) / (a - b);
                return (double(i) + dir * t) * spacing;
            }
            i = std::size_t(next);
        }
    };
    return crossing(+1) - crossing(-1);
}

double image_entropy(const SarImage& img) {
    double total = 0.0;
    for (const auto& v : img.pixels()) total += std::norm(std::complex<double>(v));
    if (!(total > 0.0)) throw std::invalid_argument("entropy of an all-zero image");
    double h = 0.0;
    for (const auto& v : img.pixels()) {
        const double p = std::norm(std::complex<double>(v)) / total;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h < 0.0 ? 0.0 : h;
}

double image_contrast(const SarImage& img) {
    const auto px = img.pixels();
    double sum = 0.0, sum2 = 0.0;
    for (const auto& v : px) {
        const double m = std::abs(std::complex<double>(v));
        sum += m;
        sum2 += m * m;
    }
    const double n = double(px.size());
    const double mean = sum / n;
    if (!(mean > 0.0)) return 0.0;
    const double var = std::max(sum2 / n - mean * mean, 0.0);
    return std::sqrt(var) / mean;
}

FocusMetrics focus_metrics(const SarImage& img) {
    FocusMetrics fm;
    fm.peak = peak_pixel(img);
    fm.peak_magnitude = std::abs(std::complex<double>(img.at(fm.peak.row, fm.peak.col)));
    try {
        fm.width_x = impulse_response_width(img, fm.peak, Axis::x);
    } catch (const std::invalid_argument&) {
    }
    try {
        fm.width_y = impulse_response_width(img, fm.peak, Axis::y);
    } catch (const std::invalid_argument&) {
    }
    fm.entropy = image_entropy(img);
    fm.contrast = image_contrast(img);
    return fm;
}

std::vector<LocalizationResult> localization_error(const SarImage& img,
                                                   std::span<const Scatterer> truth,
                                                   double capture_radius) {
    const auto& g = img.grid();
    std::vector<LocalizationResult> out;
    out.reserve(truth.size());
    const auto reach = static_cast<std::ptrdiff_t>(std::floor(capture_radius));
    const auto inside = [&](std::ptrdiff_t yy, std::ptrdiff_t xx) {
        return yy >= 0 && xx >= 0 && yy < std::ptrdiff_t(g.ny()) && xx < std::ptrdiff_t(g.nx());
    };
    const auto mag = [&](std::ptrdiff_t yy, std::ptrdiff_t xx) {
        return std::abs(std::complex<double>(img.at(std::size_t(yy), std::size_t(xx))));
    };
    for (std::size_t s = 0; s < truth.size(); ++s) {
        LocalizationResult res;
        res.scatterer = s;
        const Vec3& p = truth[s].position;
        const double fx = (p.x - g.x_min()) / g.dx();
        const double fy = (p.y - g.y_min()) / g.dy();
        const auto cx = static_cast<std::ptrdiff_t>(std::llround(fx));
        const auto cy = static_cast<std::ptrdiff_t>(std::llround(fy));
        if (!inside(cy, cx)) {
            out.push_back(res);
            continue;
        }
        double best = -1.0;
        std::ptrdiff_t by = cy, bx = cx;
        for (std::ptrdiff_t dy = -reach; dy <= reach; ++dy) {
            for (std::ptrdiff_t dx = -reach; dx <= reach; ++dx) {
                if (double(dx * dx + dy * dy) > capture_radius * capture_radius) continue;
                const auto yy = cy + dy, xx = cx + dx;
                if (!inside(yy, xx)) continue;
                const double m = mag(yy, xx);
                if (m > best) {
                    best = m;
                    by = yy;
                    bx = xx;
                }
            }
        }
        // The window maximum only counts as a peak if it is a local maximum of
        // the whole image; otherwise the response peaks outside the capture radius.
        bool is_peak = best > 0.0;
        for (std::ptrdiff_t dy = -1; dy <= 1 && is_peak; ++dy) {
            for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
                if (inside(by + dy, bx + dx) && mag(by + dy, bx + dx) > best) {
                    is_peak = false;
                    break;
                }
            }
        }
        if (is_peak) {
            res.detected = true;
            res.peak = {std::size_t(by), std::size_t(bx)};
            res.error = (g.pixel(res.peak.row, res.peak.col) - p).norm();
        }
        out.push_back(res);
    }
    return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 points");
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: degenerate abscissa");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace sarmoco
