#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sarmoco/signal_sim.hpp"
#include "sarmoco/tdbp.hpp"

namespace sarmoco {

enum class Axis { x, y };

struct PixelIndex {
    std::size_t row = 0;
    std::size_t col = 0;
    friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

struct FocusMetrics {
    double peak_magnitude = 0.0;
    PixelIndex peak{};
    std::optional<double> width_x;  ///< -3 dB width along x (m), if measurable
    std::optional<double> width_y;
    double entropy = 0.0;
    double contrast = 0.0;  ///< std / mean of the magnitude
};

/// Pixel with the largest magnitude (first in row-major order on ties).
PixelIndex peak_pixel(const SarImage& img);

/// Linearly interpolated -3 dB width (m) of the magnitude cut through `peak`
/// along `axis`. Throws if the peak is on the grid boundary or the width is
/// not bracketed inside the grid.
double impulse_response_width(const SarImage& img, PixelIndex peak, Axis axis);

/// Shannon entropy (natural log) of p_i = |I_i|^2 / sum |I|^2.
double image_entropy(const SarImage& img);

double image_contrast(const SarImage& img);

FocusMetrics focus_metrics(const SarImage& img);

struct LocalizationResult {
    std::size_t scatterer = 0;
    bool detected = false;
    PixelIndex peak{};
    double error = 0.0;  ///< m, distance from the scatterer to its image peak
};

/// Associates each scatterer with the brightest pixel within `capture_radius`
/// grid spacings of its nearest pixel. A scatterer is a miss when it falls
/// outside the grid or that pixel is not a local maximum of the image.
std::vector<LocalizationResult> localization_error(const SarImage& img,
                                                   std::span<const Scatterer> truth,
                                                   double capture_radius = 10.0);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares line y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace sarmoco
