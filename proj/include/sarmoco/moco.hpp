#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sarmoco/geometry.hpp"
#include "sarmoco/signal_sim.hpp"
#include "sarmoco/tdbp.hpp"

namespace sarmoco {

/// Real-valued image on a ground grid, row-major (iy, ix).
struct AmplitudeImage {
    GroundGrid grid;
    std::vector<double> values;

    [[nodiscard]] double at(std::size_t iy, std::size_t ix) const {
        return values[iy * grid.nx() + ix];
    }
};

/// Ground control point: a bright, stable pixel used as a phase reference.
struct Gcp {
    std::size_t row = 0;  ///< grid y index
    std::size_t col = 0;  ///< grid x index
    Vec3 position{};
    double amplitude = 0.0;   ///< incoherent-mean amplitude
    double omega = 0.0;       ///< residual angular Doppler, rad/s
    double prominence = 0.0;  ///< spectral peak over median spectrum magnitude
    double weight = 0.0;
    bool outlier = false;
};

enum class Weighting { amplitude, prominence, uniform };

/// Peak location refinement for the slow-time spectrum.
enum class PeakMode {
    parabolic,  ///< 3-point parabola on log-magnitude around the FFT maximum
    raw,        ///< FFT bin of the maximum
};

struct FrequencyEstimate {
    double omega = 0.0;  ///< rad/s; exp(-j w0 tau) yields +w0
    double prominence = 0.0;
};

struct WlsOptions {
    bool drop_z = true;
    bool drop_y = false;
    Weighting weighting = Weighting::amplitude;
    /// Largest accepted condition number of K^T W K.
    double max_condition = 1e8;
};

struct MocoReport {
    Vec3 delta_v{};   ///< estimated residual velocity; dropped components are 0
    Vec3 accuracy{};  ///< 1-sigma per component; dropped components are 0
    bool z_dropped = true;
    bool y_dropped = false;
    double condition_number = 0.0;
    std::size_t gcps_used = 0;
    std::vector<Gcp> gcps;
    /// Cumulative estimate after each pass, first pass included.
    std::vector<Vec3> history;
};

/// Per-pixel, per-pulse phase correction -(k(x) . dv) tau_m. Stored as the
/// per-pixel rate k(x) . dv together with the slow-time axis.
class PhaseScreenSet {
public:
    PhaseScreenSet(const GroundGrid& grid, std::vector<double> tau, std::vector<double> rates);

    [[nodiscard]] const GroundGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<double>& tau() const noexcept { return tau_; }
    [[nodiscard]] std::size_t pulses() const noexcept { return tau_.size(); }
    /// k(x) . dv for pixel (iy, ix), rad/s.
    [[nodiscard]] double rate(std::size_t iy, std::size_t ix) const {
        return rates_[iy * grid_.nx() + ix];
    }
    [[nodiscard]] double at(std::size_t m, std::size_t iy, std::size_t ix) const {
        return -rate(iy, ix) * tau_[m];
    }

private:
    GroundGrid grid_;
    std::vector<double> tau_;
    std::vector<double> rates_;
};

/// Re-estimation passes on a navigation track corrected by the running
/// estimate. Each pass re-localizes every GCP off the grid, on a small polar
/// patch around it, and solves for the remaining velocity error.
struct RefineOptions {
    std::size_t iterations = 6;  ///< extra passes; 0 keeps the single-pass estimate
    double half_width = 1.0;     ///< m, azimuthal search either side of the GCP
    double tolerance = 1e-3;     ///< m/s; stop once every component of a pass is below
};

struct MocoOptions {
    std::size_t gcp_count = 25;
    std::size_t min_separation = 20;  ///< pixels, Chebyshev distance
    std::size_t pad_factor = 8;
    PeakMode peak_mode = PeakMode::parabolic;
    double margin = 1.5;
    WlsOptions wls{};
    RefineOptions refine{};
    unsigned threads = 0;
};

/// Pixel-wise mean of |I_m| over the stack.
AmplitudeImage incoherent_mean(const ImageStack& stack);

/// Greedy pick of the brightest local maxima, at least `min_separation`
/// pixels apart (Chebyshev). Ties resolve by (row, col).
std::vector<Gcp> select_gcp(const AmplitudeImage& amp, std::size_t count,
                            std::size_t min_separation);

/// Dominant angular frequency of a uniformly sampled slow-time series.
FrequencyEstimate estimate_frequency(std::span<const std::complex<double>> series, double pri,
                                     std::size_t pad_factor, PeakMode mode = PeakMode::parabolic);

FrequencyEstimate estimate_gcp_frequency(const ImageStack& stack, const Gcp& gcp,
                                         std::size_t pad_factor,
                                         PeakMode mode = PeakMode::parabolic);

/// Largest plausible |omega| for a static scatterer: margin * (4 pi / lambda) * nav_accuracy.
double outlier_threshold(double nav_accuracy, double wavelength, double margin);

/// Flags GCPs whose residual Doppler exceeds outlier_threshold().
std::vector<Gcp> reject_outliers(std::vector<Gcp> gcps, double nav_accuracy, double wavelength,
                                 double margin);

/// Weighted least squares inversion of omega_i = k_i . dv over the non-outlier
/// GCPs, with k_i the wavevector from `aperture_center` to each GCP.
/// Throws NumericalError if the selected components are not observable.
MocoReport solve_wls(std::span<const Gcp> gcps, const Vec3& aperture_center, double wavelength,
                     const WlsOptions& opts = {});

PhaseScreenSet phase_screens(const GroundGrid& grid, const Vec3& delta_v,
                             std::span<const double> tau, double wavelength,
                             const Vec3& aperture_center);

/// I_m^c = I_m * exp(-j dpsi_m). Magnitudes are unchanged.
ImageStack compensate(const ImageStack& stack, const PhaseScreenSet& screens);
void compensate_in_place(ImageStack& stack, const PhaseScreenSet& screens, unsigned threads = 0);

/// Navigation track with the estimated residual velocity removed.
Trajectory integrate_residual_velocity(const Trajectory& nav, const Vec3& delta_v);

/// Doppler (Hz) of the range drift v_x tau dq / (r tan(theta)) caused by a
/// focusing-height mismatch dq, looking along the direction of motion.
double residual_doppler_height(double v_x, double range, double theta, double delta_q,
                               double wavelength);

/// Successive-difference unwrapped phase of a series (radians).
std::vector<double> unwrap_phase(std::span<const std::complex<double>> series);

std::vector<double> unwrap_gcp_phase(const ImageStack& stack, const Gcp& gcp);

/// Full estimation chain on a stack focused with `nav`: incoherent mean,
/// GCP selection, per-GCP Doppler, outlier rejection and WLS.
MocoReport estimate_residual_velocity(const ImageStack& stack, const Trajectory& nav,
                                      const ArrayConfig& arr, const RadarConfig& radar,
                                      const MocoOptions& opts = {});

/// Refinement passes starting from `initial` (see RefineOptions). The
/// returned report holds the cumulative velocity error and the diagnostics of
/// the last pass.
MocoReport refine_residual_velocity(const DataCube& cube, const Trajectory& nav,
                                    const ArrayConfig& arr, const RadarConfig& radar,
                                    const GroundGrid& grid, const MocoReport& initial,
                                    const MocoOptions& opts, const FocusOptions& focus = {});

std::string to_string(Weighting w);
std::string to_string(PeakMode p);

}  // namespace sarmoco
