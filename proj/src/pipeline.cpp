#include "sarmoco/pipeline.hpp"

#include <cmath>

#include "sarmoco/errors.hpp"
#include "sarmoco/io.hpp"

namespace sarmoco {

namespace {

void check_cube(const DataCube& cube, const RunConfig& cfg) {
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); };
    if (cube.num_vpcs() != cfg.array.count || cube.num_pulses() != cfg.pulses)
        throw ConfigError("cube dimensions do not match the configuration");
    if (!close(cube.pri(), cfg.radar.pri) || !close(cube.wavelength(), cfg.radar.wavelength))
        throw ConfigError("cube PRI or wavelength does not match the configuration");
}

// Range-axis description of the cube; the radar block only matters through it.
RadarConfig cube_radar(const DataCube& cube, const RunConfig& cfg) {
    RadarConfig r = cfg.radar;
    r.first_bin_range = cube.first_bin_range();
    r.bin_spacing = cube.bin_spacing();
    r.num_bins = cube.num_bins();
    return r;
}

std::size_t total(const std::vector<std::size_t>& v) {
    std::size_t s = 0;
    for (auto x : v) s += x;
    return s;
}

}  // namespace

std::string to_string(FocusMode mode) {
    switch (mode) {
        case FocusMode::none: return "no-moco";
        case FocusMode::moco: return "moco";
        case FocusMode::oracle: return "oracle-moco";
        case FocusMode::exact: return "exact";
    }
    return "unknown";
}

DataCube simulate(const RunConfig& cfg) {
    return simulate_range_compressed(cfg.scene, cfg.trajectory(), cfg.array, cfg.radar,
                                     cfg.focus.threads);
}

FocusResult focus(const DataCube& cube, const RunConfig& cfg, FocusMode mode) {
    check_cube(cube, cfg);
    const RadarConfig radar = cube_radar(cube, cfg);
    const Trajectory nav = cfg.navigation();

    FocusResult out{mode, SarImage(cfg.grid), std::nullopt, {}, {}, 0};
    if (mode == FocusMode::none || mode == FocusMode::exact) {
        const Trajectory& track = mode == FocusMode::exact ? cfg.trajectory() : nav;
        ImageStack stack = backproject_stack(cube, track, cfg.array, cfg.grid, radar, cfg.focus);
        out.clipped_lookups = total(stack.clipped_lookups);
        out.image = coherent_sum(stack);
    } else {
        std::optional<ImageStack> stack =
            backproject_stack(cube, nav, cfg.array, cfg.grid, radar, cfg.focus);
        MocoReport report;
        if (mode == FocusMode::moco) {
            report = estimate_residual_velocity(*stack, nav, cfg.array, radar, cfg.moco);
            report = refine_residual_velocity(cube, nav, cfg.array, radar, cfg.grid, report,
                                              cfg.moco, cfg.focus);
        } else {
            report.delta_v = cfg.injected_delta_v;
            report.z_dropped = false;
            report.history.push_back(report.delta_v);
        }
        if (cfg.compensation == Compensation::phase) {
            out.clipped_lookups = total(stack->clipped_lookups);
            const auto screens = phase_screens(cfg.grid, report.delta_v, stack->tau(),
                                               radar.wavelength, aperture_center(nav, cfg.array));
            compensate_in_place(*stack, screens, cfg.focus.threads);
            out.image = coherent_sum(*stack);
        } else {
            stack.reset();
            const Trajectory corrected = integrate_residual_velocity(nav, report.delta_v);
            ImageStack refocused =
                backproject_stack(cube, corrected, cfg.array, cfg.grid, radar, cfg.focus);
            out.clipped_lookups = total(refocused.clipped_lookups);
            out.image = coherent_sum(refocused);
        }
        out.moco = std::move(report);
    }
    out.metrics = focus_metrics(out.image);
    out.localization = localization_error(out.image, cfg.scene.scatterers);
    return out;
}

std::optional<double> mean_localization_error(const std::vector<LocalizationResult>& loc) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& l : loc) {
        if (!l.detected) continue;
        sum += l.error;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / double(n);
}

nlohmann::json to_json(const FocusResult& result) {
    nlohmann::json loc = nlohmann::json::array();
    std::size_t detected = 0;
    for (const auto& l : result.localization) {
        loc.push_back({{"scatterer", l.scatterer},
                       {"detected", l.detected},
                       {"pixel", {l.peak.row, l.peak.col}},
                       {"error", l.detected ? nlohmann::json(l.error) : nlohmann::json(nullptr)}});
        if (l.detected) ++detected;
    }
    const auto mean = mean_localization_error(result.localization);
    return {
        {"format", "sarmoco-run"},
        {"version", 1},
        {"mode", to_string(result.mode)},
        {"moco", result.moco ? io::to_json(*result.moco) : nlohmann::json(nullptr)},
        {"focus", io::to_json(result.metrics, result.image.grid())},
        {"clipped_lookups", result.clipped_lookups},
        {"localization",
         {{"detected", detected},
          {"missed", result.localization.size() - detected},
          {"mean_error", mean ? nlohmann::json(*mean) : nlohmann::json(nullptr)},
          {"scatterers", loc}}},
    };
}

}  // namespace sarmoco
