#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>

#include "sarmoco/geometry.hpp"
#include "sarmoco/moco.hpp"
#include "sarmoco/signal_sim.hpp"
#include "sarmoco/tdbp.hpp"

namespace sarmoco {

/// Procedural scene: a rows x cols lattice of unit scatterers spanning the
/// given extent, each displaced by a uniform random jitter.
struct LatticeSpec {
    double x_min = 10.0;
    double x_max = 45.0;
    double y_min = -12.0;
    double y_max = 12.0;
    std::size_t rows = 5;  ///< along y
    std::size_t cols = 5;  ///< along x
    double jitter = 0.0;   ///< max displacement per axis (m)
    double height = 0.0;
    double amplitude = 1.0;
    bool random_phase = true;
    std::uint64_t seed = 0;
};

/// Lattice cell centers, jittered. Deterministic for a given seed.
std::vector<Scatterer> lattice_scatterers(const LatticeSpec& spec);

/// How an estimated velocity error is removed from the image.
enum class Compensation {
    phase,    ///< per-pixel phase screens on the stack formed with the navigation track
    refocus,  ///< back-projection with the corrected navigation track
};

/// Everything needed to simulate and process one acquisition.
struct RunConfig {
    RadarConfig radar{};
    Vec3 position{};
    Vec3 velocity{6.94, 0.0, 0.0};
    std::size_t pulses = 200;
    ArrayConfig array{};
    GroundGrid grid = GroundGrid::from_extent(5.0, 50.0, 0.05, -15.0, 15.0, 0.05, 0.0);
    Scene scene{};
    Vec3 injected_delta_v{0.2622, -0.0114, 0.0};
    MocoOptions moco{};
    Compensation compensation = Compensation::refocus;
    FocusOptions focus{};
    double dynamic_range_db = 40.0;

    /// True platform track.
    [[nodiscard]] Trajectory trajectory() const;
    /// Track reported by the navigation unit (true velocity + injected error).
    [[nodiscard]] Trajectory navigation() const;
    void validate() const;
};

/// Parses and validates a run configuration. Unknown fields are rejected.
/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Smallest bin count covering every grid pixel and scatterer from every VPC.
std::size_t required_range_bins(const RunConfig& cfg);

}  // namespace sarmoco
