#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "sarmoco/config.hpp"
#include "sarmoco/metrics.hpp"
#include "sarmoco/moco.hpp"
#include "sarmoco/signal_sim.hpp"
#include "sarmoco/tdbp.hpp"

namespace sarmoco {

enum class FocusMode {
    none,    ///< focus with the navigation track as reported
    moco,    ///< estimate the residual velocity and compensate
    oracle,  ///< compensate with the injected velocity error
    exact,   ///< focus with the true track (reference only)
};

std::string to_string(FocusMode mode);

struct FocusResult {
    FocusMode mode = FocusMode::none;
    SarImage image;
    std::optional<MocoReport> moco;
    FocusMetrics metrics;
    std::vector<LocalizationResult> localization;
    std::size_t clipped_lookups = 0;
};

/// Simulated range-compressed cube for the configured scene and true track.
DataCube simulate(const RunConfig& cfg);

/// Focuses `cube` on the configured grid. The cube must match the
/// configured radar, array and pulse count.
FocusResult focus(const DataCube& cube, const RunConfig& cfg, FocusMode mode);

/// Mean localization error over detected scatterers; nullopt if none detected.
std::optional<double> mean_localization_error(const std::vector<LocalizationResult>& loc);

/// Run summary written next to the focused image.
nlohmann::json to_json(const FocusResult& result);

}  // namespace sarmoco
