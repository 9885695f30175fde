#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "sarmoco/metrics.hpp"
#include "sarmoco/moco.hpp"
#include "sarmoco/signal_sim.hpp"
#include "sarmoco/tdbp.hpp"

namespace sarmoco::io {

// Binary layouts are little-endian throughout.
//
// Data cube ("SRCC"):
//   char[4] magic, u32 version, u32 N, u32 M, u32 bins,
//   f64 first_bin_range, f64 bin_spacing, f64 pri, f64 wavelength,
//   then (re, im) f32 pairs nested (m, n, bin), m slowest.
//
// Image / image stack ("SIMG"):
//   char[4] magic, u32 version, u32 kind (0 image, 1 stack), u32 count,
//   u32 ny, u32 nx, f64 x_min, f64 dx, f64 y_min, f64 dy, f64 height,
//   f64 tau[count] (stacks only),
//   then (re, im) f32 pairs row-major, m slowest for stacks.

inline constexpr std::uint32_t kFormatVersion = 1;

void write_cube(const std::filesystem::path& path, const DataCube& cube);
DataCube read_cube(const std::filesystem::path& path);

void write_image(const std::filesystem::path& path, const SarImage& img);
SarImage read_image(const std::filesystem::path& path);

void write_stack(const std::filesystem::path& path, const ImageStack& stack);
ImageStack read_stack(const std::filesystem::path& path);

/// 8-bit binary PGM of 20 log10(|I| / max |I|), clipped to -dynamic_range_db.
/// Rows are written with y increasing upwards.
void write_pgm(const std::filesystem::path& path, const SarImage& img,
               double dynamic_range_db = 40.0);

nlohmann::json to_json(const Vec3& v);
nlohmann::json to_json(const Gcp& g);
nlohmann::json to_json(const MocoReport& report);
nlohmann::json to_json(const FocusMetrics& fm, const GroundGrid& grid);
MocoReport moco_report_from_json(const nlohmann::json& j);

/// One GCP per row, header included.
std::string gcp_csv(const MocoReport& report);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sarmoco::io
