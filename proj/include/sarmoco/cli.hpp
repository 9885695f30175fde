#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace sarmoco::cli {

enum class TableFormat { markdown, csv };

/// Side-by-side table of run summaries. With more than one run, adds the
/// difference of each numeric column relative to the first run.
/// Throws FormatError on empty input or a summary that does not match the schema.
std::string report_table(const std::vector<std::string>& names,
                         const std::vector<nlohmann::json>& runs, TableFormat format);

/// Entry point of the `sarmoco` executable. Returns the process exit code:
/// 0 success, 1 I/O or format error, 2 configuration error, 3 numerical failure.
int run(int argc, char** argv);

}  // namespace sarmoco::cli
