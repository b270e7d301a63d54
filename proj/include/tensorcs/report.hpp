// SPDX-License-Identifier: MIT
#pragma once

#include "tensorcs/recovery.hpp"

#include <filesystem>
#include <string>

namespace tensorcs {

/// JSON text for a report (without the estimate itself). With
/// include_timings = false every seconds field is written as 0 so that runs
/// can be compared byte for byte.
[[nodiscard]] std::string report_to_json(const RecoveryReport& report, bool include_timings = true);
void write_report(const std::filesystem::path& path, const RecoveryReport& report, bool include_timings = true);

}  // namespace tensorcs
