// SPDX-License-Identifier: MIT
#include "tensorcs/report.hpp"

#include "tensorcs/error.hpp"

#include <json.hpp>

#include <fstream>

namespace tensorcs {

std::string report_to_json(const RecoveryReport& report, bool include_timings) {
    const auto time = [include_timings](double s) { return include_timings ? s : 0.0; };
    nlohmann::ordered_json j;
    j["method"] = report.method;
    j["dims"] = report.estimate.dims();
    j["epsilon"] = report.epsilon;
    j["error_bound"] = report.error_bound ? nlohmann::ordered_json(*report.error_bound) : nlohmann::ordered_json();
    j["term_count"] = report.term_count;
    j["kept_terms"] = report.kept_terms;
    j["truncated"] = report.truncated;
    auto stages = nlohmann::ordered_json::array();
    for (const auto& s : report.stages) {
        nlohmann::ordered_json st;
        st["mode"] = s.mode;
        st["subproblem_count"] = s.subproblem_count;
        st["max_residual"] = s.max_residual;
        st["max_iterations"] = s.max_iterations;
        st["tolerance"] = s.tolerance;
        st["relaxed"] = s.relaxed;
        st["seconds"] = time(s.seconds);
        stages.push_back(std::move(st));
    }
    j["stages"] = std::move(stages);
    j["total_seconds"] = time(report.total_seconds);
    j["notes"] = report.notes;
    return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const RecoveryReport& report, bool include_timings) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << report_to_json(report, include_timings);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace tensorcs
