#pragma once

#include <string>

#include <json.hpp>

#include "unmix/solver.hpp"

namespace unmix::cli {

using json = nlohmann::json;

/// Skeleton run report; commands fill in inputs/metrics/artifacts/items.
json make_report(const std::string& command);

json config_to_json(const SolverConfig& cfg);

/// FNV-1a 64-bit checksum of a file's bytes, as a hex string.
std::string file_checksum(const std::string& path);

void write_report(const json& report, const std::string& path);

/// Writes the per-iteration loss trace as CSV.
void write_trace_csv(const std::vector<TraceEntry>& trace, const std::string& path);

}  // namespace unmix::cli
