#pragma once

#include <string>

#include <json.hpp>

#include "valet/calibrate.hpp"
#include "valet/desim.hpp"
#include "valet/policy.hpp"

namespace valet {

using ordered_json = nlohmann::ordered_json;

// Fixed sweep CSV schema, one row per policy point. Internal times are in
// hours; the CSV reports them in minutes (see the column headers).
extern const char* const kSweepCsvHeader;
std::string sweep_csv(const SweepTable& table);
void write_file(const std::string& path, const std::string& content);

ordered_json to_json(const QueueSolution& q);
ordered_json to_json(const MarketOutcome& o);
ordered_json to_json(const SweepRow& row, const std::string& swept_name);
ordered_json to_json(const PlanningSummary& s);
ordered_json to_json(const TaxSummary& s);
ordered_json to_json(const SimResult& r);
ordered_json to_json(const ThetaCalibration& c);

// Provenance record written next to every output set: resolved inputs,
// grids, seed, tool version, and wall-clock duration.
struct RunManifest {
    std::string subcommand;
    ModelParams params;
    PolicyConfig policy;
    GridSpec grid;
    std::uint64_t seed = 0;
    double duration_seconds = 0;
    std::string extra;  // subcommand-specific settings, JSON text
};
ordered_json to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& out_dir);

}  // namespace valet
