#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace gflow::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2;

/// Writes `content` to `path` through a sibling temporary and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Integrates the configured datum along one ray or a theta sweep. Writes
/// manifest.json, summary.json, rays/ray_NNN.jsonl, the initial state
/// (initial/state.json plus one GFLD1 file per member) and, with the
/// empirical constant policy, calibration.csv and calibration.json.
/// Returns kExitViolation when a ray blows up inside the certified region.
int cmd_simulate(const RunConfig& cfg, std::ostream& log);

/// Prediction only: prints the certified region (no rays) as JSON.
int cmd_certify(const RunConfig& cfg, std::ostream& out);

/// Estimate ensemble to estimates.csv and constant.json; with
/// `exhaustive_lemmas`, also the lemma sweep to lemmas.json (exit 2 on a
/// violation).
int cmd_verify_estimates(const RunConfig& cfg, bool exhaustive_lemmas, std::ostream& log);

/// Reads a t,beta,M schedule CSV and prints the disk cover as JSON.
int cmd_chain_disks(const RunConfig& cfg, const std::string& schedule_path, std::ostream& out);

/// Lists the initial-data catalog (plain text, or JSON).
int cmd_catalog(bool as_json, std::ostream& out);

[[nodiscard]] std::vector<ScheduleEntry> read_schedule(std::istream& in);

/// Re-reads a finished output directory and checks every record against
/// the documented schemas. Returns the list of problems (empty when valid).
[[nodiscard]] std::vector<std::string> self_check(const std::filesystem::path& dir);

/// Schema check for one trajectory record; returns "" when valid.
[[nodiscard]] std::string check_ray_record(const nlohmann::json& rec);

}  // namespace gflow::cli
