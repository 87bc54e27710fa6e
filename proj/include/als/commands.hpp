#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "als/run_config.hpp"

namespace als {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitUsage = 2;

/// Each command reads and writes the files named in `cfg.paths`, reports to
/// `out`/`err` and returns an exit code. Data errors propagate as exceptions.
int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_ingest(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_schedule(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// File names written inside the model and output directories.
inline constexpr const char* kModelFile = "staged_model.json";
inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kImportanceFile = "importance.csv";
inline constexpr const char* kGridFile = "grid_search.csv";
inline constexpr const char* kScheduleFile = "schedule.json";
inline constexpr const char* kScheduleTableFile = "schedule_table.csv";
inline constexpr const char* kCompareFile = "compare.csv";

/// "<features stem>_rejects.csv" next to the features file.
std::string rejects_path(const std::string& features_path);

/// HH:MM:SS of an epoch time shifted by `offset_min`.
std::string clock_string(double epoch_seconds, int offset_min);

}  // namespace als
