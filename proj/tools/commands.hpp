#pragma once

#include <filesystem>
#include <iosfwd>

#include "config.hpp"

namespace eegkan::cli {

// Each command validates `cfg`, does its work and writes its artifacts into
// cfg.out atomically. Progress goes to `log`.
void cmd_synth(const RunConfig& cfg, std::ostream& log);
void cmd_features(const RunConfig& cfg, const std::filesystem::path& manifest, std::ostream& log);
void cmd_train(const RunConfig& cfg, const std::filesystem::path& features, std::ostream& log);
/// Returns false when some model kind had no successful run.
bool cmd_sweep(const RunConfig& cfg, const std::filesystem::path& features, std::ostream& log);
void cmd_analyze(const RunConfig& cfg, const std::filesystem::path& sweep,
                 const std::filesystem::path& features, bool include_raw, std::ostream& log);
void cmd_report(const RunConfig& cfg, const std::filesystem::path& sweep, std::ostream& log);

/// Full command-line entry point; returns the process exit code
/// (0 success, 1 runtime failure, 2 usage or configuration error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eegkan::cli
