#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "csb/config.hpp"

// Experiment dispatch used by the command-line tool: resolves a parsed
// configuration, runs the requested experiment, and writes its artifacts
// (summary.json, resolved_config.txt and any data tables) under out_dir.
// All writes are atomic and confined to out_dir.

namespace csb {

struct RunOptions {
    std::optional<std::uint64_t> seed_override;
    // When set, overrides the config's `out` key.
    std::optional<std::string> out_dir;
    bool quiet = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitExperimentFailed = 1;
inline constexpr int kExitConfigInvalid = 2;

// Returns one of the kExit* codes. ConfigInvalid is raised for schema
// errors; numerical-domain errors surface as ExperimentFailed with the
// error recorded in summary.json.
int run_experiment(Config& cfg, const RunOptions& options);

}  // namespace csb
