#pragma once

// Pipeline execution for the batch harness: runs a validated config,
// persists reports/tables/field dumps, and replays artifacts for the
// determinism guard.

#include <string>
#include <vector>

#include "homoglab/config.hpp"

namespace homoglab {

inline constexpr int kStatusOk = 0;
inline constexpr int kStatusValidation = 2;
inline constexpr int kStatusSolver = 3;

struct RunResult {
    int status = kStatusOk;
    std::vector<std::string> messages;   // one summary line per stage
    std::vector<std::string> artifacts;  // paths written
};

RunResult run(const ExperimentConfig& cfg);

struct ReplayResult {
    int status = kStatusOk;
    std::vector<std::string> diffs;  // field-by-field drift beyond 1e-12
};

ReplayResult replay(const std::string& report_path);

}  // namespace homoglab
