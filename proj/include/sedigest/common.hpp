#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sedigest {

// Input/validation problems that should surface as usage errors (CLI exit 2),
// as opposed to mid-pipeline stage failures (exit 1).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-fatal conditions accumulated per run and echoed into the manifest.
using WarningLog = std::vector<std::string>;

inline void warn(WarningLog* log, std::string msg) {
    if (log) log->push_back(std::move(msg));
}

}  // namespace sedigest
