#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace spinfft::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

// Environment variable that overrides the default worker count.
inline constexpr const char* kWorkersEnv = "SPINFFT_WORKERS";

std::string version();

// Default --workers: $SPINFFT_WORKERS if set, else the hardware thread count.
std::size_t defaultWorkers();

// Runs one command line (without the program name). Results go to files,
// listings to `out`, one-line diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spinfft::cli
