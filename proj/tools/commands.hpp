#pragma once

namespace hallcal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `hallcal` tool: simulate, synthesize, calibrate, predict, validate.
int run(int argc, char** argv);

}  // namespace hallcal::cli
