#pragma once

#include <cstdint>

namespace corrscreen {

inline constexpr const char* kVersion = "0.1.0";

// Counter-based generator used for all Monte Carlo draws. Recorded in every
// report so results can be re-derived later.
inline constexpr const char* kGeneratorName = "philox4x64-10";

// Environment variable consulted for the default master seed when no --seed
// flag is given. Single source of truth; the CLI and docs both refer here.
inline constexpr const char* kSeedEnvVar = "CORRSCREEN_SEED";

inline constexpr std::uint64_t kDefaultMasterSeed = 123456789;

}  // namespace corrscreen
