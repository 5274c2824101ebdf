#pragma once

#include <cstdint>
#include <string_view>

namespace sitaware {

inline constexpr std::string_view kToolName = "sitaware";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Optional environment override for the default seed; a --seed flag wins.
inline constexpr std::string_view kSeedEnvVar = "SITAWARE_SEED";
inline constexpr std::uint64_t kDefaultSeed = 42;

}  // namespace sitaware
