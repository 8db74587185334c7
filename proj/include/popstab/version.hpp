#pragma once

#include <cstdint>

namespace popstab {

inline constexpr const char* kVersion = "0.1.0";

/// Seed used when the caller supplies none (CLI default, acceptance
/// runs). Any seed works; this one ships so default runs replay.
inline constexpr std::uint64_t kDefaultSeed = 7;

// Recorded in report metadata so a run can be audited and replayed.
inline constexpr const char* kGeneratorName =
    "mt19937_64 (per-stream seeds derived with splitmix64)";

}  // namespace popstab
