#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace annealcast {

enum class SplitMode { random, chronological };

SplitMode split_mode_from_string(const std::string& s);
std::string to_string(SplitMode mode);

// A partition of rows 0..n-1. Both halves are stored sorted ascending; the
// set membership is what the contract pins down.
struct SplitIndex {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    std::uint64_t seed = 0;
    SplitMode mode = SplitMode::random;
};

// |train| = round-half-up(train_frac * n). Random mode shuffles 0..n-1 with
// Fisher-Yates driven by splitmix64(seed) and takes the first |train|
// entries as train; chronological mode takes the earliest |train| rows.
// Deterministic for fixed (n, train_frac, seed, mode).
// Throws ConfigError unless 0 < train_frac < 1 and n >= 10.
SplitIndex split(std::size_t n, double train_frac, std::uint64_t seed, SplitMode mode);

} // namespace annealcast
