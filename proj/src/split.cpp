#include "annealcast/split.hpp"

#include <algorithm>

#include "annealcast/error.hpp"
#include "annealcast/numeric.hpp"
#include "annealcast/rng.hpp"

namespace annealcast {

SplitMode split_mode_from_string(const std::string& s) {
    if (s == "random") return SplitMode::random;
    if (s == "chronological") return SplitMode::chronological;
    throw ConfigError("unknown split mode '" + s + "' (expected random or chronological)");
}

std::string to_string(SplitMode mode) {
    return mode == SplitMode::random ? "random" : "chronological";
}

SplitIndex split(std::size_t n, double train_frac, std::uint64_t seed, SplitMode mode) {
    if (!(train_frac > 0.0 && train_frac < 1.0)) {
        throw ConfigError("train_frac must be in (0, 1), got " + std::to_string(train_frac));
    }
    if (n < 10) {
        throw ConfigError("need at least 10 rows to split, got " + std::to_string(n));
    }
    const std::size_t n_train =
        static_cast<std::size_t>(round_half_up(train_frac * static_cast<double>(n)));

    SplitIndex out;
    out.seed = seed;
    out.mode = mode;
    std::vector<std::size_t> idx = iota_indices(n);
    if (mode == SplitMode::random) {
        SplitMix64 rng(seed);
        shuffle_indices(idx, rng);
    }
    out.train_rows.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_rows.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(out.train_rows.begin(), out.train_rows.end());
    std::sort(out.test_rows.begin(), out.test_rows.end());
    return out;
}

} // namespace annealcast
