#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace annealcast {

// Correctly rounded sum of a list of doubles (Shewchuk partials, same
// algorithm as Python's math.fsum). The result depends only on the multiset
// of inputs, not their order, which is what makes the full-batch logistic
// fit bit-identical under training-row permutations.
inline double exact_sum(std::span<const double> xs) {
    std::vector<double> partials;
    partials.reserve(16);
    for (double x : xs) {
        std::size_t i = 0;
        for (std::size_t j = 0; j < partials.size(); ++j) {
            double y = partials[j];
            if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials[i++] = lo;
            x = hi;
        }
        partials.resize(i);
        partials.push_back(x);
    }
    // Reduce from the largest partial down, with the round-half-even
    // correction from CPython's fsum.
    double hi = 0.0;
    std::size_t n = partials.size();
    if (n > 0) {
        hi = partials[--n];
        double lo = 0.0;
        while (n > 0) {
            const double x = hi;
            const double y = partials[--n];
            hi = x + y;
            const double yr = hi - x;
            lo = y - yr;
            if (lo != 0.0) break;
        }
        if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) ||
                      (lo > 0.0 && partials[n - 1] > 0.0))) {
            const double y = lo * 2.0;
            const double x = hi + y;
            if (y == x - hi) hi = x;
        }
    }
    return hi;
}

// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

// round-half-up to the nearest integer, used everywhere the contract says
// "round" (split sizes, schedule values)
inline long long round_half_up(double x) {
    return static_cast<long long>(std::floor(x + 0.5));
}

} // namespace annealcast
