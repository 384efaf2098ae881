// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/rng.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace kgate {

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t x = next();
        if (x >= threshold) return x % bound;
    }
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("Rng::poisson: mean must be non-negative");
    std::uint64_t total = 0;
    double remaining = mean;
    while (remaining > 0.0) {
        const double chunk = remaining > 32.0 ? 32.0 : remaining;
        remaining -= chunk;
        const double limit = std::exp(-chunk);
        double product = unit();
        while (product > limit) {
            ++total;
            product *= unit();
        }
    }
    return total;
}

std::vector<std::uint64_t> Rng::sample(std::uint64_t k, std::uint64_t n) {
    if (k > n) throw std::invalid_argument("Rng::sample: k exceeds n");
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = n - k; j < n; ++j) {
        std::uint64_t t = below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    return {chosen.begin(), chosen.end()};
}

}  // namespace kgate
