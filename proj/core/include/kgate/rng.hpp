// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace kgate {

/// Portable seeded random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; every derived draw below is
/// implemented here rather than through <random> distributions, whose
/// algorithms vary between standard libraries. Generated graphs therefore
/// export byte-identically across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, bound) by rejection; bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform in [0, 1) with 53 bits of precision.
    double unit();

    /// Poisson(mean) via Knuth's product-of-uniforms method, applied in
    /// chunks of mean <= 32 so exp(-mean) never underflows.
    std::uint64_t poisson(double mean);

    /// k distinct values from [0, n), ascending (Floyd's algorithm).
    std::vector<std::uint64_t> sample(std::uint64_t k, std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace kgate
