// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace pgt {

/// xoshiro256** seeded through SplitMix64.
///
/// Every output of the library is a function of the bits this generator
/// produces, so the derivations below are fixed and platform independent:
///  - `next()` advances the state once (one "draw").
///  - `uniform01()` is one draw: the top 53 bits scaled by 2^-53, in [0, 1).
///  - `uniform(lo, hi)` is one draw: lo + (hi - lo) * uniform01().
///  - `below(n)` is one draw: floor(uniform01() * n); the bias is below 2^-53.
///  - `split()` is one draw, used to seed an independent child generator.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Construct directly from 32 bytes of state (an all-zero state is remapped).
    static Rng from_state_bytes(std::span<const std::uint8_t, 32> bytes);

    std::uint64_t next();
    double uniform01();
    double uniform(double lo, double hi);
    std::uint64_t below(std::uint64_t n);
    Rng split();

    /// In-place Fisher-Yates; consumes size()-1 draws.
    template <typename Container>
    void shuffle(Container& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    const std::array<std::uint64_t, 4>& state() const { return state_; }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    Rng() = default;
    std::array<std::uint64_t, 4> state_{};
};

/// SHA-256 of the given bytes.
std::array<std::uint8_t, 32> sha256(std::string_view bytes);

/// Lower-case hex of a SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// Per-sample generator: SHA-256(seed as 8 little-endian bytes || key) is the
/// xoshiro state. Independent of processing order and worker count.
Rng derive_rng(std::uint64_t global_seed, std::string_view key);

}  // namespace pgt
