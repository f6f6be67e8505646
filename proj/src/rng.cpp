// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/rng.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>
#include <string>

namespace pgt {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    for (auto& word : state_) word = splitmix64(seed);
}

Rng Rng::from_state_bytes(std::span<const std::uint8_t, 32> bytes) {
    Rng rng;
    for (std::size_t w = 0; w < 4; ++w) {
        std::uint64_t word = 0;
        for (std::size_t b = 0; b < 8; ++b) word |= std::uint64_t{bytes[w * 8 + b]} << (8 * b);
        rng.state_[w] = word;
    }
    if (rng.state_ == std::array<std::uint64_t, 4>{}) return Rng(0);
    return rng;
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    auto v = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    return v < n ? v : n - 1;
}

Rng Rng::split() { return Rng(next()); }

std::array<std::uint8_t, 32> sha256(std::string_view bytes) {
    std::array<std::uint8_t, 32> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != digest.size()) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    return digest;
}

std::string sha256_hex(std::string_view bytes) {
    static constexpr char hex[] = "0123456789abcdef";
    const auto digest = sha256(bytes);
    std::string out;
    out.reserve(64);
    for (auto b : digest) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0xf]);
    }
    return out;
}

Rng derive_rng(std::uint64_t global_seed, std::string_view key) {
    std::string material(8, '\0');
    for (int i = 0; i < 8; ++i) material[i] = static_cast<char>((global_seed >> (8 * i)) & 0xff);
    material.append(key);
    const auto digest = sha256(material);
    return Rng::from_state_bytes(std::span<const std::uint8_t, 32>(digest));
}

}  // namespace pgt
