// rng.hpp — counter-based deterministic randomness for graph decorations.
//
// Decorations must be a pure function of (seed, cell) so that enlarging a
// window restricts the same infinite object instead of re-rolling it.
#pragma once

#include <cstdint>

#include "aqs/rational.hpp"

namespace aqs {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless hash of a (seed, a, b) counter triple.
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::int64_t a, std::int64_t b) {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(a));
    h = splitmix64(h ^ static_cast<std::uint64_t>(b));
    return h;
}

// Bernoulli(p) decision from one 64-bit draw: hit iff h/2^64 < p.
inline bool bernoulli_hit(std::uint64_t h, const Rational& p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    const std::uint64_t num = mpz_get_ui(p.get_num().get_mpz_t());
    const std::uint64_t den = mpz_get_ui(p.get_den().get_mpz_t());
    using u128 = unsigned __int128;
    return static_cast<u128>(h) * den < (static_cast<u128>(num) << 64);
}

}  // namespace aqs
