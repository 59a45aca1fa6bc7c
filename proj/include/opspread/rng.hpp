#pragma once

#include <cstdint>
#include <cmath>
#include <random>

#include "opspread/common.hpp"

namespace opspread {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent generator for (seed, stream index). Pure function of its inputs.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t a = splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{std::uint32_t(a), std::uint32_t(a >> 32), std::uint32_t(index),
                      std::uint32_t(index >> 32)};
    return Rng(seq);
}

// Standard complex Gaussian with E|z|^2 = 1.
inline cplx complex_gaussian(Rng& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    double re = n(rng);
    double im = n(rng);
    return {re, im};
}

}  // namespace opspread
