#pragma once
// Seed derivation and engine construction. All randomness in the library
// flows through explicit uint64 seeds so runs are reproducible.

#include <cmath>
#include <cstdint>
#include <random>

namespace gal {

// splitmix64; used to derive independent stream seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x51ed2701ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

// Hand-pinned samplers: the std distributions are implementation-defined, and
// we promise bit-identical streams for a given seed.

// Uniform on [0, 1), 53-bit resolution.
inline double uniform_double(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (one value per call; the sine branch is
// discarded to keep the stream stateless).
inline double gaussian(std::mt19937_64& eng) {
    double u1 = 1.0 - uniform_double(eng);  // (0, 1]
    double u2 = uniform_double(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace gal
