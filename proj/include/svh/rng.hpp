#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace svh {

// splitmix64 step; used to derive well-mixed child seeds from a root seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hierarchical seed derivation: child streams are identified by a tag plus up
// to two indices, so e.g. the candidate-sampling stream of iteration i is
// independent of how many inner steps ran before it.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = root ^ 0x6a09e667f3bcc909ULL;
    for (unsigned char c : tag) {
        s ^= c;
        splitmix64(s);
    }
    s ^= a * 0x9e3779b97f4a7c15ULL;
    splitmix64(s);
    s ^= b * 0xc2b2ae3d27d4eb4fULL;
    std::uint64_t t = s;
    return splitmix64(t);
}

// A seeded random stream. Wraps mt19937_64 so all draws in the project go
// through one audited surface.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::mt19937_64& engine() { return engine_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double gamma(double shape) {
        return std::gamma_distribution<double>(shape, 1.0)(engine_);
    }

    double normal() {
        // Fresh distribution per call: normal_distribution caches a spare
        // value, which would make draw order depend on call history.
        return std::normal_distribution<double>(0.0, 1.0)(engine_);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace svh
