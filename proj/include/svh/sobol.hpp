#pragma once

#include <cstdint>
#include <vector>

#include "svh/linalg.hpp"

namespace svh {

// Digital (t,s)-sequence in base 2 with a per-dimension random digital-shift
// scramble. Direction numbers are generated from primitive polynomials over
// GF(2) (enumerated algorithmically) with fixed odd seed values, so any
// dimension is supported without an embedded table. Each 1-D projection is a
// (0,1)-sequence: every aligned block of 2^k consecutive points covers all
// dyadic intervals of size 2^-k exactly once, and the scramble preserves
// that.
class SobolSampler {
public:
    SobolSampler(std::size_t dim, std::uint64_t scramble_seed);

    std::size_t dim() const noexcept { return dim_; }

    // Next point in [0,1)^dim.
    Vec next();

    void skip(std::uint64_t count);

private:
    std::size_t dim_;
    std::uint64_t index_ = 0;
    std::vector<std::uint32_t> state_;       // current unscrambled integer point
    std::vector<std::uint32_t> shift_;       // per-dimension digital shift
    std::vector<std::uint32_t> directions_;  // dim x 32, row-major
};

} // namespace svh
