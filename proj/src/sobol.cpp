#include "svh/sobol.hpp"

#include <bit>

#include "svh/error.hpp"
#include "svh/rng.hpp"

namespace svh {
namespace {

constexpr int kBits = 32;

// Polynomials over GF(2) as bitmasks, lowest bit = constant term.
std::uint32_t poly_mod(std::uint64_t a, std::uint32_t p) {
    const int dp = 31 - std::countl_zero(p);
    while (true) {
        const int da = 63 - std::countl_zero(a);
        if (a == 0 || da < dp) break;
        a ^= static_cast<std::uint64_t>(p) << (da - dp);
    }
    return static_cast<std::uint32_t>(a);
}

std::uint64_t poly_mul(std::uint32_t a, std::uint32_t b) {
    std::uint64_t r = 0;
    for (int i = 0; b >> i; ++i)
        if ((b >> i) & 1u) r ^= static_cast<std::uint64_t>(a) << i;
    return r;
}

// x^e mod p over GF(2).
std::uint32_t poly_pow_x(std::uint64_t e, std::uint32_t p) {
    std::uint32_t result = 1, base = poly_mod(2, p);
    while (e) {
        if (e & 1) result = poly_mod(poly_mul(result, base), p);
        base = poly_mod(poly_mul(base, base), p);
        e >>= 1;
    }
    return result;
}

bool is_irreducible(std::uint32_t p, int deg) {
    for (int d = 1; 2 * d <= deg; ++d) {
        for (std::uint32_t q = (1u << d) | 1u; q < (2u << d); q += 2) {
            if (poly_mod(p, q) == 0) return false;
        }
    }
    return true;
}

bool is_primitive(std::uint32_t p, int deg) {
    if ((p & 1u) == 0) return false;  // x divides p
    if (!is_irreducible(p, deg)) return false;
    const std::uint64_t order = (1ull << deg) - 1;
    if (poly_pow_x(order, p) != 1) return false;
    // x must not have a smaller order: check maximal proper divisors.
    std::uint64_t n = order;
    for (std::uint64_t f = 2; f * f <= n; ++f) {
        if (n % f == 0) {
            if (poly_pow_x(order / f, p) == 1) return false;
            while (n % f == 0) n /= f;
        }
    }
    if (n > 1 && n < order && poly_pow_x(order / n, p) == 1) return false;
    return true;
}

// First `count` primitive polynomials, enumerated by increasing degree then
// increasing bit pattern. Deterministic.
std::vector<std::uint32_t> primitive_polynomials(std::size_t count) {
    std::vector<std::uint32_t> out;
    for (int deg = 1; out.size() < count && deg < 24; ++deg) {
        for (std::uint32_t p = (1u << deg) | 1u; p < (2u << deg) && out.size() < count; p += 2) {
            if (is_primitive(p, deg)) out.push_back(p);
        }
    }
    return out;
}

} // namespace

SobolSampler::SobolSampler(std::size_t dim, std::uint64_t scramble_seed) : dim_(dim) {
    if (dim == 0) throw ArgumentError("SobolSampler: dimension must be positive");
    directions_.assign(dim * kBits, 0);

    // Dimension 0: van der Corput (all m_i = 1).
    for (int i = 0; i < kBits; ++i) directions_[i] = 1u << (kBits - 1 - i);

    const auto polys = dim > 1 ? primitive_polynomials(dim - 1) : std::vector<std::uint32_t>{};
    // Fixed internal stream for the seed values m_i; independent of the
    // caller's scramble seed so the base sequence is the same in every run.
    std::uint64_t mstate = 0x5bd1e995u;
    for (std::size_t d = 1; d < dim; ++d) {
        const std::uint32_t p = polys[d - 1];
        const int deg = 31 - std::countl_zero(p);
        std::vector<std::uint32_t> m(kBits);
        for (int i = 0; i < deg; ++i) {
            // Odd m_{i+1} < 2^{i+1}.
            m[i] = (static_cast<std::uint32_t>(splitmix64(mstate) >> 33) % (1u << i)) * 2u + 1u;
        }
        for (int i = deg; i < kBits; ++i) {
            std::uint32_t v = m[i - deg] ^ (m[i - deg] << deg);
            for (int k = 1; k < deg; ++k) {
                if ((p >> (deg - k)) & 1u) v ^= m[i - k] << k;
            }
            m[i] = v;
        }
        for (int i = 0; i < kBits; ++i) directions_[d * kBits + i] = m[i] << (kBits - 1 - i);
    }

    shift_.resize(dim);
    RngStream rng(derive_seed(scramble_seed, "sobol-shift"));
    for (std::size_t d = 0; d < dim; ++d)
        shift_[d] = static_cast<std::uint32_t>(rng.next_u64() >> 32);

    state_.assign(dim, 0);
}

Vec SobolSampler::next() {
    Vec point(dim_);
    constexpr double inv = 1.0 / 4294967296.0;  // 2^-32
    for (std::size_t d = 0; d < dim_; ++d)
        point[d] = (state_[d] ^ shift_[d]) * inv;
    // Advance with the Gray-code rule.
    const int c = std::countr_zero(~index_);
    for (std::size_t d = 0; d < dim_; ++d)
        state_[d] ^= directions_[d * kBits + c];
    ++index_;
    return point;
}

void SobolSampler::skip(std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) next();
}

} // namespace svh
