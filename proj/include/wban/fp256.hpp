#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "wban/u256.hpp"

namespace wban {
namespace fp256 {

// FIPS 186 Curve P-256 prime: 2^256 - 2^224 + 2^192 + 2^96 - 1.
inline constexpr U256 kP{0xffffffffffffffffULL, 0x00000000ffffffffULL,
                         0x0000000000000000ULL, 0xffffffff00000001ULL};

// 2^256 - p, the wrap-around correction for one modulus worth of overflow.
inline constexpr U256 kDelta = sub_with_borrow(U256{}, kP).first;

inline U256 add(const U256& a, const U256& b) {
    auto [r, carry] = add_with_carry(a, b);
    if (carry) return add_with_carry(r, kDelta).first;
    if (r >= kP) return sub_with_borrow(r, kP).first;
    return r;
}

inline U256 sub(const U256& a, const U256& b) {
    auto [r, borrow] = sub_with_borrow(a, b);
    if (borrow) return add_with_carry(r, kP).first;
    return r;
}

inline U256 negate(const U256& a) {
    if (a.is_zero()) return a;
    return sub_with_borrow(kP, a).first;
}

/// Reduce a 512-bit product modulo p using the NIST fast-reduction identity
/// for this prime (sums and differences of nine 256-bit slices of the input).
inline U256 reduce_wide(const std::array<std::uint64_t, 8>& wide) {
    std::uint32_t c[16];
    for (int i = 0; i < 8; ++i) {
        c[2 * i] = static_cast<std::uint32_t>(wide[i]);
        c[2 * i + 1] = static_cast<std::uint32_t>(wide[i] >> 32);
    }

    // Each row is one 256-bit slice, least-significant 32-bit word first,
    // with its multiplier in the reduction identity.
    struct Slice {
        std::int64_t mult;
        std::uint32_t w[8];
    };
    const Slice slices[9] = {
        {+1, {c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]}},
        {+2, {0, 0, 0, c[11], c[12], c[13], c[14], c[15]}},
        {+2, {0, 0, 0, c[12], c[13], c[14], c[15], 0}},
        {+1, {c[8], c[9], c[10], 0, 0, 0, c[14], c[15]}},
        {+1, {c[9], c[10], c[11], c[13], c[14], c[15], c[13], c[8]}},
        {-1, {c[11], c[12], c[13], 0, 0, 0, c[8], c[10]}},
        {-1, {c[12], c[13], c[14], c[15], 0, 0, c[9], c[11]}},
        {-1, {c[13], c[14], c[15], c[8], c[9], c[10], 0, c[12]}},
        {-1, {c[14], c[15], 0, c[9], c[10], c[11], 0, c[13]}},
    };

    std::int64_t acc[8] = {};
    for (const auto& s : slices)
        for (int i = 0; i < 8; ++i) acc[i] += s.mult * static_cast<std::int64_t>(s.w[i]);

    // Signed carry propagation into a 256-bit value plus small carry.
    std::uint32_t out[8];
    std::int64_t carry = 0;
    for (int i = 0; i < 8; ++i) {
        std::int64_t v = acc[i] + carry;
        out[i] = static_cast<std::uint32_t>(v);
        carry = (v - static_cast<std::int64_t>(out[i])) >> 32;
    }

    U256 r;
    for (int i = 0; i < 4; ++i)
        r.limb[i] = static_cast<std::uint64_t>(out[2 * i]) |
                    (static_cast<std::uint64_t>(out[2 * i + 1]) << 32);

    // Fold the leftover carry: each +1 of 2^256 is congruent to +delta.
    while (carry > 0) {
        auto [r2, c2] = add_with_carry(r, kDelta);
        r = r2;
        carry += (c2 ? 1 : 0) - 1;
    }
    while (carry < 0) {
        auto [r2, c2] = add_with_carry(r, kP);
        r = r2;
        carry += c2 ? 1 : 0;
    }
    if (r >= kP) r = sub_with_borrow(r, kP).first;
    return r;
}

inline U256 mul(const U256& a, const U256& b) { return reduce_wide(mul_wide(a, b)); }

inline U256 sqr(const U256& a) { return mul(a, a); }

inline U256 pow(const U256& base, const U256& exp) {
    U256 result{1};
    int top = exp.top_bit();
    for (int i = top; i >= 0; --i) {
        result = sqr(result);
        if (exp.bit(static_cast<unsigned>(i))) result = mul(result, base);
    }
    return result;
}

inline U256 inv(const U256& a) {
    if (a.is_zero()) throw std::domain_error("field inverse of zero");
    auto p_minus_2 = sub_with_borrow(kP, U256{2}).first;
    return pow(a, p_minus_2);
}

/// Square root via the p = 3 (mod 4) exponent shortcut. Empty when the
/// input is a non-residue.
inline std::optional<U256> sqrt(const U256& a) {
    static const U256 exp = [] {
        auto p1 = add_with_carry(kP, U256{1}).first;
        return shift_right_small(shift_right_small(p1, 1), 1);
    }();
    U256 r = pow(a, exp);
    if (sqr(r) != a) return std::nullopt;
    return r;
}

}  // namespace fp256
}  // namespace wban
