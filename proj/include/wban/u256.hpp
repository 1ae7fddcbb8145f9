#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "wban/bytes.hpp"
#include "wban/errors.hpp"

namespace wban {

/// Unsigned 256-bit integer, four 64-bit limbs, least-significant limb first.
/// Plain value type; modular semantics live in fp256.hpp.
struct U256 {
    std::array<std::uint64_t, 4> limb{};

    constexpr U256() = default;
    constexpr explicit U256(std::uint64_t lo) : limb{lo, 0, 0, 0} {}
    constexpr U256(std::uint64_t l0, std::uint64_t l1, std::uint64_t l2, std::uint64_t l3)
        : limb{l0, l1, l2, l3} {}

    friend constexpr bool operator==(const U256&, const U256&) = default;

    friend constexpr std::strong_ordering operator<=>(const U256& a, const U256& b) {
        for (int i = 3; i >= 0; --i) {
            if (a.limb[i] != b.limb[i])
                return a.limb[i] < b.limb[i] ? std::strong_ordering::less
                                             : std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    }

    constexpr bool is_zero() const { return limb[0] == 0 && limb[1] == 0 && limb[2] == 0 && limb[3] == 0; }

    /// Bit i, counting from the least significant bit (i in [0, 256)).
    constexpr bool bit(unsigned i) const { return (limb[i / 64] >> (i % 64)) & 1; }

    constexpr bool is_odd() const { return limb[0] & 1; }

    /// Index of the highest set bit, or -1 for zero.
    constexpr int top_bit() const {
        for (int i = 3; i >= 0; --i) {
            if (limb[i] == 0) continue;
            std::uint64_t v = limb[i];
            int b = 0;
            while (v >>= 1) ++b;
            return i * 64 + b;
        }
        return -1;
    }

    static U256 from_be_bytes(std::span<const std::uint8_t, 32> in) {
        U256 r;
        for (int i = 0; i < 4; ++i) r.limb[3 - i] = load_be64(in.data() + 8 * i);
        return r;
    }

    static U256 from_be_bytes(const Bytes32& in) {
        return from_be_bytes(std::span<const std::uint8_t, 32>(in));
    }

    /// Big-endian octet string of any length up to 32 (IEEE 1363 OS2IP).
    static U256 from_os2ip(std::span<const std::uint8_t> in) {
        while (!in.empty() && in.front() == 0) in = in.subspan(1);
        if (in.size() > 32)
            throw Error(ErrorCode::too_long, "integer wider than 256 bits");
        Bytes32 padded{};
        std::copy(in.begin(), in.end(), padded.begin() + (32 - in.size()));
        return from_be_bytes(padded);
    }

    Bytes32 to_be_bytes() const {
        Bytes32 out{};
        for (int i = 0; i < 4; ++i) store_be64(limb[3 - i], out.data() + 8 * i);
        return out;
    }

    static U256 from_hex(std::string_view hex) {
        if (hex.size() > 64) throw Error(ErrorCode::too_long, "more than 64 hex digits");
        std::string padded(64 - hex.size(), '0');
        padded.append(hex);
        return from_be_bytes(from_hex_fixed<32>(padded));
    }

    /// 64 lowercase hex digits, most significant first.
    std::string to_hex() const {
        auto b = to_be_bytes();
        return wban::to_hex(b);
    }
};

/// a + b with carry out.
constexpr std::pair<U256, bool> add_with_carry(const U256& a, const U256& b) {
    U256 r;
    unsigned __int128 carry = 0;
    for (int i = 0; i < 4; ++i) {
        unsigned __int128 t = static_cast<unsigned __int128>(a.limb[i]) + b.limb[i] + carry;
        r.limb[i] = static_cast<std::uint64_t>(t);
        carry = t >> 64;
    }
    return {r, carry != 0};
}

/// a - b with borrow out (true when a < b).
constexpr std::pair<U256, bool> sub_with_borrow(const U256& a, const U256& b) {
    U256 r;
    std::uint64_t borrow = 0;
    for (int i = 0; i < 4; ++i) {
        unsigned __int128 t = static_cast<unsigned __int128>(a.limb[i]) -
                              static_cast<unsigned __int128>(b.limb[i]) - borrow;
        r.limb[i] = static_cast<std::uint64_t>(t);
        borrow = (t >> 64) ? 1 : 0;
    }
    return {r, borrow != 0};
}

/// Logical right shift by s < 64 bits.
constexpr U256 shift_right_small(const U256& a, unsigned s) {
    if (s == 0) return a;
    U256 r;
    for (int i = 0; i < 4; ++i) {
        r.limb[i] = a.limb[i] >> s;
        if (i < 3) r.limb[i] |= a.limb[i + 1] << (64 - s);
    }
    return r;
}

/// Left shift by s < 64 bits; overflow past bit 255 is discarded.
constexpr U256 shift_left_small(const U256& a, unsigned s) {
    if (s == 0) return a;
    U256 r;
    for (int i = 3; i >= 0; --i) {
        r.limb[i] = a.limb[i] << s;
        if (i > 0) r.limb[i] |= a.limb[i - 1] >> (64 - s);
    }
    return r;
}

/// Full 512-bit product, eight 64-bit limbs, least significant first.
constexpr std::array<std::uint64_t, 8> mul_wide(const U256& a, const U256& b) {
    std::array<std::uint64_t, 8> r{};
    for (int i = 0; i < 4; ++i) {
        std::uint64_t carry = 0;
        for (int j = 0; j < 4; ++j) {
            unsigned __int128 t = static_cast<unsigned __int128>(a.limb[i]) * b.limb[j] +
                                  r[i + j] + carry;
            r[i + j] = static_cast<std::uint64_t>(t);
            carry = static_cast<std::uint64_t>(t >> 64);
        }
        r[i + 4] = carry;
    }
    return r;
}

}  // namespace wban
