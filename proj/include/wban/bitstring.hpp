#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "wban/bytes.hpp"
#include "wban/errors.hpp"

namespace wban {

/// Ordered bit sequence, most significant bit first. Storage is byte-packed
/// with unused low bits of the last byte held at zero, so equality on the
/// byte vector is equality on the bit sequence.
class BitString {
public:
    BitString() = default;

    static BitString from_bytes(std::span<const std::uint8_t> bytes) {
        BitString s;
        s.bytes_.assign(bytes.begin(), bytes.end());
        s.bit_len_ = bytes.size() * 8;
        return s;
    }

    static BitString from_hex(std::string_view hex) {
        Bytes b = wban::from_hex(hex);
        return from_bytes(b);
    }

    /// The low `bits` bits of `value`, emitted most significant first.
    static BitString from_u64(std::uint64_t value, std::size_t bits) {
        if (bits > 64) throw Error(ErrorCode::too_long, "more than 64 bits from u64");
        BitString s;
        s.bit_len_ = bits;
        s.bytes_.assign((bits + 7) / 8, 0);
        for (std::size_t i = 0; i < bits; ++i)
            if ((value >> (bits - 1 - i)) & 1) s.set_bit(i);
        return s;
    }

    std::size_t bit_length() const { return bit_len_; }
    std::size_t byte_length() const { return bytes_.size(); }
    bool byte_aligned() const { return bit_len_ % 8 == 0; }
    bool empty() const { return bit_len_ == 0; }
    const Bytes& bytes() const { return bytes_; }

    /// Bit i, counting from the leftmost (most significant) bit.
    bool bit(std::size_t i) const { return (bytes_[i / 8] >> (7 - i % 8)) & 1; }

    std::string to_hex() const { return wban::to_hex(bytes_); }

    template <std::size_t N>
    std::array<std::uint8_t, N> to_array() const {
        if (bit_len_ != N * 8)
            throw Error(ErrorCode::bad_length, "bit string is not " + std::to_string(N * 8) + " bits");
        std::array<std::uint8_t, N> out{};
        std::copy(bytes_.begin(), bytes_.end(), out.begin());
        return out;
    }

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    friend BitString slice_bits(const BitString&, std::size_t, std::size_t);
    friend BitString concat(const BitString&, const BitString&);

    void set_bit(std::size_t i) { bytes_[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8)); }

    Bytes bytes_;
    std::size_t bit_len_ = 0;
};

inline BitString slice_bits(const BitString& s, std::size_t start, std::size_t count) {
    BitString out;
    out.bit_len_ = count;
    out.bytes_.assign((count + 7) / 8, 0);
    for (std::size_t i = 0; i < count; ++i)
        if (s.bit(start + i)) out.set_bit(i);
    return out;
}

/// Leftmost L bits of s.
inline BitString lmb(const BitString& s, std::size_t l) {
    if (l > s.bit_length()) throw Error(ErrorCode::too_short, "LMB wants more bits than present");
    return slice_bits(s, 0, l);
}

/// Rightmost L bits of s.
inline BitString rmb(const BitString& s, std::size_t l) {
    if (l > s.bit_length()) throw Error(ErrorCode::too_short, "RMB wants more bits than present");
    return slice_bits(s, s.bit_length() - l, l);
}

inline BitString concat(const BitString& a, const BitString& b) {
    if (a.byte_aligned()) {
        BitString out = a;
        out.bytes_.insert(out.bytes_.end(), b.bytes().begin(), b.bytes().end());
        out.bit_len_ = a.bit_length() + b.bit_length();
        return out;
    }
    BitString out;
    out.bit_len_ = a.bit_length() + b.bit_length();
    out.bytes_.assign((out.bit_len_ + 7) / 8, 0);
    for (std::size_t i = 0; i < a.bit_length(); ++i)
        if (a.bit(i)) out.set_bit(i);
    for (std::size_t i = 0; i < b.bit_length(); ++i)
        if (b.bit(i)) out.set_bit(a.bit_length() + i);
    return out;
}

/// Big-endian unsigned value of the bit string, for decimal display.
inline std::uint64_t bs2di(const BitString& s) {
    if (s.empty()) throw Error(ErrorCode::empty_bitstring, "BS2DI of empty string");
    if (s.bit_length() > 64) throw Error(ErrorCode::too_long, "BS2DI limited to 64 bits");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < s.bit_length(); ++i) v = (v << 1) | (s.bit(i) ? 1 : 0);
    return v;
}

}  // namespace wban
