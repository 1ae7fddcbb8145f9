#pragma once

#include <cstdint>
#include <string_view>

#include "wban/bytes.hpp"
#include "wban/errors.hpp"

namespace wban {

namespace detail {

inline std::uint32_t decode_utf8_codepoint(std::string_view in, std::size_t& pos) {
    auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(in[i]); };
    std::uint8_t b0 = byte(pos);
    std::size_t len;
    std::uint32_t cp;
    if (b0 < 0x80) {
        len = 1;
        cp = b0;
    } else if ((b0 & 0xe0) == 0xc0) {
        len = 2;
        cp = b0 & 0x1f;
    } else if ((b0 & 0xf0) == 0xe0) {
        len = 3;
        cp = b0 & 0x0f;
    } else if ((b0 & 0xf8) == 0xf0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        throw Error(ErrorCode::invalid_utf8, "bad lead byte");
    }
    if (pos + len > in.size()) throw Error(ErrorCode::invalid_utf8, "truncated sequence");
    for (std::size_t i = 1; i < len; ++i) {
        std::uint8_t b = byte(pos + i);
        if ((b & 0xc0) != 0x80) throw Error(ErrorCode::invalid_utf8, "bad continuation byte");
        cp = (cp << 6) | (b & 0x3f);
    }
    static constexpr std::uint32_t min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len]) throw Error(ErrorCode::invalid_utf8, "overlong encoding");
    if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff))
        throw Error(ErrorCode::invalid_utf8, "codepoint out of range");
    pos += len;
    return cp;
}

}  // namespace detail

/// UTF-16BE octets of a UTF-8 string, leftmost octet most significant.
inline Bytes utf16be_octets(std::string_view utf8) {
    Bytes out;
    std::size_t pos = 0;
    while (pos < utf8.size()) {
        std::uint32_t cp = detail::decode_utf8_codepoint(utf8, pos);
        if (cp <= 0xffff) {
            out.push_back(static_cast<std::uint8_t>(cp >> 8));
            out.push_back(static_cast<std::uint8_t>(cp));
        } else {
            std::uint32_t v = cp - 0x10000;
            std::uint16_t hi = static_cast<std::uint16_t>(0xd800 | (v >> 10));
            std::uint16_t lo = static_cast<std::uint16_t>(0xdc00 | (v & 0x3ff));
            out.push_back(static_cast<std::uint8_t>(hi >> 8));
            out.push_back(static_cast<std::uint8_t>(hi));
            out.push_back(static_cast<std::uint8_t>(lo >> 8));
            out.push_back(static_cast<std::uint8_t>(lo));
        }
    }
    return out;
}

/// The password as a nonnegative integer: UTF-16BE octet string interpreted
/// big-endian (IEEE 1363 OS2IP), returned in canonical form with leading
/// zero octets stripped.
inline Bytes password_to_integer(std::string_view password) {
    if (password.empty()) throw Error(ErrorCode::empty_password, "empty password");
    Bytes octets = utf16be_octets(password);
    std::size_t skip = 0;
    while (skip < octets.size() && octets[skip] == 0) ++skip;
    return Bytes(octets.begin() + static_cast<std::ptrdiff_t>(skip), octets.end());
}

}  // namespace wban
