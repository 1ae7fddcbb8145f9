#pragma once

#include <cstdint>

#include "wban/aes128.hpp"
#include "wban/bitstring.hpp"
#include "wban/bytes.hpp"
#include "wban/errors.hpp"

namespace wban {

using MacKey = Bytes16;

namespace detail {

// GF(2^128) doubling for the CMAC subkeys (NIST SP 800-38B subkey schedule).
inline Bytes16 cmac_double(const Bytes16& in) {
    Bytes16 out{};
    std::uint8_t carry = 0;
    for (int i = 15; i >= 0; --i) {
        out[i] = static_cast<std::uint8_t>((in[i] << 1) | carry);
        carry = in[i] >> 7;
    }
    if (carry) out[15] ^= 0x87;
    return out;
}

}  // namespace detail

/// CMAC with the AES-128 forward cipher per NIST SP 800-38B, truncated to the
/// leftmost out_len bits. The association protocols only ever need 16-, 64-
/// and 128-bit tags over byte-aligned messages; anything else is rejected.
inline BitString cmac(const MacKey& key, const BitString& message, unsigned out_len) {
    if (out_len != 16 && out_len != 64 && out_len != 128)
        throw Error(ErrorCode::bad_length, "unsupported CMAC output length");
    if (!message.byte_aligned())
        throw Error(ErrorCode::misaligned_message, "CMAC input must be byte-aligned");

    Aes128 cipher(key);
    Bytes16 k1 = detail::cmac_double(cipher.encrypt_block(Bytes16{}));
    Bytes16 k2 = detail::cmac_double(k1);

    const Bytes& m = message.bytes();
    std::size_t n_blocks = m.empty() ? 1 : (m.size() + 15) / 16;

    Bytes16 x{};
    for (std::size_t i = 0; i + 1 < n_blocks; ++i) {
        for (int j = 0; j < 16; ++j) x[j] ^= m[16 * i + j];
        x = cipher.encrypt_block(x);
    }

    std::size_t tail_off = 16 * (n_blocks - 1);
    std::size_t tail_len = m.size() - tail_off;
    Bytes16 last{};
    if (!m.empty() && tail_len == 16) {
        for (int j = 0; j < 16; ++j) last[j] = m[tail_off + j] ^ k1[j];
    } else {
        for (std::size_t j = 0; j < tail_len; ++j) last[j] = m[tail_off + j];
        last[tail_len] = 0x80;
        for (int j = 0; j < 16; ++j) last[j] ^= k2[j];
    }
    for (int j = 0; j < 16; ++j) x[j] ^= last[j];
    Bytes16 tag = cipher.encrypt_block(x);

    return lmb(BitString::from_bytes(tag), out_len);
}

inline Bytes16 cmac128(const MacKey& key, const BitString& message) {
    return cmac(key, message, 128).to_array<16>();
}

inline Bytes8 cmac64(const MacKey& key, const BitString& message) {
    return cmac(key, message, 64).to_array<8>();
}

}  // namespace wban
