#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "wban/bytes.hpp"
#include "wban/errors.hpp"
#include "wban/u256.hpp"

namespace wban {

/// Security Suite Selector, 16 bits on the wire: protocol (3), security
/// level (2), control frame authentication (1), cipher function (4),
/// reserved (6). Leftmost field occupies the most significant bits.
struct SecuritySuiteSelector {
    std::uint8_t protocol_id = 1;     // 1..4
    std::uint8_t security_level = 2;  // 0..2
    bool control_frame_auth = false;
    std::uint8_t cipher_function = 1;  // 4-bit selector

    std::uint16_t to_u16() const {
        return static_cast<std::uint16_t>((protocol_id & 0x7) << 13 |
                                          (security_level & 0x3) << 11 |
                                          (control_frame_auth ? 1 : 0) << 10 |
                                          (cipher_function & 0xf) << 6);
    }

    static SecuritySuiteSelector from_u16(std::uint16_t v) {
        if (v & 0x003f) throw Error(ErrorCode::reserved_nonzero, "SSS reserved bits set");
        SecuritySuiteSelector s;
        s.protocol_id = static_cast<std::uint8_t>((v >> 13) & 0x7);
        s.security_level = static_cast<std::uint8_t>((v >> 11) & 0x3);
        s.control_frame_auth = (v >> 10) & 1;
        s.cipher_function = static_cast<std::uint8_t>((v >> 6) & 0xf);
        return s;
    }

    friend bool operator==(const SecuritySuiteSelector&, const SecuritySuiteSelector&) = default;
};

/// Association Control, 16 bits: sequence number (4), status (4),
/// reserved (8). The sequence number starts at 1 and increments per frame.
struct AssociationControl {
    std::uint8_t sequence_number = 0;
    std::uint8_t status = 0;

    std::uint16_t to_u16() const {
        return static_cast<std::uint16_t>((sequence_number & 0xf) << 12 | (status & 0xf) << 8);
    }

    static AssociationControl from_u16(std::uint16_t v) {
        if (v & 0x00ff) throw Error(ErrorCode::reserved_nonzero, "AC reserved bits set");
        return {static_cast<std::uint8_t>((v >> 12) & 0xf), static_cast<std::uint8_t>((v >> 8) & 0xf)};
    }

    friend bool operator==(const AssociationControl&, const AssociationControl&) = default;
};

/// One security-association frame. The nonce field carries the sender's
/// nonce, the commitment W_A, or the revealed nonce depending on protocol
/// and step; the MAC field carries the zero placeholder or a 64-bit tag.
struct Frame {
    std::uint64_t recipient_id = 0;
    std::uint64_t sender_id = 0;
    SecuritySuiteSelector sss;
    AssociationControl ac;
    Bytes16 nonce_field{};
    U256 pk_x{};
    U256 pk_y{};
    Bytes8 mac_field{};

    friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr std::size_t kFrameOctets = 108;
using FrameBytes = std::array<std::uint8_t, kFrameOctets>;

/// Big-endian field concatenation: recipient, sender, SSS, AC, nonce,
/// PK_X, PK_Y, MAC; 108 octets in total. The codec checks field widths only;
/// semantic SSS validity (a known protocol number, a defined security
/// level) is the session layer's business.
inline FrameBytes encode_frame(const Frame& f) {
    if (f.sss.protocol_id > 0x7)
        throw Error(ErrorCode::invalid_field, "protocol id wider than 3 bits");
    if (f.sss.security_level > 0x3)
        throw Error(ErrorCode::invalid_field, "security level wider than 2 bits");
    if (f.sss.cipher_function > 0xf)
        throw Error(ErrorCode::invalid_field, "cipher function wider than 4 bits");
    if (f.ac.sequence_number > 0xf || f.ac.status > 0xf)
        throw Error(ErrorCode::invalid_field, "association control nibble out of range");

    FrameBytes out{};
    std::uint8_t* p = out.data();
    store_be64(f.recipient_id, p);
    store_be64(f.sender_id, p + 8);
    std::uint16_t sss = f.sss.to_u16();
    p[16] = static_cast<std::uint8_t>(sss >> 8);
    p[17] = static_cast<std::uint8_t>(sss);
    std::uint16_t ac = f.ac.to_u16();
    p[18] = static_cast<std::uint8_t>(ac >> 8);
    p[19] = static_cast<std::uint8_t>(ac);
    std::copy(f.nonce_field.begin(), f.nonce_field.end(), p + 20);
    Bytes32 x = f.pk_x.to_be_bytes();
    Bytes32 y = f.pk_y.to_be_bytes();
    std::copy(x.begin(), x.end(), p + 36);
    std::copy(y.begin(), y.end(), p + 68);
    std::copy(f.mac_field.begin(), f.mac_field.end(), p + 100);
    return out;
}

inline Frame decode_frame(std::span<const std::uint8_t> raw) {
    if (raw.size() != kFrameOctets)
        throw Error(ErrorCode::bad_length, "frame must be " + std::to_string(kFrameOctets) +
                                               " octets, got " + std::to_string(raw.size()));
    Frame f;
    const std::uint8_t* p = raw.data();
    f.recipient_id = load_be64(p);
    f.sender_id = load_be64(p + 8);
    f.sss = SecuritySuiteSelector::from_u16(static_cast<std::uint16_t>(p[16] << 8 | p[17]));
    f.ac = AssociationControl::from_u16(static_cast<std::uint16_t>(p[18] << 8 | p[19]));
    std::copy(p + 20, p + 36, f.nonce_field.begin());
    Bytes32 x{}, y{};
    std::copy(p + 36, p + 68, x.begin());
    std::copy(p + 68, p + 100, y.begin());
    f.pk_x = U256::from_be_bytes(x);
    f.pk_y = U256::from_be_bytes(y);
    std::copy(p + 100, p + 108, f.mac_field.begin());
    return f;
}

}  // namespace wban
