#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "wban/bitstring.hpp"
#include "wban/bytes.hpp"
#include "wban/cmac.hpp"
#include "wban/curve.hpp"
#include "wban/errors.hpp"
#include "wban/frames.hpp"
#include "wban/password.hpp"
#include "wban/rng.hpp"
#include "wban/u256.hpp"

namespace wban {

/// The four association protocols, numbered as they appear in the SSS.
enum class Protocol : std::uint8_t {
    unauthenticated = 1,
    hidden_public_key = 2,
    password_authenticated = 3,
    display_authenticated = 4,
};

inline const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::unauthenticated: return "I";
        case Protocol::hidden_public_key: return "II";
        case Protocol::password_authenticated: return "III";
        case Protocol::display_authenticated: return "IV";
    }
    return "?";
}

enum class Role : std::uint8_t { initiator, responder };

// ---------------------------------------------------------------------------
// Tag and key derivation
// ---------------------------------------------------------------------------
//
// All four protocols derive the same tag family from the Diffie-Hellman
// X-coordinate; they differ only in what rides in the first nonce slot
// (the initiator nonce N_A, or the commitment W_A for the display variant).

namespace tags {

inline BitString dh_key_bits(const U256& dh_x) {
    return BitString::from_bytes(dh_x.to_be_bytes());
}

/// T_1 = RMB_128(DH_Key)
inline Bytes16 t1_from_dh(const U256& dh_x) {
    return rmb(dh_key_bits(dh_x), 128).to_array<16>();
}

/// T_4 = LMB_128(DH_Key)
inline Bytes16 t4_from_dh(const U256& dh_x) {
    return lmb(dh_key_bits(dh_x), 128).to_array<16>();
}

inline BitString tag_message(std::uint64_t first_id, std::uint64_t second_id,
                             const Bytes16& first_nonce, const Bytes16& second_nonce,
                             std::uint16_t sss) {
    BitString m = BitString::from_u64(first_id, 64);
    m = concat(m, BitString::from_u64(second_id, 64));
    m = concat(m, BitString::from_bytes(first_nonce));
    m = concat(m, BitString::from_bytes(second_nonce));
    m = concat(m, BitString::from_u64(sss, 16));
    return m;
}

/// T_2 = CMAC(T_1, ID_A || ID_B || N_A || N_B || SSS, 64); the display
/// variant puts W_A in the N_A slot.
inline Bytes8 t2(const Bytes16& t1, std::uint64_t id_a, std::uint64_t id_b,
                 const Bytes16& na_or_wa, const Bytes16& nb, std::uint16_t sss) {
    return cmac64(t1, tag_message(id_a, id_b, na_or_wa, nb, sss));
}

/// T_3 = CMAC(T_1, ID_B || ID_A || N_B || N_A || SSS, 64)
inline Bytes8 t3(const Bytes16& t1, std::uint64_t id_a, std::uint64_t id_b,
                 const Bytes16& na_or_wa, const Bytes16& nb, std::uint16_t sss) {
    return cmac64(t1, tag_message(id_b, id_a, nb, na_or_wa, sss));
}

/// MK = CMAC(T_4, N_A || N_B, 128)
inline Bytes16 master_key(const Bytes16& t4, const Bytes16& na, const Bytes16& nb) {
    BitString m = concat(BitString::from_bytes(na), BitString::from_bytes(nb));
    return cmac128(t4, m);
}

/// W_A = CMAC(N_A, ID_A || ID_B || PK_X || PK_Y, 128)
inline Bytes16 commitment(const Bytes16& na, std::uint64_t id_a, std::uint64_t id_b,
                          const U256& pk_x, const U256& pk_y) {
    BitString m = BitString::from_u64(id_a, 64);
    m = concat(m, BitString::from_u64(id_b, 64));
    m = concat(m, BitString::from_bytes(pk_x.to_be_bytes()));
    m = concat(m, BitString::from_bytes(pk_y.to_be_bytes()));
    return cmac128(na, m);
}

/// D = CMAC(N_A || N_B, N_B || N_A || T_1, 16). CMAC keys are 128 bits, so
/// the key is LMB_128(N_A || N_B), which is N_A itself.
inline BitString display_tag(const Bytes16& na, const Bytes16& nb, const Bytes16& t1) {
    BitString m = concat(BitString::from_bytes(nb), BitString::from_bytes(na));
    m = concat(m, BitString::from_bytes(t1));
    return cmac(na, m, 16);
}

}  // namespace tags

/// X(sk * P) for a validated peer point.
inline U256 dh_key_x(const U256& sk, const CurvePoint& peer_pk) {
    CurvePoint shared = scalar_mul(sk, peer_pk);
    if (shared.is_infinity())
        throw std::logic_error("DH product is infinity for a validated point");
    return shared.x();
}

// ---------------------------------------------------------------------------
// Party configuration and session state
// ---------------------------------------------------------------------------

struct PartyConfig {
    Role role = Role::initiator;
    std::uint64_t my_id = 0;
    std::uint64_t peer_id = 0;
    KeyPair static_keys;
    Protocol protocol = Protocol::unauthenticated;
    SecuritySuiteSelector sss;

    /// Hidden-public-key responder: the initiator key received out-of-band.
    std::optional<CurvePoint> preset_peer_public_key;
    /// Password-authenticated variant, both sides.
    std::optional<std::string> password;
};

enum class HaltReason : std::uint8_t {
    mac_mismatch,
    commitment_mismatch,
    invalid_public_key,
    bad_sequence,
    protocol_mismatch,
};

inline const char* halt_reason_name(HaltReason r) {
    switch (r) {
        case HaltReason::mac_mismatch: return "mac_mismatch";
        case HaltReason::commitment_mismatch: return "commitment_mismatch";
        case HaltReason::invalid_public_key: return "invalid_public_key";
        case HaltReason::bad_sequence: return "bad_sequence";
        case HaltReason::protocol_mismatch: return "protocol_mismatch";
    }
    return "unknown";
}

/// Protocol progress, counted in association frames processed so far
/// (sent or verified); the master key exists only in `confirmed`.
enum class Step : std::uint8_t { fresh, sent1, sent2, sent3, confirmed, halted };

inline const char* step_name(Step s) {
    switch (s) {
        case Step::fresh: return "fresh";
        case Step::sent1: return "sent1";
        case Step::sent2: return "sent2";
        case Step::sent3: return "sent3";
        case Step::confirmed: return "confirmed";
        case Step::halted: return "halted";
    }
    return "unknown";
}

struct SessionState {
    Step step = Step::fresh;
    std::optional<HaltReason> halt_reason;

    Protocol protocol = Protocol::unauthenticated;
    Role role = Role::initiator;

    /// Effective keypair: copied from the config on first use; the
    /// password-authenticated initiator may re-sample it when the masked
    /// key would degenerate.
    KeyPair keys;
    bool keys_ready = false;

    Bytes16 nonce_mine{};
    Bytes16 nonce_peer{};
    bool nonce_mine_set = false;
    bool nonce_peer_set = false;

    std::optional<CurvePoint> peer_public_key;
    std::optional<U256> dh_x;
    std::optional<Bytes16> t1;
    std::optional<Bytes16> t4;
    /// Display variant: own W_A on the initiator, received W_A on the
    /// responder.
    std::optional<Bytes16> commitment;
    std::optional<Bytes16> mk;

    bool confirmed() const { return step == Step::confirmed; }
    bool halted() const { return step == Step::halted; }
};

namespace detail {

inline std::optional<Frame> halt(SessionState& st, HaltReason reason) {
    st.step = Step::halted;
    st.halt_reason = reason;
    st.mk.reset();
    return std::nullopt;
}

inline unsigned frames_processed(Step s) {
    switch (s) {
        case Step::fresh: return 0;
        case Step::sent1: return 1;
        case Step::sent2: return 2;
        case Step::sent3: return 3;
        default: return 4;
    }
}

inline Frame make_frame(const PartyConfig& cfg, std::uint8_t seq, const Bytes16& nonce_field,
                        const U256& pk_x, const U256& pk_y, const Bytes8& mac) {
    Frame f;
    f.recipient_id = cfg.peer_id;
    f.sender_id = cfg.my_id;
    f.sss = cfg.sss;
    f.ac = {seq, 0};
    f.nonce_field = nonce_field;
    f.pk_x = pk_x;
    f.pk_y = pk_y;
    f.mac_field = mac;
    return f;
}

inline CurvePoint password_point(const PartyConfig& cfg) {
    if (!cfg.password)
        throw Error(ErrorCode::needs_password, "password-authenticated variant without password");
    return map_password_to_point(U256::from_os2ip(password_to_integer(*cfg.password)));
}

inline void ensure_keys(const PartyConfig& cfg, SessionState& st) {
    if (!st.keys_ready) {
        st.keys = cfg.static_keys;
        st.keys_ready = true;
        st.protocol = cfg.protocol;
        st.role = cfg.role;
    }
}

/// Validate raw frame coordinates; empty result means the frame's key is
/// unusable and the session must halt.
inline std::optional<CurvePoint> checked_point(const Frame& f) {
    UncheckedPoint raw = UncheckedPoint::from_coords(f.pk_x, f.pk_y);
    if (validate_public_key(raw) != KeyValidity::valid) return std::nullopt;
    return CurvePoint::from_affine_unchecked(f.pk_x, f.pk_y);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The state machine
// ---------------------------------------------------------------------------

/// Advances one protocol step. `incoming` empty is the start signal for a
/// fresh initiator and the flush signal for a responder that owes frame 3;
/// it is a no-op otherwise. Returns the outgoing frame, if this step emits
/// one. All checks run in the order: sequence, SSS, public key, MAC.
inline std::optional<Frame> step(const PartyConfig& cfg, SessionState& st,
                                 const std::optional<Frame>& incoming, RandomSource& rng) {
    using detail::halt;
    detail::ensure_keys(cfg, st);

    if (st.step == Step::confirmed || st.step == Step::halted) return std::nullopt;

    if (!incoming) {
        if (cfg.role == Role::initiator && st.step == Step::fresh) {
            st.nonce_mine = rng.nonce128();
            st.nonce_mine_set = true;

            Bytes16 nonce_field = st.nonce_mine;
            U256 pk_x{}, pk_y{};
            switch (cfg.protocol) {
                case Protocol::unauthenticated:
                    pk_x = st.keys.pk.x();
                    pk_y = st.keys.pk.y();
                    break;
                case Protocol::hidden_public_key:
                    break;  // key never rides the channel
                case Protocol::password_authenticated: {
                    CurvePoint q = detail::password_point(cfg);
                    CurvePoint masked = point_sub(st.keys.pk, q);
                    if (masked.is_infinity()) {
                        st.keys = generate_keypair_excluding_x(rng, q.x());
                        masked = point_sub(st.keys.pk, q);
                    }
                    pk_x = masked.x();
                    pk_y = masked.y();
                    break;
                }
                case Protocol::display_authenticated: {
                    st.commitment = tags::commitment(st.nonce_mine, cfg.my_id, cfg.peer_id,
                                                     st.keys.pk.x(), st.keys.pk.y());
                    nonce_field = *st.commitment;
                    pk_x = st.keys.pk.x();
                    pk_y = st.keys.pk.y();
                    break;
                }
            }
            st.step = Step::sent1;
            return detail::make_frame(cfg, 1, nonce_field, pk_x, pk_y, Bytes8{});
        }

        if (cfg.role == Role::responder && st.step == Step::sent2) {
            bool display = cfg.protocol == Protocol::display_authenticated;
            Bytes8 t2 = tags::t2(*st.t1, cfg.peer_id, cfg.my_id,
                                 display ? *st.commitment : st.nonce_peer, st.nonce_mine,
                                 cfg.sss.to_u16());
            st.step = Step::sent3;
            return detail::make_frame(cfg, 3, st.nonce_mine, st.keys.pk.x(), st.keys.pk.y(), t2);
        }
        return std::nullopt;
    }

    const Frame& f = *incoming;
    if (f.recipient_id != cfg.my_id || f.sender_id != cfg.peer_id)
        throw std::invalid_argument("frame not addressed to this party");

    if (f.ac.sequence_number != detail::frames_processed(st.step) + 1)
        return halt(st, HaltReason::bad_sequence);
    if (f.sss != cfg.sss)
        return halt(st, HaltReason::protocol_mismatch);

    const std::uint16_t sss = cfg.sss.to_u16();
    bool display = cfg.protocol == Protocol::display_authenticated;

    // Responder consuming frame 1.
    if (cfg.role == Role::responder && f.ac.sequence_number == 1) {
        switch (cfg.protocol) {
            case Protocol::unauthenticated:
            case Protocol::display_authenticated: {
                auto pk = detail::checked_point(f);
                if (!pk) return halt(st, HaltReason::invalid_public_key);
                st.peer_public_key = *pk;
                break;
            }
            case Protocol::hidden_public_key:
                if (!cfg.preset_peer_public_key)
                    throw Error(ErrorCode::state_incomplete,
                                "responder lacks the out-of-band initiator key");
                st.peer_public_key = *cfg.preset_peer_public_key;
                break;
            case Protocol::password_authenticated: {
                auto masked = detail::checked_point(f);
                if (!masked) return halt(st, HaltReason::invalid_public_key);
                CurvePoint unmasked = point_add(*masked, detail::password_point(cfg));
                if (unmasked.is_infinity()) return halt(st, HaltReason::invalid_public_key);
                st.peer_public_key = unmasked;
                break;
            }
        }
        if (display) {
            st.commitment = f.nonce_field;
        } else {
            st.nonce_peer = f.nonce_field;
            st.nonce_peer_set = true;
        }
        st.nonce_mine = rng.nonce128();
        st.nonce_mine_set = true;
        st.dh_x = dh_key_x(st.keys.sk, *st.peer_public_key);
        st.t1 = tags::t1_from_dh(*st.dh_x);
        st.step = Step::sent2;
        return detail::make_frame(cfg, 2, st.nonce_mine, st.keys.pk.x(), st.keys.pk.y(), Bytes8{});
    }

    // Initiator consuming frame 2.
    if (cfg.role == Role::initiator && f.ac.sequence_number == 2) {
        auto pk = detail::checked_point(f);
        if (!pk) return halt(st, HaltReason::invalid_public_key);
        st.peer_public_key = *pk;
        st.nonce_peer = f.nonce_field;
        st.nonce_peer_set = true;
        st.dh_x = dh_key_x(st.keys.sk, *st.peer_public_key);
        st.t1 = tags::t1_from_dh(*st.dh_x);
        st.step = Step::sent2;
        return std::nullopt;
    }

    // Initiator consuming frame 3, emitting frame 4 and confirming.
    if (cfg.role == Role::initiator && f.ac.sequence_number == 3) {
        const Bytes16& na_or_wa = display ? *st.commitment : st.nonce_mine;
        Bytes8 expected_t2 = tags::t2(*st.t1, cfg.my_id, cfg.peer_id, na_or_wa, st.nonce_peer, sss);
        if (f.mac_field != expected_t2) return halt(st, HaltReason::mac_mismatch);

        Bytes8 t3 = tags::t3(*st.t1, cfg.my_id, cfg.peer_id, na_or_wa, st.nonce_peer, sss);
        U256 pk_x{}, pk_y{};
        if (cfg.protocol != Protocol::hidden_public_key) {
            pk_x = st.keys.pk.x();  // the password variant reveals the unmasked key here
            pk_y = st.keys.pk.y();
        }
        st.t4 = tags::t4_from_dh(*st.dh_x);
        st.mk = tags::master_key(*st.t4, st.nonce_mine, st.nonce_peer);
        st.step = Step::confirmed;
        return detail::make_frame(cfg, 4, st.nonce_mine, pk_x, pk_y, t3);
    }

    // Responder consuming frame 4 and confirming.
    if (cfg.role == Role::responder && f.ac.sequence_number == 4) {
        if (display) {
            auto pk = detail::checked_point(f);
            if (!pk) return halt(st, HaltReason::invalid_public_key);
        }
        const Bytes16& na_or_wa = display ? *st.commitment : st.nonce_peer;
        Bytes8 expected_t3 = tags::t3(*st.t1, cfg.peer_id, cfg.my_id, na_or_wa, st.nonce_mine, sss);
        if (f.mac_field != expected_t3) return halt(st, HaltReason::mac_mismatch);

        if (display) {
            Bytes16 recomputed = tags::commitment(f.nonce_field, cfg.peer_id, cfg.my_id,
                                                  f.pk_x, f.pk_y);
            if (recomputed != *st.commitment) return halt(st, HaltReason::commitment_mismatch);
            st.nonce_peer = f.nonce_field;
            st.nonce_peer_set = true;
        }
        st.t4 = tags::t4_from_dh(*st.dh_x);
        st.mk = tags::master_key(*st.t4, st.nonce_peer, st.nonce_mine);
        st.step = Step::confirmed;
        return std::nullopt;
    }

    return halt(st, HaltReason::bad_sequence);
}

// ---------------------------------------------------------------------------
// Display comparison (display-authenticated variant only)
// ---------------------------------------------------------------------------

struct DisplayValue {
    std::uint16_t value = 0;

    std::string digits() const { return std::to_string(value); }

    friend bool operator==(const DisplayValue&, const DisplayValue&) = default;
};

/// Display_X = BS2DI(D); available once both nonces and T_1 are known.
inline DisplayValue compute_display(const SessionState& st) {
    if (st.protocol != Protocol::display_authenticated)
        throw Error(ErrorCode::wrong_variant, "displays exist only in the display variant");
    if (!st.nonce_mine_set || !st.nonce_peer_set || !st.t1)
        throw Error(ErrorCode::state_incomplete, "display needs both nonces and T_1");
    const Bytes16& na = st.role == Role::initiator ? st.nonce_mine : st.nonce_peer;
    const Bytes16& nb = st.role == Role::initiator ? st.nonce_peer : st.nonce_mine;
    return DisplayValue{static_cast<std::uint16_t>(bs2di(tags::display_tag(na, nb, *st.t1)))};
}

/// The human comparison step, as an oracle.
inline bool confirm_displays(const DisplayValue& a, const DisplayValue& b) { return a == b; }

// ---------------------------------------------------------------------------
// Config construction
// ---------------------------------------------------------------------------

inline SecuritySuiteSelector default_sss(Protocol p) {
    SecuritySuiteSelector s;
    s.protocol_id = static_cast<std::uint8_t>(p);
    s.security_level = 2;
    s.control_frame_auth = false;
    s.cipher_function = 1;
    return s;
}

struct SessionSetup {
    PartyConfig initiator;
    PartyConfig responder;
};

/// Builds a matched pair of honest configs: fresh keypairs (the
/// password-authenticated initiator avoids X(PK) = X(Q(PW))), the
/// out-of-band key preset for the hidden-public-key responder, and a
/// shared SSS.
inline SessionSetup make_honest_setup(Protocol protocol, std::uint64_t initiator_id,
                                      std::uint64_t responder_id, RandomSource& rng,
                                      const std::optional<std::string>& password = {}) {
    SessionSetup s;
    s.initiator.role = Role::initiator;
    s.initiator.my_id = initiator_id;
    s.initiator.peer_id = responder_id;
    s.initiator.protocol = protocol;
    s.initiator.sss = default_sss(protocol);

    s.responder = s.initiator;
    s.responder.role = Role::responder;
    s.responder.my_id = responder_id;
    s.responder.peer_id = initiator_id;

    if (protocol == Protocol::password_authenticated) {
        if (!password) throw Error(ErrorCode::needs_password, "variant III requires a password");
        s.initiator.password = password;
        s.responder.password = password;
        CurvePoint q = map_password_to_point(U256::from_os2ip(password_to_integer(*password)));
        s.initiator.static_keys = generate_keypair_excluding_x(rng, q.x());
    } else {
        s.initiator.static_keys = generate_keypair(rng);
    }
    s.responder.static_keys = generate_keypair(rng);

    if (protocol == Protocol::hidden_public_key)
        s.responder.preset_peer_public_key = s.initiator.static_keys.pk;

    return s;
}

}  // namespace wban
