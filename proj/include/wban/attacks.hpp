#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "wban/curve.hpp"
#include "wban/errors.hpp"
#include "wban/harness.hpp"
#include "wban/password.hpp"
#include "wban/protocols.hpp"
#include "wban/rng.hpp"

namespace wban {

/// Result of one adversary scenario. `succeeded` is mechanical: master-key
/// equality for impersonation-style attacks, exact recovery for the
/// dictionary attack.
struct AttackOutcome {
    std::optional<Bytes16> adversary_mk;
    std::optional<Bytes16> honest_mk;
    std::optional<std::string> recovered_password;
    std::optional<DisplayValue> display_adversary;
    std::optional<DisplayValue> display_victim;
    bool succeeded = false;
    Transcript transcript;
};

/// Tamper switches for negative controls; a well-behaved adversary leaves
/// them off.
struct ImpersonationOptions {
    bool corrupt_final_mac = false;   // flip a bit in the last tag M sends
    bool reveal_wrong_nonce = false;  // display variant: open the commitment with a different nonce
};

namespace detail {

inline Frame adversary_frame(std::uint64_t recipient, std::uint64_t sender,
                             const SecuritySuiteSelector& sss, std::uint8_t seq,
                             const Bytes16& nonce_field, const U256& pk_x, const U256& pk_y,
                             const Bytes8& mac) {
    Frame f;
    f.recipient_id = recipient;
    f.sender_id = sender;
    f.sss = sss;
    f.ac = {seq, 0};
    f.nonce_field = nonce_field;
    f.pk_x = pk_x;
    f.pk_y = pk_y;
    f.mac_field = mac;
    return f;
}

inline std::optional<DisplayValue> display_if_ready(const SessionState& st) {
    if (st.protocol != Protocol::display_authenticated) return std::nullopt;
    if (!st.nonce_mine_set || !st.nonce_peer_set || !st.t1) return std::nullopt;
    return compute_display(st);
}

/// M assumes the initiator identity against an honest responder victim.
/// For the password variant M masks its key with q_prime instead of Q(PW).
inline AttackOutcome impersonate_toward_responder(const PartyConfig& victim, RandomSource& rng,
                                                  const ImpersonationOptions& opts,
                                                  const std::optional<CurvePoint>& q_prime) {
    const std::uint64_t id_a = victim.peer_id;
    const std::uint64_t id_b = victim.my_id;
    const std::uint16_t sss = victim.sss.to_u16();
    const Protocol proto = victim.protocol;
    const bool display = proto == Protocol::display_authenticated;

    AttackOutcome out;
    SessionState st_b;

    KeyPair m_keys = generate_keypair(rng);
    Bytes16 n_m = rng.nonce128();

    Bytes16 f1_nonce = n_m;
    U256 f1_x = m_keys.pk.x(), f1_y = m_keys.pk.y();
    Bytes16 w_m{};
    if (proto == Protocol::password_authenticated) {
        CurvePoint masked = point_sub(m_keys.pk, *q_prime);
        for (int i = 0; masked.is_infinity() && i < 64; ++i) {
            m_keys = generate_keypair(rng);
            masked = point_sub(m_keys.pk, *q_prime);
        }
        if (masked.is_infinity())
            throw Error(ErrorCode::keygen_exhausted, "masked adversary key stayed degenerate");
        f1_x = masked.x();
        f1_y = masked.y();
    } else if (display) {
        w_m = tags::commitment(n_m, id_a, id_b, m_keys.pk.x(), m_keys.pk.y());
        f1_nonce = w_m;
    }

    Frame f1 = adversary_frame(id_b, id_a, victim.sss, 1, f1_nonce, f1_x, f1_y, Bytes8{});
    out.transcript.add("M→B:", f1);
    auto f2 = step(victim, st_b, f1, rng);
    if (!f2) return out;  // responder refused frame 1
    out.transcript.add("B→M:", *f2);
    auto f3 = step(victim, st_b, std::nullopt, rng);
    if (!f3) return out;
    out.transcript.add("B→M:", *f3);

    const Bytes16 n_b = f2->nonce_field;
    CurvePoint pk_b = CurvePoint::from_affine(f2->pk_x, f2->pk_y);
    U256 dh = dh_key_x(m_keys.sk, pk_b);
    Bytes16 t1 = tags::t1_from_dh(dh);

    const Bytes16& na_or_wa = display ? w_m : n_m;
    Bytes8 t3 = tags::t3(t1, id_a, id_b, na_or_wa, n_b, sss);
    if (opts.corrupt_final_mac) t3[0] ^= 0x01;

    Bytes16 f4_nonce = n_m;
    if (opts.reveal_wrong_nonce) f4_nonce[0] ^= 0x01;
    Frame f4 = adversary_frame(id_b, id_a, victim.sss, 4, f4_nonce, m_keys.pk.x(),
                               m_keys.pk.y(), t3);
    out.transcript.add("M→B:", f4);
    step(victim, st_b, f4, rng);

    out.adversary_mk = tags::master_key(tags::t4_from_dh(dh), n_m, n_b);
    out.honest_mk = st_b.mk;
    out.succeeded = st_b.confirmed() && out.honest_mk == out.adversary_mk;
    if (display) {
        out.display_adversary = DisplayValue{
            static_cast<std::uint16_t>(bs2di(tags::display_tag(n_m, n_b, t1)))};
        out.display_victim = display_if_ready(st_b);
    }
    return out;
}

/// M assumes the responder identity against an honest initiator victim.
inline AttackOutcome impersonate_toward_initiator(const PartyConfig& victim, RandomSource& rng,
                                                  const ImpersonationOptions& opts,
                                                  const std::optional<CurvePoint>& q_prime) {
    const std::uint64_t id_a = victim.my_id;
    const std::uint64_t id_b = victim.peer_id;
    const std::uint16_t sss = victim.sss.to_u16();
    const Protocol proto = victim.protocol;
    const bool display = proto == Protocol::display_authenticated;

    AttackOutcome out;
    SessionState st_a;

    auto f1 = step(victim, st_a, std::nullopt, rng);
    if (!f1) return out;
    out.transcript.add("A→M:", *f1);

    CurvePoint pk_a;
    if (proto == Protocol::password_authenticated) {
        CurvePoint masked = CurvePoint::from_affine(f1->pk_x, f1->pk_y);
        pk_a = point_add(masked, *q_prime);
    } else {
        pk_a = CurvePoint::from_affine(f1->pk_x, f1->pk_y);
    }
    const Bytes16 na_slot = f1->nonce_field;  // N_A, or W_A in the display variant

    KeyPair m_keys = generate_keypair(rng);
    Bytes16 n_m = rng.nonce128();

    Frame f2 = adversary_frame(id_a, id_b, victim.sss, 2, n_m, m_keys.pk.x(), m_keys.pk.y(),
                               Bytes8{});
    out.transcript.add("M→A:", f2);
    step(victim, st_a, f2, rng);

    U256 dh = dh_key_x(m_keys.sk, pk_a);
    Bytes16 t1 = tags::t1_from_dh(dh);
    Bytes8 t2 = tags::t2(t1, id_a, id_b, na_slot, n_m, sss);
    if (opts.corrupt_final_mac) t2[0] ^= 0x01;

    Frame f3 = adversary_frame(id_a, id_b, victim.sss, 3, n_m, m_keys.pk.x(), m_keys.pk.y(), t2);
    out.transcript.add("M→A:", f3);
    auto f4 = step(victim, st_a, f3, rng);
    if (!f4) {
        out.honest_mk = st_a.mk;
        return out;  // victim halted before confirming
    }
    out.transcript.add("A→M:", *f4);

    const Bytes16 n_a = display ? f4->nonce_field : na_slot;
    out.adversary_mk = tags::master_key(tags::t4_from_dh(dh), n_a, n_m);
    out.honest_mk = st_a.mk;
    out.succeeded = st_a.confirmed() && out.honest_mk == out.adversary_mk;
    if (display) {
        out.display_adversary = DisplayValue{
            static_cast<std::uint16_t>(bs2di(tags::display_tag(n_a, n_m, t1)))};
        out.display_victim = display_if_ready(st_a);
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Impersonation of either identity in the unauthenticated protocol
// ---------------------------------------------------------------------------

/// The adversary knows only public identities; it completes the whole flow
/// with a fresh keypair and nonce. The victim's role picks the direction:
/// a responder victim means M plays the initiator, and vice versa.
inline AttackOutcome impersonate_p1(const PartyConfig& victim, RandomSource& rng,
                                    const ImpersonationOptions& opts = {}) {
    if (victim.protocol != Protocol::unauthenticated)
        throw Error(ErrorCode::wrong_variant, "impersonate_p1 targets protocol I");
    return victim.role == Role::responder
               ? detail::impersonate_toward_responder(victim, rng, opts, std::nullopt)
               : detail::impersonate_toward_initiator(victim, rng, opts, std::nullopt);
}

// ---------------------------------------------------------------------------
// Key-compromise impersonation of the hub in the hidden-public-key protocol
// ---------------------------------------------------------------------------

/// M holds the initiator's compromised private key and the responder's
/// public key from an eavesdropped run, hijacks the session and answers as
/// the responder. The Diffie-Hellman value X(SK_A x PK_B) needs no
/// responder secret at all. `present_instead` lets a negative control show
/// the victim a different key than the one M computes with; the resulting
/// DH values diverge and the hijack fails closed.
inline AttackOutcome kci_p2(const U256& compromised_sk_a, const CurvePoint& known_pk_b,
                            const PartyConfig& victim_a, RandomSource& rng,
                            const std::optional<CurvePoint>& present_instead = {}) {
    if (victim_a.protocol != Protocol::hidden_public_key || victim_a.role != Role::initiator)
        throw Error(ErrorCode::unsupported_combination, "kci_p2 wants a protocol II initiator");

    const std::uint64_t id_a = victim_a.my_id;
    const std::uint64_t id_b = victim_a.peer_id;
    const std::uint16_t sss = victim_a.sss.to_u16();
    const CurvePoint& shown = present_instead ? *present_instead : known_pk_b;

    AttackOutcome out;
    SessionState st_a;

    auto f1 = step(victim_a, st_a, std::nullopt, rng);
    if (!f1) return out;
    out.transcript.add("A→M:", *f1);
    const Bytes16 n_a = f1->nonce_field;

    Bytes16 n_m = rng.nonce128();
    Frame f2 = detail::adversary_frame(id_a, id_b, victim_a.sss, 2, n_m, shown.x(),
                                       shown.y(), Bytes8{});
    out.transcript.add("M→A:", f2);
    step(victim_a, st_a, f2, rng);

    U256 dh = dh_key_x(compromised_sk_a, known_pk_b);
    Bytes16 t1 = tags::t1_from_dh(dh);
    Bytes8 t2 = tags::t2(t1, id_a, id_b, n_a, n_m, sss);

    Frame f3 = detail::adversary_frame(id_a, id_b, victim_a.sss, 3, n_m, shown.x(),
                                       shown.y(), t2);
    out.transcript.add("M→A:", f3);
    auto f4 = step(victim_a, st_a, f3, rng);
    if (f4) out.transcript.add("A→M:", *f4);

    out.adversary_mk = tags::master_key(tags::t4_from_dh(dh), n_a, n_m);
    out.honest_mk = st_a.mk;
    out.succeeded = st_a.confirmed() && out.honest_mk == out.adversary_mk;
    return out;
}

// ---------------------------------------------------------------------------
// Password-point recovery and impersonation in the password variant
// ---------------------------------------------------------------------------

/// Q' = PK_A - PK'_A from frames 4 and 1 of a completed run; this equals
/// Q(PW) without any knowledge of the password.
inline CurvePoint recover_q_prime(const Transcript& t) {
    auto f1 = t.find_seq(1);
    auto f4 = t.find_seq(4);
    if (!f1 || !f4)
        throw Error(ErrorCode::incomplete_transcript, "need frames 1 and 4");
    if (f1->sss.protocol_id != static_cast<std::uint8_t>(Protocol::password_authenticated))
        throw Error(ErrorCode::incomplete_transcript, "no masked key in this variant");
    if (validate_public_key(UncheckedPoint::from_coords(f1->pk_x, f1->pk_y)) != KeyValidity::valid ||
        validate_public_key(UncheckedPoint::from_coords(f4->pk_x, f4->pk_y)) != KeyValidity::valid)
        throw Error(ErrorCode::incomplete_transcript, "transcript carries unusable keys");
    CurvePoint masked = CurvePoint::from_affine_unchecked(f1->pk_x, f1->pk_y);
    CurvePoint pk_a = CurvePoint::from_affine_unchecked(f4->pk_x, f4->pk_y);
    return point_sub(pk_a, masked);
}

/// Impersonation with a recovered Q': M masks its own key with Q' and runs
/// the flow; the victim unmasks with the true Q(PW) and lands on M's key.
inline AttackOutcome impersonate_p3(const CurvePoint& q_prime, const PartyConfig& victim,
                                    RandomSource& rng, const ImpersonationOptions& opts = {}) {
    if (victim.protocol != Protocol::password_authenticated)
        throw Error(ErrorCode::wrong_variant, "impersonate_p3 targets protocol III");
    return victim.role == Role::responder
               ? detail::impersonate_toward_responder(victim, rng, opts, q_prime)
               : detail::impersonate_toward_initiator(victim, rng, opts, q_prime);
}

// ---------------------------------------------------------------------------
// Offline dictionary attack on the password variant
// ---------------------------------------------------------------------------

enum class DictionaryVerifier {
    floor_division,  // PW = floor(Q_X / 2^32); one integer comparison per candidate
    point_equality,  // map every candidate onto the curve and compare points
};

/// Tries every candidate against the verifier derived from one recorded
/// run. The packing Q_X = 2^32 PW + M_X pins PW exactly, so a hit is the
/// shared password.
inline AttackOutcome dictionary_p3(const Transcript& t, const std::vector<std::string>& dictionary,
                                   DictionaryVerifier verifier = DictionaryVerifier::floor_division) {
    CurvePoint q_prime = recover_q_prime(t);
    Bytes32 target = password_integer_from_x(q_prime.x()).to_be_bytes();

    for (const std::string& candidate : dictionary) {
        if (candidate.empty()) continue;
        bool match = false;
        try {
            if (verifier == DictionaryVerifier::floor_division) {
                match = compare_be_integers(password_to_integer(candidate), target) == 0;
            } else {
                U256 pw = U256::from_os2ip(password_to_integer(candidate));
                match = map_password_to_point(pw) == q_prime;
            }
        } catch (const Error&) {
            continue;  // candidate does not even map into the field
        }
        if (match) {
            AttackOutcome out;
            out.recovered_password = candidate;
            out.succeeded = true;
            out.transcript = t;
            return out;
        }
    }
    throw Error(ErrorCode::not_in_dictionary, "no candidate maps to Q_X");
}

// ---------------------------------------------------------------------------
// Impersonation in the display variant
// ---------------------------------------------------------------------------

/// M commits to its own key and nonce; both displays derive from the same
/// values, so the human check cannot tell M from the claimed identity.
inline AttackOutcome impersonate_p4(const PartyConfig& victim, RandomSource& rng,
                                    const ImpersonationOptions& opts = {}) {
    if (victim.protocol != Protocol::display_authenticated)
        throw Error(ErrorCode::wrong_variant, "impersonate_p4 targets protocol IV");
    return victim.role == Role::responder
               ? detail::impersonate_toward_responder(victim, rng, opts, std::nullopt)
               : detail::impersonate_toward_initiator(victim, rng, opts, std::nullopt);
}

// ---------------------------------------------------------------------------
// Forward-secrecy break from a recorded transcript plus one static key
// ---------------------------------------------------------------------------

enum class CompromisedParty { initiator, responder };

/// Recomputes the session master key offline: peer public key and both
/// nonces come off the wire, the compromised static key supplies the
/// Diffie-Hellman secret. The hidden-public-key variant never exposes the
/// initiator key, so compromising the responder there gains nothing; the
/// password variant additionally needs the password to unmask the
/// initiator key when the responder is the compromised side.
inline AttackOutcome break_forward_secrecy(Protocol variant, const Transcript& t,
                                           const U256& compromised_sk, CompromisedParty whose,
                                           const std::optional<std::string>& password = {},
                                           const std::optional<Bytes16>& honest_mk = {}) {
    if (variant == Protocol::hidden_public_key && whose == CompromisedParty::responder)
        throw Error(ErrorCode::unsupported_combination,
                    "the initiator key never appears on the wire in this variant");

    auto f1 = t.find_seq(1);
    auto f2 = t.find_seq(2);
    if (!f1 || !f2) throw Error(ErrorCode::incomplete_transcript, "need frames 1 and 2");
    if (f1->sss.protocol_id != static_cast<std::uint8_t>(variant))
        throw Error(ErrorCode::incomplete_transcript, "transcript is from a different variant");

    Bytes16 n_a = f1->nonce_field;
    if (variant == Protocol::display_authenticated) {
        auto f4 = t.find_seq(4);  // frame 1 carries the commitment, not the nonce
        if (!f4) throw Error(ErrorCode::incomplete_transcript, "need frame 4 for the revealed nonce");
        n_a = f4->nonce_field;
    }
    const Bytes16 n_b = f2->nonce_field;

    CurvePoint peer_pk;
    if (whose == CompromisedParty::initiator) {
        if (validate_public_key(UncheckedPoint::from_coords(f2->pk_x, f2->pk_y)) != KeyValidity::valid)
            throw Error(ErrorCode::incomplete_transcript, "responder key unusable");
        peer_pk = CurvePoint::from_affine_unchecked(f2->pk_x, f2->pk_y);
    } else {
        switch (variant) {
            case Protocol::unauthenticated:
            case Protocol::display_authenticated:
                if (validate_public_key(UncheckedPoint::from_coords(f1->pk_x, f1->pk_y)) !=
                    KeyValidity::valid)
                    throw Error(ErrorCode::incomplete_transcript, "initiator key unusable");
                peer_pk = CurvePoint::from_affine_unchecked(f1->pk_x, f1->pk_y);
                break;
            case Protocol::password_authenticated: {
                if (!password)
                    throw Error(ErrorCode::needs_password,
                                "unmasking the initiator key requires the password");
                CurvePoint masked = CurvePoint::from_affine(f1->pk_x, f1->pk_y);
                CurvePoint q = map_password_to_point(U256::from_os2ip(password_to_integer(*password)));
                peer_pk = point_add(masked, q);
                break;
            }
            case Protocol::hidden_public_key:
                throw Error(ErrorCode::unsupported_combination, "unreachable");
        }
    }

    U256 dh = dh_key_x(compromised_sk, peer_pk);
    AttackOutcome out;
    out.adversary_mk = tags::master_key(tags::t4_from_dh(dh), n_a, n_b);
    out.honest_mk = honest_mk;
    out.succeeded = honest_mk && out.adversary_mk == honest_mk;
    out.transcript = t;
    return out;
}

// ---------------------------------------------------------------------------
// Dictionary file loading
// ---------------------------------------------------------------------------

/// Plain text, one password per line, UTF-8.
inline std::vector<std::string> load_dictionary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open dictionary " + path);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) words.push_back(line);
    }
    return words;
}

}  // namespace wban
