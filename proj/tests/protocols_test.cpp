#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <set>
#include <vector>

#include "test_oracles.hpp"
#include "wban/protocols.hpp"
#include "wban/rng.hpp"

using namespace wban;

namespace {

constexpr std::uint64_t kIdA = 0xa1a1a1a1a1a1a1a1ULL;
constexpr std::uint64_t kIdB = 0xb2b2b2b2b2b2b2b2ULL;

struct ManualRun {
    SessionState st_a;
    SessionState st_b;
    std::vector<Frame> frames;  // in transmission order, post-tamper
};

/// Direct two-party run without the harness: the strictly alternating
/// four-frame dance, with an optional in-flight mutator per frame.
ManualRun manual_run(const SessionSetup& setup, RandomSource& rng,
                     const std::function<void(int, Frame&)>& tamper = {}) {
    ManualRun r;
    auto pass = [&](std::optional<Frame> f, int idx) -> std::optional<Frame> {
        if (f && tamper) tamper(idx, *f);
        if (f) r.frames.push_back(*f);
        return f;
    };
    auto f1 = pass(step(setup.initiator, r.st_a, std::nullopt, rng), 1);
    if (!f1) return r;
    auto f2 = pass(step(setup.responder, r.st_b, f1, rng), 2);
    if (!f2) return r;
    step(setup.initiator, r.st_a, f2, rng);
    auto f3 = pass(step(setup.responder, r.st_b, std::nullopt, rng), 3);
    if (!f3) return r;
    auto f4 = pass(step(setup.initiator, r.st_a, f3, rng), 4);
    if (!f4) return r;
    step(setup.responder, r.st_b, f4, rng);
    return r;
}

const std::vector<Protocol> kAllProtocols = {
    Protocol::unauthenticated,
    Protocol::hidden_public_key,
    Protocol::password_authenticated,
    Protocol::display_authenticated,
};

std::optional<std::string> password_for(Protocol p) {
    if (p == Protocol::password_authenticated) return "correct horse";
    return std::nullopt;
}

}  // namespace

TEST_CASE("honest runs confirm with matching master keys") {
    for (Protocol proto : kAllProtocols) {
        for (std::uint64_t seed = 1; seed <= 8; ++seed) {
            CtrRandomSource rng(seed);
            SessionSetup setup = make_honest_setup(proto, kIdA, kIdB, rng, password_for(proto));
            ManualRun r = manual_run(setup, rng);
            INFO("protocol " << protocol_name(proto) << " seed " << seed);
            REQUIRE(r.st_a.confirmed());
            REQUIRE(r.st_b.confirmed());
            REQUIRE(r.st_a.mk.has_value());
            CHECK(r.st_a.mk == r.st_b.mk);
            CHECK(r.frames.size() == 4);
            for (std::size_t i = 0; i < 4; ++i)
                CHECK(r.frames[i].ac.sequence_number == i + 1);
        }
    }
}

TEST_CASE("master key matches the two-private-key derivation oracle") {
    for (Protocol proto : kAllProtocols) {
        CtrRandomSource rng(0xdead0000 + static_cast<int>(proto));
        SessionSetup setup = make_honest_setup(proto, kIdA, kIdB, rng, password_for(proto));
        ManualRun r = manual_run(setup, rng);
        REQUIRE(r.st_a.confirmed());

        // Same key through the other algebraic route: (sk_a * sk_b mod n) G,
        // the scalar product reduced with the peasant-arithmetic oracle.
        U256 product = oracle::mulmod(r.st_a.keys.sk, setup.responder.static_keys.sk, p256::kOrder);
        U256 dh = scalar_mul(product, base_point()).x();
        Bytes16 t4 = tags::t4_from_dh(dh);
        Bytes16 n_a = r.st_a.nonce_mine;
        Bytes16 n_b = r.st_b.nonce_mine;
        CHECK(tags::master_key(t4, n_a, n_b) == *r.st_a.mk);

        // Confirmed-state tag invariants.
        CHECK(*r.st_a.t1 == tags::t1_from_dh(*r.st_a.dh_x));
        CHECK(*r.st_a.t4 == tags::t4_from_dh(*r.st_a.dh_x));
        CHECK(r.st_a.dh_x == r.st_b.dh_x);
    }
}

TEST_CASE("tampered frame 3 halts the initiator") {
    for (Protocol proto : kAllProtocols) {
        CtrRandomSource rng(99);
        SessionSetup setup = make_honest_setup(proto, kIdA, kIdB, rng, password_for(proto));
        ManualRun r = manual_run(setup, rng, [](int idx, Frame& f) {
            if (idx == 3) f.mac_field[3] ^= 0x10;
        });
        CHECK(r.st_a.halted());
        CHECK(r.st_a.halt_reason == HaltReason::mac_mismatch);
        CHECK_FALSE(r.st_a.mk.has_value());
    }
}

TEST_CASE("tampered frame 4 halts the responder") {
    for (Protocol proto : kAllProtocols) {
        CtrRandomSource rng(98);
        SessionSetup setup = make_honest_setup(proto, kIdA, kIdB, rng, password_for(proto));
        ManualRun r = manual_run(setup, rng, [](int idx, Frame& f) {
            if (idx == 4) f.mac_field[0] ^= 0x01;
        });
        CHECK(r.st_b.halted());
        CHECK(r.st_b.halt_reason == HaltReason::mac_mismatch);
        CHECK_FALSE(r.st_b.mk.has_value());
    }
}

TEST_CASE("mismatched passwords diverge and halt") {
    CtrRandomSource rng(7);
    SessionSetup setup = make_honest_setup(Protocol::password_authenticated, kIdA, kIdB, rng,
                                           std::string("right password"));
    setup.responder.password = "wrong password";
    ManualRun r = manual_run(setup, rng);
    CHECK(r.st_a.halted());
    CHECK(r.st_a.halt_reason == HaltReason::mac_mismatch);
    REQUIRE(r.st_a.dh_x.has_value());
    REQUIRE(r.st_b.dh_x.has_value());
    CHECK(*r.st_a.dh_x != *r.st_b.dh_x);
}

TEST_CASE("password masking round-trips on the wire") {
    std::string pw = "hunter2";
    CurvePoint q = map_password_to_point(U256::from_os2ip(password_to_integer(pw)));
    for (std::uint64_t seed = 21; seed < 41; ++seed) {
        CtrRandomSource rng(seed);
        SessionSetup setup = make_honest_setup(Protocol::password_authenticated, kIdA, kIdB, rng, pw);
        ManualRun r = manual_run(setup, rng);
        REQUIRE(r.st_b.confirmed());

        CurvePoint masked = CurvePoint::from_affine(r.frames[0].pk_x, r.frames[0].pk_y);
        CHECK(point_add(masked, q) == setup.initiator.static_keys.pk);
        // Frame 4 reveals the unmasked key.
        CHECK(r.frames[3].pk_x == setup.initiator.static_keys.pk.x());
        // The initiator key never equals Q(PW) in X, by construction.
        CHECK(setup.initiator.static_keys.pk.x() != q.x());
    }
}

TEST_CASE("hidden-public-key frames carry zero coordinates from the initiator") {
    CtrRandomSource rng(31);
    SessionSetup setup = make_honest_setup(Protocol::hidden_public_key, kIdA, kIdB, rng);
    ManualRun r = manual_run(setup, rng);
    REQUIRE(r.st_b.confirmed());
    CHECK(r.frames[0].pk_x.is_zero());
    CHECK(r.frames[0].pk_y.is_zero());
    CHECK(r.frames[3].pk_x.is_zero());
    CHECK(r.frames[3].pk_y.is_zero());
    CHECK_FALSE(r.frames[1].pk_x.is_zero());  // responder key rides in clear
}

TEST_CASE("hidden-public-key responder requires the out-of-band key") {
    CtrRandomSource rng(32);
    SessionSetup setup = make_honest_setup(Protocol::hidden_public_key, kIdA, kIdB, rng);
    setup.responder.preset_peer_public_key.reset();
    SessionState st_a, st_b;
    auto f1 = step(setup.initiator, st_a, std::nullopt, rng);
    REQUIRE(f1);
    CHECK_THROWS_AS(step(setup.responder, st_b, f1, rng), Error);
}

TEST_CASE("sequence violations halt") {
    CtrRandomSource rng(44);
    SessionSetup setup = make_honest_setup(Protocol::unauthenticated, kIdA, kIdB, rng);
    ManualRun r = manual_run(setup, rng, [](int idx, Frame& f) {
        if (idx == 3) f.ac.sequence_number = 4;
    });
    CHECK(r.st_a.halted());
    CHECK(r.st_a.halt_reason == HaltReason::bad_sequence);
}

TEST_CASE("SSS mismatch halts") {
    CtrRandomSource rng(45);
    SessionSetup setup = make_honest_setup(Protocol::unauthenticated, kIdA, kIdB, rng);
    ManualRun r = manual_run(setup, rng, [](int idx, Frame& f) {
        if (idx == 2) f.sss.security_level = 1;
    });
    CHECK(r.st_a.halted());
    CHECK(r.st_a.halt_reason == HaltReason::protocol_mismatch);
}

TEST_CASE("checks run cheapest-first: sequence before SSS") {
    CtrRandomSource rng(55);
    SessionSetup setup = make_honest_setup(Protocol::unauthenticated, kIdA, kIdB, rng);
    ManualRun r = manual_run(setup, rng, [](int idx, Frame& f) {
        if (idx == 2) {
            f.ac.sequence_number = 9;
            f.sss.security_level = 1;
        }
    });
    CHECK(r.st_a.halted());
    CHECK(r.st_a.halt_reason == HaltReason::bad_sequence);
}

TEST_CASE("off-curve responder key halts the initiator") {
    CtrRandomSource rng(46);
    SessionSetup setup = make_honest_setup(Protocol::unauthenticated, kIdA, kIdB, rng);
    ManualRun r = manual_run(setup, rng, [](int idx, Frame& f) {
        if (idx == 2) f.pk_y = fp256::add(f.pk_y, U256{1});
    });
    CHECK(r.st_a.halted());
    CHECK(r.st_a.halt_reason == HaltReason::invalid_public_key);
}

TEST_CASE("commitment binds the initiator key after frame 1") {
    CtrRandomSource rng(47);
    SessionSetup setup = make_honest_setup(Protocol::display_authenticated, kIdA, kIdB, rng);
    // Swap in a different valid point: passes validation and the T_3 check,
    // but the reopened commitment cannot match.
    ManualRun r = manual_run(setup, rng, [](int idx, Frame& f) {
        if (idx == 4) {
            f.pk_x = p256::kGx;
            f.pk_y = p256::kGy;
        }
    });
    CHECK(r.st_b.halted());
    CHECK(r.st_b.halt_reason == HaltReason::commitment_mismatch);
    CHECK_FALSE(r.st_b.mk.has_value());
}

TEST_CASE("commitment binds the revealed nonce") {
    CtrRandomSource rng(48);
    SessionSetup setup = make_honest_setup(Protocol::display_authenticated, kIdA, kIdB, rng);
    ManualRun r = manual_run(setup, rng, [](int idx, Frame& f) {
        if (idx == 4) f.nonce_field[5] ^= 0x40;
    });
    CHECK(r.st_b.halted());
    CHECK(r.st_b.halt_reason == HaltReason::commitment_mismatch);
}

TEST_CASE("display values agree on honest display-variant runs") {
    CtrRandomSource rng(49);
    SessionSetup setup = make_honest_setup(Protocol::display_authenticated, kIdA, kIdB, rng);
    ManualRun r = manual_run(setup, rng);
    REQUIRE(r.st_a.confirmed());
    REQUIRE(r.st_b.confirmed());
    DisplayValue da = compute_display(r.st_a);
    DisplayValue db = compute_display(r.st_b);
    CHECK(confirm_displays(da, db));
    CHECK(da.value <= 65535);
    CHECK(da.digits() == std::to_string(da.value));
    CHECK_FALSE(confirm_displays(da, DisplayValue{static_cast<std::uint16_t>(da.value + 1)}));

    // A tampered T_1 on one side shows up on the display.
    SessionState poked = r.st_a;
    (*poked.t1)[0] ^= 0x80;
    CHECK(compute_display(poked).value != da.value);
}

TEST_CASE("displays vary across runs") {
    std::set<std::uint16_t> values;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        CtrRandomSource rng(seed);
        SessionSetup setup = make_honest_setup(Protocol::display_authenticated, kIdA, kIdB, rng);
        ManualRun r = manual_run(setup, rng);
        REQUIRE(r.st_a.confirmed());
        values.insert(compute_display(r.st_a).value);
    }
    // 100 draws of a 16-bit value: a couple of birthday collisions are
    // plausible, a systematic collapse is not.
    CHECK(values.size() >= 97);
}

TEST_CASE("displays are undefined outside the display variant") {
    CtrRandomSource rng(50);
    SessionSetup setup = make_honest_setup(Protocol::unauthenticated, kIdA, kIdB, rng);
    ManualRun r = manual_run(setup, rng);
    CHECK_THROWS_AS(compute_display(r.st_a), Error);
    try {
        compute_display(r.st_a);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::wrong_variant);
    }

    // Incomplete display-variant state is rejected too.
    SessionState fresh;
    fresh.protocol = Protocol::display_authenticated;
    CHECK_THROWS_AS(compute_display(fresh), Error);
}

TEST_CASE("misaddressed frames are a caller error") {
    CtrRandomSource rng(51);
    SessionSetup setup = make_honest_setup(Protocol::unauthenticated, kIdA, kIdB, rng);
    SessionState st_a, st_b;
    auto f1 = step(setup.initiator, st_a, std::nullopt, rng);
    REQUIRE(f1);
    Frame misrouted = *f1;
    misrouted.recipient_id = 0x1234;
    CHECK_THROWS_AS(step(setup.responder, st_b, misrouted, rng), std::invalid_argument);
}

TEST_CASE("steps after termination are inert") {
    CtrRandomSource rng(52);
    SessionSetup setup = make_honest_setup(Protocol::unauthenticated, kIdA, kIdB, rng);
    ManualRun r = manual_run(setup, rng);
    REQUIRE(r.st_a.confirmed());
    Bytes16 mk_before = *r.st_a.mk;
    CHECK_FALSE(step(setup.initiator, r.st_a, r.frames[2], rng).has_value());
    CHECK(r.st_a.confirmed());
    CHECK(*r.st_a.mk == mk_before);
}

TEST_CASE("initiator nonce is revealed in frame 4 of the display variant") {
    CtrRandomSource rng(53);
    SessionSetup setup = make_honest_setup(Protocol::display_authenticated, kIdA, kIdB, rng);
    ManualRun r = manual_run(setup, rng);
    REQUIRE(r.st_b.confirmed());
    CHECK(r.frames[0].nonce_field != r.st_a.nonce_mine);  // frame 1 carries W_A
    CHECK(r.frames[3].nonce_field == r.st_a.nonce_mine);
    CHECK(r.st_b.nonce_peer == r.st_a.nonce_mine);
}
