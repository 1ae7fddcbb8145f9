#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wban/attacks.hpp"
#include "wban/harness.hpp"
#include "wban/protocols.hpp"
#include "wban/rng.hpp"

namespace wban::scenarios {

// Fixed lab identities for the node (initiator) and hub (responder).
inline constexpr std::uint64_t kNodeId = 0x1111111111111101ULL;
inline constexpr std::uint64_t kHubId = 0x2222222222222202ULL;

struct HonestRun {
    SessionSetup setup;
    SessionOutcome outcome;
};

/// One honest seeded session over a passive channel.
inline HonestRun honest_run(Protocol protocol, std::uint64_t seed,
                            const std::optional<std::string>& password = {}) {
    CtrRandomSource rng(seed);
    HonestRun r{make_honest_setup(protocol, kNodeId, kHubId, rng, password), {}};
    r.outcome = run_session(r.setup.initiator, r.setup.responder, AdversaryHooks::passive(), rng);
    return r;
}

inline AttackOutcome impersonate_p1_scenario(std::uint64_t seed, bool mirror = false,
                                             const ImpersonationOptions& opts = {}) {
    CtrRandomSource rng(seed);
    SessionSetup setup = make_honest_setup(Protocol::unauthenticated, kNodeId, kHubId, rng);
    return impersonate_p1(mirror ? setup.initiator : setup.responder, rng, opts);
}

/// The compromised key and the eavesdropped hub key both come from a prior
/// honest run driven by the same seed; the attack then hijacks a fresh
/// session started by the same node. `wrong_sk_control` swaps the stolen
/// key for a random guess.
inline AttackOutcome kci_p2_scenario(std::uint64_t seed, bool wrong_sk_control = false) {
    CtrRandomSource rng(seed);
    SessionSetup setup = make_honest_setup(Protocol::hidden_public_key, kNodeId, kHubId, rng);
    SessionOutcome prior = run_session(setup.initiator, setup.responder,
                                       AdversaryHooks::passive(), rng);
    auto f2 = prior.transcript.find_seq(2);
    if (!f2) throw Error(ErrorCode::incomplete_transcript, "prior run has no frame 2");
    CurvePoint pk_b = CurvePoint::from_affine(f2->pk_x, f2->pk_y);

    U256 sk = wrong_sk_control ? random_scalar(rng) : setup.initiator.static_keys.sk;
    return kci_p2(sk, pk_b, setup.initiator, rng);
}

struct P3Impersonation {
    Transcript prior;
    CurvePoint q_prime;
    AttackOutcome outcome;
};

inline P3Impersonation impersonate_p3_scenario(std::uint64_t seed, const std::string& password,
                                               bool mirror = false,
                                               const ImpersonationOptions& opts = {}) {
    CtrRandomSource rng(seed);
    SessionSetup setup = make_honest_setup(Protocol::password_authenticated, kNodeId, kHubId,
                                           rng, password);
    SessionOutcome prior = run_session(setup.initiator, setup.responder,
                                       AdversaryHooks::passive(), rng);
    P3Impersonation r{prior.transcript, recover_q_prime(prior.transcript), {}};
    r.outcome = impersonate_p3(r.q_prime, mirror ? setup.initiator : setup.responder, rng, opts);
    return r;
}

inline AttackOutcome dictionary_p3_scenario(std::uint64_t seed, const std::string& password,
                                            const std::vector<std::string>& dictionary,
                                            DictionaryVerifier verifier =
                                                DictionaryVerifier::floor_division) {
    HonestRun run = honest_run(Protocol::password_authenticated, seed, password);
    return dictionary_p3(run.outcome.transcript, dictionary, verifier);
}

inline AttackOutcome impersonate_p4_scenario(std::uint64_t seed, bool mirror = false,
                                             const ImpersonationOptions& opts = {}) {
    CtrRandomSource rng(seed);
    SessionSetup setup = make_honest_setup(Protocol::display_authenticated, kNodeId, kHubId, rng);
    return impersonate_p4(mirror ? setup.initiator : setup.responder, rng, opts);
}

/// Honest run, then offline master-key recovery from its transcript plus
/// one static key.
inline AttackOutcome forward_secrecy_scenario(Protocol variant, CompromisedParty whose,
                                              std::uint64_t seed,
                                              const std::optional<std::string>& password = {}) {
    HonestRun run = honest_run(variant, seed, password);
    const U256& sk = whose == CompromisedParty::initiator
                         ? run.setup.initiator.static_keys.sk
                         : run.setup.responder.static_keys.sk;
    std::optional<std::string> pw;
    if (variant == Protocol::password_authenticated && whose == CompromisedParty::responder)
        pw = password;
    return break_forward_secrecy(variant, run.outcome.transcript, sk, whose, pw,
                                 run.outcome.mk_a);
}

}  // namespace wban::scenarios
