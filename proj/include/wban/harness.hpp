#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "wban/errors.hpp"
#include "wban/frames.hpp"
#include "wban/protocols.hpp"
#include "wban/rng.hpp"

namespace wban {

// ---------------------------------------------------------------------------
// Transcript
// ---------------------------------------------------------------------------

/// Ordered record of frames seen on the channel. Markers are short
/// direction labels ("A→B:", "B→A:", "M→B:", "A→B[dropped]:", ...); a
/// marker containing "[dropped]" means the frame never reached its
/// destination (an intercepted original is recorded the same way).
struct TranscriptEntry {
    std::string marker;
    Frame frame;

    bool delivered() const { return marker.find("[dropped]") == std::string::npos; }
};

struct Transcript {
    std::vector<TranscriptEntry> entries;

    void add(std::string marker, const Frame& f) {
        entries.push_back({std::move(marker), f});
    }

    /// First delivered frame carrying the given sequence number.
    std::optional<Frame> find_seq(std::uint8_t seq) const {
        for (const auto& e : entries)
            if (e.delivered() && e.frame.ac.sequence_number == seq) return e.frame;
        return std::nullopt;
    }

    /// One "marker hex" line per entry.
    std::string to_text() const {
        std::string out;
        for (const auto& e : entries) {
            out += e.marker;
            out += ' ';
            out += wban::to_hex(encode_frame(e.frame));
            out += '\n';
        }
        return out;
    }

    static Transcript from_text(std::string_view text) {
        Transcript t;
        std::istringstream in{std::string(text)};
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto space = line.find(' ');
            if (space == std::string::npos)
                throw Error(ErrorCode::incomplete_transcript, "transcript line without frame hex");
            Bytes raw = from_hex(std::string_view(line).substr(space + 1));
            t.add(line.substr(0, space), decode_frame(raw));
        }
        return t;
    }
};

// ---------------------------------------------------------------------------
// Adversary hooks
// ---------------------------------------------------------------------------

struct DeliverAction {};
struct DropAction {};
struct ReplaceAction {
    Frame frame;
};
/// Deliver the original, then also the injected frame.
struct InjectAction {
    Frame frame;
};

using AdversaryAction = std::variant<DeliverAction, DropAction, ReplaceAction, InjectAction>;

enum class AdversaryMode { passive, active };

/// Channel interception hooks. Passive hooks never alter delivery; the
/// transform is consulted only in active mode.
struct AdversaryHooks {
    AdversaryMode mode = AdversaryMode::passive;
    std::function<AdversaryAction(const std::string& direction, const Frame&)> on_frame;

    static AdversaryHooks passive() { return {}; }

    static AdversaryHooks active(std::function<AdversaryAction(const std::string&, const Frame&)> fn) {
        return {AdversaryMode::active, std::move(fn)};
    }
};

// ---------------------------------------------------------------------------
// Session driver
// ---------------------------------------------------------------------------

struct PartyStatus {
    Step step = Step::fresh;
    std::optional<HaltReason> halt_reason;

    bool confirmed() const { return step == Step::confirmed; }
    bool halted() const { return step == Step::halted; }
};

struct SessionOutcome {
    PartyStatus status_a;
    PartyStatus status_b;
    std::optional<Bytes16> mk_a;
    std::optional<Bytes16> mk_b;
    bool budget_exhausted = false;
    Transcript transcript;

    /// Final states, for display computations and postmortems.
    SessionState state_a;
    SessionState state_b;
};

/// Drives one session with a synchronous alternating scheduler (initiator
/// then responder per round), routing every emitted frame through the
/// adversary. Stops when both parties confirm, either halts, the frame
/// budget runs out, or a full round makes no progress (a dropped frame
/// leaves the survivors waiting forever; that counts against the budget
/// flag too).
inline SessionOutcome run_session(const PartyConfig& cfg_a, const PartyConfig& cfg_b,
                                  const AdversaryHooks& adv, RandomSource& rng,
                                  int frame_budget = 16) {
    if (cfg_a.role != Role::initiator || cfg_b.role != Role::responder)
        throw std::invalid_argument("run_session wants (initiator, responder)");
    if (cfg_a.protocol != cfg_b.protocol || !(cfg_a.sss == cfg_b.sss))
        throw std::invalid_argument("configs disagree on variant or SSS");

    SessionOutcome out;
    SessionState st_a, st_b;
    std::deque<Frame> queue_a, queue_b;
    int frames_sent = 0;

    auto route = [&](const Frame& f, bool from_initiator) {
        ++frames_sent;
        const std::string dir = from_initiator ? "A→B" : "B→A";
        std::deque<Frame>& peer_queue = from_initiator ? queue_b : queue_a;
        const std::string to = from_initiator ? "B" : "A";

        AdversaryAction action = DeliverAction{};
        if (adv.mode == AdversaryMode::active && adv.on_frame) action = adv.on_frame(dir, f);

        if (std::holds_alternative<DeliverAction>(action)) {
            out.transcript.add(dir + ":", f);
            peer_queue.push_back(f);
        } else if (std::holds_alternative<DropAction>(action)) {
            out.transcript.add(dir + "[dropped]:", f);
        } else if (auto* rep = std::get_if<ReplaceAction>(&action)) {
            out.transcript.add(dir + "[dropped]:", f);
            out.transcript.add("M→" + to + ":", rep->frame);
            peer_queue.push_back(rep->frame);
        } else if (auto* inj = std::get_if<InjectAction>(&action)) {
            out.transcript.add(dir + ":", f);
            peer_queue.push_back(f);
            out.transcript.add("M→" + to + ":", inj->frame);
            peer_queue.push_back(inj->frame);
        }
    };

    auto turn = [&](const PartyConfig& cfg, SessionState& st, std::deque<Frame>& queue,
                    bool is_initiator) -> bool {
        std::optional<Frame> incoming;
        if (!queue.empty()) {
            incoming = queue.front();
            queue.pop_front();
        }
        std::optional<Frame> outgoing = step(cfg, st, incoming, rng);
        if (outgoing) route(*outgoing, is_initiator);
        return incoming.has_value() || outgoing.has_value();
    };

    for (;;) {
        bool progress = turn(cfg_a, st_a, queue_a, true);
        bool done = (st_a.confirmed() && st_b.confirmed()) || st_a.halted() || st_b.halted();
        if (!done) {
            progress = turn(cfg_b, st_b, queue_b, false) || progress;
            done = (st_a.confirmed() && st_b.confirmed()) || st_a.halted() || st_b.halted();
        }
        if (done) break;
        if (frames_sent > frame_budget || !progress) {
            out.budget_exhausted = true;
            break;
        }
    }

    out.status_a = {st_a.step, st_a.halt_reason};
    out.status_b = {st_b.step, st_b.halt_reason};
    out.mk_a = st_a.mk;
    out.mk_b = st_b.mk;
    out.state_a = st_a;
    out.state_b = st_b;
    return out;
}

}  // namespace wban
