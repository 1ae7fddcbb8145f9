#pragma once

#include <string>

#include <json.hpp>

#include "wban/attacks.hpp"
#include "wban/harness.hpp"
#include "wban/protocols.hpp"

namespace wban {

inline std::string status_string(const PartyStatus& s) {
    if (s.halted()) return std::string("halted(") + halt_reason_name(*s.halt_reason) + ")";
    return step_name(s.step);
}

inline nlohmann::json transcript_json(const Transcript& t) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : t.entries)
        arr.push_back({{"marker", e.marker}, {"frame", to_hex(encode_frame(e.frame))}});
    return arr;
}

/// One structured object per session: variant, per-party status, master
/// keys when confirmed.
inline nlohmann::json session_summary(Protocol variant, const SessionOutcome& out) {
    nlohmann::json j;
    j["variant"] = protocol_name(variant);
    j["status_a"] = status_string(out.status_a);
    j["status_b"] = status_string(out.status_b);
    j["mk_a"] = out.mk_a ? nlohmann::json(to_hex(*out.mk_a)) : nlohmann::json(nullptr);
    j["mk_b"] = out.mk_b ? nlohmann::json(to_hex(*out.mk_b)) : nlohmann::json(nullptr);
    j["mk_equal"] = out.mk_a && out.mk_b && *out.mk_a == *out.mk_b;
    j["budget_exhausted"] = out.budget_exhausted;
    j["frames"] = out.transcript.entries.size();
    return j;
}

inline nlohmann::json attack_report(const std::string& scenario, const AttackOutcome& out) {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["succeeded"] = out.succeeded;
    j["adversary_mk"] =
        out.adversary_mk ? nlohmann::json(to_hex(*out.adversary_mk)) : nlohmann::json(nullptr);
    j["honest_mk"] = out.honest_mk ? nlohmann::json(to_hex(*out.honest_mk)) : nlohmann::json(nullptr);
    j["recovered_password"] = out.recovered_password ? nlohmann::json(*out.recovered_password)
                                                     : nlohmann::json(nullptr);
    j["display_adversary"] = out.display_adversary ? nlohmann::json(out.display_adversary->value)
                                                   : nlohmann::json(nullptr);
    j["display_victim"] = out.display_victim ? nlohmann::json(out.display_victim->value)
                                             : nlohmann::json(nullptr);
    j["frame_count"] = out.transcript.entries.size();
    return j;
}

}  // namespace wban
