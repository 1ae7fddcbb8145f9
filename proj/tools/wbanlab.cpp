// wbanlab: command-line laboratory for the IEEE 802.15.6 security
// association protocols: honest runs, attack scenarios and primitive
// self-tests, all reproducible from a seed.

#include <chrono>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wban/attacks.hpp"
#include "wban/report.hpp"
#include "wban/scenarios.hpp"

#ifndef WBAN_DATA_DIR
#define WBAN_DATA_DIR "data"
#endif

namespace {

using nlohmann::json;
using namespace wban;

constexpr int kExitExpected = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitUsage = 2;

Protocol parse_variant(const std::string& v) {
    if (v == "I" || v == "1") return Protocol::unauthenticated;
    if (v == "II" || v == "2") return Protocol::hidden_public_key;
    if (v == "III" || v == "3") return Protocol::password_authenticated;
    if (v == "IV" || v == "4") return Protocol::display_authenticated;
    throw CLI::ValidationError("--variant", "expected I, II, III or IV");
}

std::uint64_t seed_or_entropy(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device dev;
    return (static_cast<std::uint64_t>(dev()) << 32) ^ dev();
}

void print_transcript_text(const Transcript& t) {
    std::cout << t.to_text();
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

int cmd_run(Protocol variant, std::uint64_t seed, const std::optional<std::string>& password,
            const std::string& format, bool timings) {
    Timer timer;
    scenarios::HonestRun run = scenarios::honest_run(variant, seed, password);
    const SessionOutcome& out = run.outcome;
    bool agreed = out.status_a.confirmed() && out.status_b.confirmed() && out.mk_a == out.mk_b;

    if (format == "json") {
        json j = session_summary(variant, out);
        j["command"] = "run";
        j["seed"] = seed;
        j["transcript"] = transcript_json(out.transcript);
        if (timings) j["wall_time_ms"] = timer.ms();
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "variant: " << protocol_name(variant) << "\n";
        std::cout << "seed: " << seed << "\n";
        print_transcript_text(out.transcript);
        std::cout << "status_a: " << status_string(out.status_a) << "\n";
        std::cout << "status_b: " << status_string(out.status_b) << "\n";
        if (out.mk_a) std::cout << "mk_a: " << to_hex(*out.mk_a) << "\n";
        if (out.mk_b) std::cout << "mk_b: " << to_hex(*out.mk_b) << "\n";
        std::cout << "verdict: " << (agreed ? "master keys agree" : "no agreement") << "\n";
        if (timings) std::cout << "wall_time_ms: " << timer.ms() << "\n";
    }
    return agreed ? kExitExpected : kExitUnexpected;
}

// ---------------------------------------------------------------------------
// attack
// ---------------------------------------------------------------------------

int report_attack(const std::string& name, const AttackOutcome& out, std::uint64_t seed,
                  const std::string& format, bool timings, const Timer& timer,
                  const json& extras = json::object()) {
    if (format == "json") {
        json j = attack_report(name, out);
        j["seed"] = seed;
        j["transcript"] = transcript_json(out.transcript);
        for (auto& [k, v] : extras.items()) j[k] = v;
        if (timings) j["wall_time_ms"] = timer.ms();
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "scenario: " << name << "\n";
        std::cout << "seed: " << seed << "\n";
        print_transcript_text(out.transcript);
        for (auto& [k, v] : extras.items())
            std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        if (out.adversary_mk) std::cout << "adversary_mk: " << to_hex(*out.adversary_mk) << "\n";
        if (out.honest_mk) std::cout << "honest_mk: " << to_hex(*out.honest_mk) << "\n";
        if (out.recovered_password)
            std::cout << "recovered_password: " << *out.recovered_password << "\n";
        if (out.display_adversary)
            std::cout << "display_adversary: " << out.display_adversary->digits() << "\n";
        if (out.display_victim)
            std::cout << "display_victim: " << out.display_victim->digits() << "\n";
        std::cout << "succeeded: " << (out.succeeded ? "true" : "false") << "\n";
        if (timings) std::cout << "wall_time_ms: " << timer.ms() << "\n";
    }
    return out.succeeded ? kExitExpected : kExitUnexpected;
}

int cmd_attack(const std::string& name, std::uint64_t seed,
               const std::optional<std::string>& password,
               const std::optional<std::string>& dictionary_path,
               const std::optional<std::string>& variant_str,
               const std::optional<std::string>& whose_str, bool mirror,
               const std::string& format, bool timings) {
    Timer timer;

    if (name == "impersonate_p1") {
        return report_attack(name, scenarios::impersonate_p1_scenario(seed, mirror), seed, format,
                             timings, timer);
    }
    if (name == "kci_p2") {
        return report_attack(name, scenarios::kci_p2_scenario(seed), seed, format, timings, timer);
    }
    if (name == "impersonate_p3") {
        if (!password) {
            std::cerr << "impersonate_p3 requires --password\n";
            return kExitUsage;
        }
        scenarios::P3Impersonation r = scenarios::impersonate_p3_scenario(seed, *password, mirror);
        json extras;
        extras["q_prime_x"] = r.q_prime.x().to_hex();
        extras["q_prime_y"] = r.q_prime.y().to_hex();
        return report_attack(name, r.outcome, seed, format, timings, timer, extras);
    }
    if (name == "dictionary_p3") {
        if (!password || !dictionary_path) {
            std::cerr << "dictionary_p3 requires --password and --dictionary\n";
            return kExitUsage;
        }
        auto words = load_dictionary(*dictionary_path);
        AttackOutcome out = scenarios::dictionary_p3_scenario(seed, *password, words);
        json extras;
        extras["dictionary_size"] = words.size();
        return report_attack(name, out, seed, format, timings, timer, extras);
    }
    if (name == "impersonate_p4") {
        return report_attack(name, scenarios::impersonate_p4_scenario(seed, mirror), seed, format,
                             timings, timer);
    }
    if (name == "break_forward_secrecy") {
        if (!variant_str || !whose_str) {
            std::cerr << "break_forward_secrecy requires --variant and --whose\n";
            return kExitUsage;
        }
        Protocol variant = parse_variant(*variant_str);
        CompromisedParty whose;
        if (*whose_str == "A" || *whose_str == "a")
            whose = CompromisedParty::initiator;
        else if (*whose_str == "B" || *whose_str == "b")
            whose = CompromisedParty::responder;
        else {
            std::cerr << "--whose must be A or B\n";
            return kExitUsage;
        }
        if (variant == Protocol::password_authenticated && !password) {
            std::cerr << "variant III requires --password\n";
            return kExitUsage;
        }
        AttackOutcome out = scenarios::forward_secrecy_scenario(variant, whose, seed, password);
        json extras;
        extras["variant"] = protocol_name(variant);
        extras["compromised"] = (whose == CompromisedParty::initiator) ? "A" : "B";
        return report_attack(name, out, seed, format, timings, timer, extras);
    }
    std::cerr << "unknown attack: " << name << "\n"
              << "known attacks: impersonate_p1 kci_p2 impersonate_p3 dictionary_p3 "
                 "impersonate_p4 break_forward_secrecy\n";
    return kExitUsage;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

std::vector<std::vector<std::string>> load_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<std::string> cols;
        std::string col;
        while (ls >> col) cols.push_back(col);
        if (!cols.empty()) rows.push_back(cols);
    }
    return rows;
}

int cmd_selftest(const std::string& data_dir) {
    bool all_ok = true;

    auto report = [&](const std::string& what, std::size_t ok, std::size_t total) {
        bool fine = ok == total && total > 0;
        all_ok = all_ok && fine;
        std::cout << what << ": " << ok << "/" << total << (fine ? " ok" : " FAILED") << "\n";
    };

    // AES known answer (FIPS 197 C.1).
    {
        Aes128 c(from_hex_fixed<16>("000102030405060708090a0b0c0d0e0f"));
        Bytes16 ct = c.encrypt_block(from_hex_fixed<16>("00112233445566778899aabbccddeeff"));
        report("aes128 known answer", to_hex(ct) == "69c4e0d86a7b0430d8cdb78070b4c55a" ? 1 : 0, 1);
    }

    // CMAC reference vectors.
    {
        std::size_t ok = 0;
        auto rows = load_rows(data_dir + "/cmac_aes128_vectors.txt");
        for (const auto& row : rows) {
            MacKey key = from_hex_fixed<16>(row[0]);
            BitString msg = row[1] == "-" ? BitString{} : BitString::from_hex(row[1]);
            if (cmac(key, msg, 128).to_hex() == row[2]) ++ok;
        }
        report("cmac vectors", ok, rows.size());
    }

    // Scalar multiples of the base point.
    {
        std::size_t ok = 0;
        auto rows = load_rows(data_dir + "/p256_scalar_mult_vectors.txt");
        for (const auto& row : rows) {
            CurvePoint expected =
                CurvePoint::from_affine(U256::from_hex(row[1]), U256::from_hex(row[2]));
            if (scalar_mul(U256::from_hex(row[0]), base_point()) == expected) ++ok;
        }
        report("scalar multiples", ok, rows.size());
    }

    // Structural curve checks.
    {
        std::size_t ok = 0;
        if (on_curve(p256::kGx, p256::kGy)) ++ok;
        if (scalar_mul(p256::kOrder, base_point()).is_infinity()) ++ok;
        if (validate_public_key(UncheckedPoint::infinity()) == KeyValidity::invalid_infinity) ++ok;
        report("curve structure", ok, 3);
    }

    std::cout << (all_ok ? "selftest passed" : "selftest FAILED") << "\n";
    return all_ok ? kExitExpected : kExitUnexpected;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laboratory for the IEEE 802.15.6 security-association protocols"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string format = "text";
    bool timings = false;

    std::string variant_str;
    std::optional<std::string> password;

    auto* run = app.add_subcommand("run", "Run one honest association and report the outcome");
    run->add_option("--variant", variant_str, "Protocol variant: I, II, III or IV")->required();
    run->add_option("--seed", seed, "Deterministic seed (OS entropy when omitted)");
    std::string run_password;
    run->add_option("--password", run_password, "Shared password (variant III)");
    run->add_option("--format", format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    run->add_flag("--timings", timings, "Include wall-clock timing in the report");

    auto* attack = app.add_subcommand("attack", "Execute an attack scenario");
    std::string attack_name;
    attack->add_option("--name", attack_name, "Attack scenario name")->required();
    attack->add_option("--seed", seed, "Deterministic seed (OS entropy when omitted)");
    std::string attack_password;
    attack->add_option("--password", attack_password, "Shared password where required");
    std::string dictionary_path;
    attack->add_option("--dictionary", dictionary_path, "Password dictionary, one per line");
    std::string attack_variant;
    attack->add_option("--variant", attack_variant, "Variant for break_forward_secrecy");
    std::string whose;
    attack->add_option("--whose", whose, "Compromised party for break_forward_secrecy: A or B");
    bool mirror = false;
    attack->add_flag("--mirror", mirror, "Impersonate toward the initiator instead of the hub");
    attack->add_option("--format", format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    attack->add_flag("--timings", timings, "Include wall-clock timing in the report");

    auto* selftest = app.add_subcommand("selftest", "Check primitives against reference vectors");
    std::string data_dir = WBAN_DATA_DIR;
    selftest->add_option("--data-dir", data_dir, "Directory with the bundled vector files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (run->parsed()) {
            Protocol variant = parse_variant(variant_str);
            std::optional<std::string> pw;
            if (!run_password.empty()) pw = run_password;
            if (variant == Protocol::password_authenticated && !pw) {
                std::cerr << "variant III requires --password\n";
                return kExitUsage;
            }
            return cmd_run(variant, seed_or_entropy(seed), pw, format, timings);
        }
        if (attack->parsed()) {
            std::optional<std::string> pw, dict, var, who;
            if (!attack_password.empty()) pw = attack_password;
            if (!dictionary_path.empty()) dict = dictionary_path;
            if (!attack_variant.empty()) var = attack_variant;
            if (!whose.empty()) who = whose;
            return cmd_attack(attack_name, seed_or_entropy(seed), pw, dict, var, who, mirror,
                              format, timings);
        }
        if (selftest->parsed()) return cmd_selftest(data_dir);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnexpected;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnexpected;
    }
    return kExitUsage;
}
