#pragma once

#include "carebot/bundle.hpp"
#include "carebot/dialogue.hpp"
#include "carebot/emotion.hpp"
#include "carebot/intent.hpp"
#include "carebot/metrics.hpp"
#include "carebot/response.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace carebot::testing {

using Rng = std::mt19937_64;

// --- fixtures ---------------------------------------------------------------

const Bundle& bundle();

// Eight globals and three states of local intents, 50 phrases in total, with
// deliberate overlaps between local and global phrases.
std::vector<intent::IntentDef> fifty_phrase_intents();
inline const std::vector<std::string>& fifty_phrase_states() {
    static const std::vector<std::string> states = {"demo:menu", "demo:step", "demo:quiz", "demo:none"};
    return states;
}

// Fresh empty directory under the system temp dir, removed by the caller.
std::filesystem::path temp_dir(std::string_view tag);

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(std::string_view tag) : path(temp_dir(tag)) {}
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

UserProfile test_profile(std::string user_id = "u-test", std::string name = "Anna",
                         Gender gender = Gender::female);

// --- generators ------------------------------------------------------------

std::size_t pick(Rng& rng, std::size_t n);
int uniform(Rng& rng, int lo, int hi);
bool coin(Rng& rng, double p = 0.5);

std::vector<int> random_answers(Rng& rng, std::size_t n, int lo, int hi);

// Utterance built from `vocabulary` words and noise, sometimes embedding one
// of `phrases` verbatim.
std::string random_utterance(Rng& rng, const std::vector<std::string>& vocabulary,
                             const std::vector<std::string>& phrases);

// Random payload that passes response::check (without intent context).
response::ResponsePayload random_payload(Rng& rng, const emotion::EmotionWheel& wheel);

// Event likely to matter in the session's current state: a button of an
// available intent, a phrase, a capture input, or noise.
dialogue::UserEvent random_event(Rng& rng, const dialogue::Engine& engine, const dialogue::Session& session);

// Event chosen without looking at any state.
dialogue::UserEvent random_blind_event(Rng& rng, const dialogue::Engine& engine);

// --- oracles ---------------------------------------------------------------

// Scans every phrase of every candidate intent at every token offset.
// Returns (intent id, score, local) of the winner.
struct OracleMatch {
    std::string intent_id;
    std::size_t score = 0;
    bool local = false;
};
std::optional<OracleMatch> brute_force_match(const std::vector<intent::IntentDef>& intents, const Tokens& tokens,
                                             std::string_view state_id);

// Item-by-item SUS formula on a 1..5 scale: odd items contribute answer-1,
// even items 5-answer, sum times 2.5.
double sus_oracle(const std::vector<int>& answers);

// Per-scale means computed by explicit lookup of each item's scale and
// polarity from the standard UEQ key.
std::map<std::string, double> ueq_oracle(const std::vector<int>& answers);

// --- property checks (shared with the acceptance binary) --------------------

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) {
            detail = why;
        }
        ok = false;
    }
    void require(bool cond, const std::string& why) {
        if (!cond) {
            fail(why);
        }
    }
    void merge(const Check& other) {
        if (!other.ok) {
            fail(other.detail);
        }
    }
};

Check emotion_taxonomy();
Check intent_oracle(int utterances, std::uint64_t seed);
Check intent_priority();
Check replay_fidelity(int sequences, std::size_t max_length, std::uint64_t seed);
Check modality_equivalence();
Check therapy_journey();
Check sus_oracle_agreement(int responses, std::uint64_t seed);
Check ueq_properties();
Check wire_round_trip(int payloads, std::uint64_t seed);
Check gateway_linearizable(int rounds, std::uint64_t seed);
Check gateway_restart(int sessions, std::uint64_t seed);
Check feedback_conservation(int sessions, int events_per_session, std::uint64_t seed);
Check seeded_corruptions(int seeds);

} // namespace carebot::testing
