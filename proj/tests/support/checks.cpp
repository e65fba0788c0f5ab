#include "support.hpp"

#include "carebot/error.hpp"
#include "carebot/gateway.hpp"
#include "carebot/store.hpp"
#include "carebot/text.hpp"
#include "carebot/therapy.hpp"
#include "carebot/wire.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <latch>
#include <set>
#include <sstream>
#include <thread>

namespace carebot::testing {

namespace {

using dialogue::ButtonPress;
using dialogue::CheckboxSubmit;
using dialogue::EmotionSelected;
using dialogue::Session;
using dialogue::UserEvent;
using dialogue::Utterance;

UserEvent button(std::string intent, std::int64_t ts = 1) { return {ButtonPress{std::move(intent)}, ts}; }
UserEvent say(std::string text, std::int64_t ts = 1) { return {Utterance{std::move(text)}, ts}; }

std::string describe(const UserEvent& e) { return wire::encode_event(e); }

template <typename F>
std::optional<ErrorCode> error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

std::vector<std::string> phrase_texts(const std::vector<intent::IntentDef>& defs) {
    std::vector<std::string> out;
    for (const auto& d : defs) {
        for (const auto& p : d.phrases) {
            out.push_back(join(p));
        }
    }
    return out;
}

} // namespace

// --- emotion taxonomy -------------------------------------------------------

Check emotion_taxonomy() {
    Check c;
    const auto& wheel = emotion::EmotionWheel::standard();
    const auto refs = wheel.all();
    c.require(refs.size() == emotion::cell_count, "wheel has " + std::to_string(refs.size()) + " cells");
    std::set<std::string> labels;
    std::set<std::pair<int, int>> cells;
    for (const auto& ref : refs) {
        labels.insert(ref.canonical_label);
        cells.insert({static_cast<int>(ref.sector), static_cast<int>(ref.intensity)});
        const auto back = wheel.lookup(ref.canonical_label);
        c.require(back == ref, "lookup(" + ref.canonical_label + ") does not round-trip");

        const auto pos = wheel.layout(ref);
        const auto order_pos = std::find(wheel.sector_order().begin(), wheel.sector_order().end(), ref.sector) -
                               wheel.sector_order().begin();
        c.require(pos.sector_index == static_cast<std::size_t>(order_pos), ref.canonical_label + ": sector index");
        c.require(pos.ring_index == emotion::ring_index(ref.intensity), ref.canonical_label + ": ring index");
        c.require(pos.start_deg == order_pos * emotion::sector_width_deg &&
                      pos.end_deg == (order_pos + 1) * emotion::sector_width_deg,
                  ref.canonical_label + ": sector span");
        c.require(wheel.hit_test(pos.midpoint_deg(), pos.ring_index) == ref,
                  ref.canonical_label + ": hit test at the midpoint");
        c.require(wheel.hit_test(pos.start_deg, pos.ring_index) == ref,
                  ref.canonical_label + ": hit test at the start edge");
    }
    c.require(labels.size() == emotion::cell_count, "canonical labels are not distinct");
    c.require(cells.size() == emotion::cell_count, "cells are not distinct");

    // Every angle at half-degree steps lands in the cell whose span holds it.
    for (int half = 0; half < 720; ++half) {
        const double angle = half / 2.0;
        for (std::size_t ring = 0; ring < emotion::ring_count; ++ring) {
            const auto hit = wheel.hit_test(angle, ring);
            const auto pos = wheel.layout(hit);
            c.require(pos.start_deg <= angle && angle < pos.end_deg && pos.ring_index == ring,
                      "hit test at " + std::to_string(angle) + " ring " + std::to_string(ring));
        }
    }

    // Synonyms resolve to a wheel cell, and utterances keep first-occurrence order.
    for (const auto& [phrase, ref] : wheel.phrase_table()) {
        c.require(wheel.lookup(phrase).same_cell(ref), "synonym '" + phrase + "'");
    }
    const auto fear = wheel.ref(emotion::Sector::fear, emotion::Intensity::medium);
    const auto sadness = wheel.ref(emotion::Sector::sadness, emotion::Intensity::medium);
    const auto parsed = wheel.parse_utterance("I feel scared and sad, so sad");
    c.require(parsed.size() == 2 && parsed[0] == fear && parsed[1] == sadness, "parse of a two-emotion utterance");
    c.require(!wheel.find("xyzzy"), "unknown label resolves");
    c.require(error_of([&] { wheel.lookup("xyzzy"); }) == ErrorCode::not_found, "unknown label is not not_found");
    return c;
}

// --- intent matching --------------------------------------------------------

Check intent_oracle(int utterances, std::uint64_t seed) {
    Check c;
    const auto defs = fifty_phrase_intents();
    const intent::Registry registry(defs);
    c.require(registry.problems().empty(), "registry reports problems");
    const auto phrases = phrase_texts(defs);
    c.require(phrases.size() == 50, "registry has " + std::to_string(phrases.size()) + " phrases");

    std::set<std::string> vocab_set;
    for (const auto& d : defs) {
        for (const auto& p : d.phrases) {
            vocab_set.insert(p.begin(), p.end());
        }
    }
    const std::vector<std::string> vocabulary(vocab_set.begin(), vocab_set.end());

    Rng rng(seed);
    for (int i = 0; i < utterances && c.ok; ++i) {
        const auto& state = fifty_phrase_states()[pick(rng, fifty_phrase_states().size())];
        const auto text = random_utterance(rng, vocabulary, phrases);
        const auto tokens = normalize(text);
        const auto got = registry.match(text, state);
        const auto want = brute_force_match(defs, tokens, state);
        const auto where = "'" + text + "' in " + state;
        if (got.has_value() != want.has_value()) {
            c.fail(where + ": matcher " + (got ? got->intent_id : "none") + ", oracle " +
                   (want ? want->intent_id : "none"));
            break;
        }
        if (!got) {
            continue;
        }
        c.require(got->intent_id == want->intent_id && got->score == want->score && got->local == want->local,
                  where + ": matcher " + got->intent_id + ", oracle " + want->intent_id);
        // Soundness: the reported phrase belongs to the intent and occurs in the utterance.
        const auto def = std::find_if(defs.begin(), defs.end(), [&](const intent::IntentDef& d) {
            return d.id == got->intent_id && (d.is_global() || d.state_scope == state);
        });
        c.require(def != defs.end() &&
                      std::find(def->phrases.begin(), def->phrases.end(), got->matched_phrase) != def->phrases.end(),
                  where + ": matched phrase is not one of the intent's phrases");
        c.require(contains_run(tokens, got->matched_phrase), where + ": matched phrase not in the utterance");
        c.require(got->score == got->matched_phrase.size(), where + ": score differs from phrase length");
    }
    return c;
}

Check intent_priority() {
    Check c;
    const intent::Registry registry(fifty_phrase_intents());
    const auto expect = [&](const std::string& text, const std::string& state, const std::optional<std::string>& id,
                            bool local = false) {
        const auto m = registry.match(text, state);
        const auto where = "'" + text + "' in " + state;
        if (!id) {
            c.require(!m, where + " should not match, got " + (m ? m->intent_id : ""));
            return;
        }
        c.require(m && m->intent_id == *id && m->local == local,
                  where + ": expected " + *id + ", got " + (m ? m->intent_id : "none"));
    };
    // A shorter local phrase beats a longer global one.
    expect("yes please", "demo:step", "confirm", true);
    expect("yes please", "demo:none", "agree");
    expect("yes", "demo:quiz", "true_answer", true);
    // Locals of other states are invisible.
    expect("facts", "demo:step", std::nullopt);
    expect("masks", "demo:menu", "masks", true);
    // Longest phrase within a class.
    expect("main menu please", "demo:step", "go_home");
    expect("main menu now", "demo:step", "step_home", true);
    expect("i need help", "demo:none", "help");
    expect("menu help", "demo:menu", "menu_help", true);
    expect("facts and myths", "demo:menu", "facts", true);
    // Equal length: smallest id.
    expect("home help", "demo:none", "go_home");
    expect("quiet info", "demo:none", "open_info");
    expect("again please", "demo:quiz", "quiz_again", true);
    expect("again please", "demo:menu", "repeat");
    expect("", "demo:menu", std::nullopt);
    expect("?!", "demo:menu", std::nullopt);
    expect("MAIN, menu!", "demo:none", "go_home");

    // Whole-utterance mode only accepts exact phrases.
    const auto whole = registry.match("yes please now", "demo:step", intent::MatchMode::whole_utterance);
    c.require(!whole, "whole-utterance mode matched a partial utterance");
    const auto exact = registry.match("Got it!", "demo:step", intent::MatchMode::whole_utterance);
    c.require(exact && exact->intent_id == "confirm", "whole-utterance mode missed an exact phrase");
    return c;
}

// --- replay -----------------------------------------------------------------

Check replay_fidelity(int sequences, std::size_t max_length, std::uint64_t seed) {
    Check c;
    const auto engine = bundle().engine();
    Rng rng(seed);
    std::size_t events = 0;
    std::size_t no_matches = 0;
    for (int n = 0; n < sequences && c.ok; ++n) {
        const auto gender = static_cast<Gender>(uniform(rng, 0, 2));
        const auto profile = test_profile("u-" + std::to_string(n), "Anna", gender);
        auto session = engine.start("s-" + std::to_string(n), profile).session;
        const auto length = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(max_length)));
        for (std::size_t i = 0; i < length && c.ok; ++i) {
            const auto event = random_event(rng, engine, session);
            dialogue::Turn turn;
            try {
                turn = engine.advance(session, event);
            } catch (const Error& e) {
                c.fail("advance threw " + std::string(to_string(e.code())) + " on " + describe(event) + " at " +
                       session.current.qualified() + ": " + e.what());
                break;
            }
            ++events;
            const auto available = engine.available_intents(turn.session.current);
            if (const auto broken = response::check(turn.response, &available)) {
                c.fail("response at " + turn.session.current.qualified() + " breaks " + *broken);
            }
            c.require(turn.session.event_log.size() == session.event_log.size() + 1, "event not logged");
            if (turn.outcome == dialogue::Outcome::no_match) {
                ++no_matches;
                c.require(turn.session.same_state(session) && turn.session.profile == session.profile,
                          "no_match changed the session at " + session.current.qualified() + " on " +
                              describe(event));
            }
            if (i == 0) {
                const auto again = engine.advance(session, event);
                c.require(again.session.same_state(turn.session) && again.response == turn.response,
                          "advance is not deterministic");
            }
            session = std::move(turn.session);
        }
        if (!c.ok) {
            break;
        }
        Session replayed;
        try {
            replayed = engine.replay(session.event_log, session.session_id, profile);
        } catch (const Error& e) {
            c.fail(std::string("replay threw: ") + e.what());
            break;
        }
        c.require(replayed.same_state(session), "replay of sequence " + std::to_string(n) + " ends in " +
                                                    replayed.current.qualified() + ", live in " +
                                                    session.current.qualified());
        c.require(replayed.profile == session.profile, "replayed profile differs in sequence " + std::to_string(n));
        c.require(replayed.event_log == session.event_log, "replayed log differs in sequence " + std::to_string(n));
    }
    c.require(!c.ok || (events > 0 && no_matches > 0), "generator never produced a no_match event");
    return c;
}

// --- modality equivalence ---------------------------------------------------

namespace {

// Input the capture state of `session` accepts, both as a tap and as speech.
std::vector<std::pair<UserEvent, UserEvent>> capture_pairs(const dialogue::Engine& engine, const Session& session) {
    const auto* st = engine.flows().find(session.current);
    std::vector<std::pair<UserEvent, UserEvent>> out;
    switch (st->capture.mode) {
    case dialogue::CaptureMode::emotion:
        for (const auto& ref : engine.wheel().all()) {
            out.push_back({{EmotionSelected{ref}, 5}, say(ref.canonical_label, 5)});
        }
        break;
    case dialogue::CaptureMode::checkbox:
        out.push_back({{CheckboxSubmit{{"family", "health"}}, 5}, say("family and health", 5)});
        out.push_back({{CheckboxSubmit{{}}, 5}, say("none", 5)});
        break;
    default:
        break;
    }
    return out;
}

// Profile equality up to the recorded input source.
bool same_profile(UserProfile a, UserProfile b) {
    for (auto* p : {&a, &b}) {
        for (auto& r : p->emotion_history) {
            r.source = emotion::Source::touch;
        }
    }
    return a == b;
}

} // namespace

Check modality_equivalence() {
    Check c;
    const auto& b = bundle();
    const auto engine = b.engine();
    const auto diags = dialogue::validate_flow(*b.flows, {b.wheel.get(), b.catalog.get()});
    if (!diags.empty()) {
        c.fail("standard flows fail validation: " + diags.front().to_string());
        return c;
    }

    // Reach every state, keeping one session per state and set of filled slots.
    const auto key = [](const Session& s) {
        auto k = s.current.qualified();
        for (const auto& [name, _] : s.slots) {
            k += " " + name;
        }
        return k;
    };
    std::map<std::string, Session> reached;
    std::set<std::string> states;
    std::deque<Session> queue;
    auto first = engine.start("s-modality", test_profile()).session;
    reached.emplace(key(first), first);
    queue.push_back(first);
    while (!queue.empty()) {
        const auto s = queue.front();
        queue.pop_front();
        states.insert(s.current.qualified());
        std::vector<UserEvent> moves;
        for (const auto& id : engine.available_intents(s.current)) {
            moves.push_back(button(id));
        }
        if (const auto pairs = capture_pairs(engine, s); !pairs.empty()) {
            moves.push_back(pairs.front().first);
        }
        moves.push_back(say("I will infect my family"));
        for (const auto& e : moves) {
            auto next = engine.advance(s, e).session;
            next.event_log.clear();
            if (reached.emplace(key(next), next).second) {
                queue.push_back(next);
            }
        }
    }
    std::size_t rendered = 0;
    for (const auto& [id, flow] : b.flows->flows) {
        for (const auto& [sid, st] : flow.states) {
            if (!st.is_router()) {
                ++rendered;
                c.require(states.count(id + ":" + sid) == 1, "state " + id + ":" + sid + " was never reached");
            }
        }
    }

    const intent::Registry registry(b.flows->intents);
    std::size_t checked = 0;
    for (const auto& [_, s] : reached) {
        const auto scope = s.current.qualified();
        const auto* st = b.flows->find(s.current);
        const auto mode = st->capture.mode == dialogue::CaptureMode::none ? intent::MatchMode::contiguous
                                                                          : intent::MatchMode::whole_utterance;
        for (const auto& id : engine.available_intents(s.current)) {
            const auto* def = registry.resolve(id, scope);
            std::optional<std::string> spoken;
            for (const auto& p : def->phrases) {
                const auto m = registry.match(join(p), scope, mode);
                if (m && m->intent_id == id) {
                    spoken = join(p);
                    break;
                }
            }
            if (!spoken) {
                c.fail(scope + ": no phrase reaches intent " + id);
                continue;
            }
            const auto tap = engine.advance(s, button(id));
            const auto voice = engine.advance(s, say(*spoken));
            c.require(tap.outcome == voice.outcome && voice.session.same_state(tap.session) &&
                          voice.session.profile == tap.session.profile,
                      scope + ": tapping " + id + " and saying '" + *spoken + "' diverge (" +
                          tap.session.current.qualified() + " vs " + voice.session.current.qualified() + ")");
            ++checked;
        }
        for (const auto& [tap_event, voice_event] : capture_pairs(engine, s)) {
            const auto tap = engine.advance(s, tap_event);
            const auto voice = engine.advance(s, voice_event);
            c.require(tap.outcome == voice.outcome && voice.session.same_state(tap.session) &&
                          same_profile(voice.session.profile, tap.session.profile),
                      scope + ": " + describe(tap_event) + " and " + describe(voice_event) + " diverge");
            ++checked;
        }
    }
    c.require(checked > rendered, "only " + std::to_string(checked) + " transitions exercised");
    return c;
}

// --- therapy ----------------------------------------------------------------

Check therapy_journey() {
    Check c;
    const auto& b = bundle();
    const auto engine = b.engine();
    if (!b.therapy) {
        c.fail("standard bundle has no therapy script");
        return c;
    }
    const auto& script = *b.therapy;
    c.require(script.steps.size() == therapy::step_count, "script does not have five steps");
    std::set<therapy::Process> covered;
    for (const auto& step : script.steps) {
        covered.insert(step.processes.begin(), step.processes.end());
    }
    c.require(covered.size() == therapy::all_processes.size(), "steps do not cover all six processes");

    auto profile = test_profile();
    profile.values = {"family", "health"};
    auto session = engine.start("s-therapy", profile).session;

    // Without a declared emotion, therapy sends the user to the wheel first.
    const auto early = therapy::start_therapy(engine, session, 2);
    c.require(early.session.current == script.emotion_state, "therapy without an emotion did not open the wheel");
    c.require(early.response.kind == response::TemplateKind::emotions, "wheel response is not an emotions template");

    const auto fear = b.wheel->ref(emotion::Sector::fear, emotion::Intensity::medium);
    session = engine.advance(early.session, {EmotionSelected{fear}, 3}).session;
    auto turn = therapy::start_therapy(engine, session, 4);
    session = turn.session;
    auto state = therapy::therapy_state(session, script);
    c.require(state.active && state.step_index == 0 && state.declared_emotion == fear, "therapy did not start at step 1");
    c.require(turn.response.body && turn.response.body->find(fear.canonical_label) != std::string::npos,
              "step 1 does not mention the declared emotion");

    // An unrelated answer keeps the step and explains what is expected.
    const auto stray = engine.advance(session, say("xyzzy", 5));
    c.require(stray.outcome == dialogue::Outcome::no_match && stray.session.same_state(session),
              "unrelated answer moved the exercise");

    const std::vector<UserEvent> answers = {say("I understand", 6), say("I will infect my family", 7),
                                            say("got it", 8), button("family", 9), say("i am ready", 10)};
    for (std::size_t i = 0; i < answers.size(); ++i) {
        turn = engine.advance(session, answers[i]);
        const auto next = therapy::therapy_state(turn.session, script);
        c.require(turn.outcome != dialogue::Outcome::no_match, "step " + std::to_string(i + 1) + " did not accept " +
                                                                   describe(answers[i]));
        c.require(next.step_index == i + 1, "step index after answer " + std::to_string(i + 1) + " is " +
                                                std::to_string(next.step_index));
        if (i == 3) {
            const auto& action = therapy::committed_action_for("family", *b.actions);
            c.require(turn.response.body && turn.response.body->find(action) != std::string::npos,
                      "step 5 does not show the committed action for the chosen value");
        }
        session = turn.session;
    }
    state = therapy::therapy_state(session, script);
    c.require(state.completed, "exercise not completed");
    c.require(state.threatening_thought == "I will infect my family", "threatening thought not captured");
    c.require(state.chosen_value == "family", "chosen value not recorded");
    const auto action = session.slots.find(std::string(therapy::committed_action_slot));
    c.require(action != session.slots.end() &&
                  dialogue::slot_text(action->second) == therapy::committed_action_for("family", *b.actions),
              "committed action slot not set from the chosen value");

    // Coming back after completion offers a restart.
    auto home = engine.advance(session, button("go_home", 11)).session;
    const auto again = therapy::start_therapy(engine, home, 12);
    c.require(again.session.current.flow == script.flow_id, "re-entering therapy left the therapy flow");
    c.require(again.response.header == script.restart_header, "re-entry after completion is not a restart offer");
    return c;
}

// --- instruments ------------------------------------------------------------

Check sus_oracle_agreement(int responses, std::uint64_t seed) {
    Check c;
    Rng rng(seed);
    for (int i = 0; i < responses && c.ok; ++i) {
        const auto answers = random_answers(rng, 10, 1, 5);
        const double got = metrics::sus_score(answers);
        const double want = sus_oracle(answers);
        c.require(got == want, "sus_score " + std::to_string(got) + " vs oracle " + std::to_string(want));
        c.require(got >= 0 && got <= 100, "sus_score out of range");
    }
    c.require(metrics::sus_score(std::vector<int>(10, 3)) == 50.0, "all-neutral SUS is not 50");
    c.require(metrics::sus_score({5, 1, 5, 1, 5, 1, 5, 1, 5, 1}) == 100.0, "best SUS is not 100");
    c.require(metrics::sus_score({1, 5, 1, 5, 1, 5, 1, 5, 1, 5}) == 0.0, "worst SUS is not 0");
    c.require(metrics::sus_grade(68) == metrics::SusGrade::above_average, "68 is not above average");
    c.require(metrics::sus_grade(79) == metrics::SusGrade::above_average, "79 is not above average");
    c.require(metrics::sus_grade(67.5) == metrics::SusGrade::below_average, "67.5 is above average");
    c.require(error_of([] { metrics::sus_score(std::vector<int>(9, 3)); }) == ErrorCode::wrong_length,
              "nine answers accepted");
    c.require(error_of([] { metrics::sus_score({3, 3, 3, 3, 6, 3, 3, 3, 3, 3}); }) == ErrorCode::invalid_answer_range,
              "answer 6 accepted");
    return c;
}

Check ueq_properties() {
    Check c;
    const auto& table = metrics::Instruments::standard().ueq;
    c.require(table.items.size() == 26, "UEQ table does not have 26 items");

    for (const auto& [scale, value] : metrics::ueq_score(std::vector<int>(26, 4)).by_name()) {
        c.require(value == 0.0, "neutral answers give " + scale + " = " + std::to_string(value));
    }
    std::vector<int> best;
    for (const auto& item : table.items) {
        best.push_back(item.reversed ? 1 : 7);
    }
    for (const auto& [scale, value] : metrics::ueq_score(best).by_name()) {
        c.require(value == 3.0, "most positive answers give " + scale + " = " + std::to_string(value));
    }
    for (int k = 0; k <= 3; ++k) {
        for (const bool reversed : {false, true}) {
            c.require(metrics::ueq_transform(4 + k, reversed) == -metrics::ueq_transform(4 - k, reversed),
                      "transform is not odd around 4");
            c.require(metrics::ueq_transform(4 + k, reversed) == -metrics::ueq_transform(4 + k, !reversed),
                      "reversal does not flip the sign");
        }
    }
    Rng rng(26);
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const auto answers = random_answers(rng, 26, 1, 7);
        const auto got = metrics::ueq_score(answers).by_name();
        const auto want = ueq_oracle(answers);
        c.require(got.size() == 6 && want.size() == 6, "scale count");
        for (const auto& [scale, value] : want) {
            c.require(std::abs(got.at(scale) - value) < 1e-12, "scale " + scale + " disagrees with the oracle");
        }
    }
    for (const std::size_t n : {0, 25, 27}) {
        c.require(error_of([n] { metrics::ueq_score(std::vector<int>(n, 4)); }) == ErrorCode::wrong_length,
                  std::to_string(n) + " answers accepted");
    }
    for (const int bad : {0, 8, -1}) {
        auto answers = std::vector<int>(26, 4);
        answers[7] = bad;
        try {
            metrics::ueq_score(answers);
            c.fail("answer " + std::to_string(bad) + " accepted");
        } catch (const Error& e) {
            c.require(e.code() == ErrorCode::invalid_answer_range && e.subject() == table.items[7].id,
                      "answer " + std::to_string(bad) + " rejected with the wrong error");
        }
    }
    return c;
}

// --- wire -------------------------------------------------------------------

Check wire_round_trip(int payloads, std::uint64_t seed) {
    Check c;
    Rng rng(seed);
    const auto& wheel = emotion::EmotionWheel::standard();
    for (int i = 0; i < payloads && c.ok; ++i) {
        const auto p = random_payload(rng, wheel);
        if (const auto broken = response::check(p)) {
            c.fail("generator produced an invalid payload: " + *broken);
            break;
        }
        const auto bytes = wire::serialize(p);
        c.require(wire::serialize(p) == bytes, "serialize is not deterministic");
        response::ResponsePayload back;
        try {
            back = wire::deserialize(bytes);
        } catch (const Error& e) {
            c.fail("deserialize rejected its own output: " + std::string(e.what()));
            break;
        }
        c.require(back == p, "round trip changed the payload: " + bytes);
        c.require(wire::serialize(back) == bytes, "re-serialized bytes differ");
        if (i % 100 == 0 && bytes.size() > 2) {
            const auto cut = bytes.substr(0, pick(rng, bytes.size() - 1) + 1);
            c.require(error_of([&] { wire::deserialize(cut); }) == ErrorCode::decode_error,
                      "truncated document accepted: " + cut);
        }
    }
    return c;
}

// --- gateway ----------------------------------------------------------------

Check gateway_linearizable(int rounds, std::uint64_t seed) {
    Check c;
    auto store = std::make_shared<gateway::MemoryStore>();
    gateway::Service service(bundle(), store);
    const auto& engine = service.engine();
    const auto handle = service.create_session({std::nullopt, "Anna", Gender::female});
    const auto& id = handle.session_id;
    Rng rng_a(seed);
    Rng rng_b(seed ^ 0x9e3779b97f4a7c15ULL);

    // Lock-step rounds: both writers release together.
    for (int r = 0; r < rounds && c.ok; ++r) {
        const auto before = service.session(id);
        auto a = random_blind_event(rng_a, engine);
        auto b = random_blind_event(rng_b, engine);
        a.timestamp = 2 * r + 1;
        b.timestamp = 2 * r + 2;
        std::latch go(1);
        std::string err;
        std::mutex err_mutex;
        const auto post = [&](const UserEvent& e) {
            go.wait();
            try {
                service.post_event(id, e);
            } catch (const std::exception& ex) {
                const std::lock_guard lock(err_mutex);
                err = ex.what();
            }
        };
        std::thread ta(post, a);
        std::thread tb(post, b);
        go.count_down();
        ta.join();
        tb.join();
        if (!err.empty()) {
            c.fail("post_event threw: " + err);
            break;
        }
        const auto after = service.session(id);
        const auto& log = after.event_log;
        if (log.size() != before.event_log.size() + 2) {
            c.fail("round " + std::to_string(r) + " logged " + std::to_string(log.size() - before.event_log.size()) +
                   " entries");
            break;
        }
        const auto& first = log[log.size() - 2].event;
        const auto& second = log[log.size() - 1].event;
        c.require((first == a && second == b) || (first == b && second == a), "log holds foreign events");
        const auto mid = engine.advance(before, first);
        const auto end = engine.advance(mid.session, second);
        c.require(after.same_state(end.session) && after.profile == end.session.profile,
                  "round " + std::to_string(r) + " is not a serial order of its two events");
        c.require(service.get_state(id).response == wire::serialize(end.response),
                  "stored response differs from the serial order");
    }

    // Free-running writers: the log is one interleaving of both programs.
    const auto base = service.session(id).event_log.size();
    std::vector<UserEvent> prog_a;
    std::vector<UserEvent> prog_b;
    for (int i = 0; i < rounds; ++i) {
        prog_a.push_back(random_blind_event(rng_a, engine));
        prog_a.back().timestamp = 1'000'000 + i;
        prog_b.push_back(random_blind_event(rng_b, engine));
        prog_b.back().timestamp = 2'000'000 + i;
    }
    std::thread ta([&] {
        for (const auto& e : prog_a) {
            service.post_event(id, e);
        }
    });
    std::thread tb([&] {
        for (const auto& e : prog_b) {
            service.post_event(id, e);
        }
    });
    ta.join();
    tb.join();
    const auto final_session = service.session(id);
    std::vector<UserEvent> seen_a;
    std::vector<UserEvent> seen_b;
    for (std::size_t i = base; i < final_session.event_log.size(); ++i) {
        const auto& e = final_session.event_log[i].event;
        (e.timestamp < 2'000'000 ? seen_a : seen_b).push_back(e);
    }
    c.require(seen_a == prog_a && seen_b == prog_b, "a writer's events were lost or reordered");

    const auto snapshot = store->load();
    c.require(snapshot.sessions.size() == 1 && snapshot.sessions[0].log == final_session.event_log,
              "store log differs from the live log");
    const auto replayed = engine.replay(final_session.event_log, id, snapshot.sessions[0].initial_profile);
    c.require(replayed.same_state(final_session), "replay of the interleaved log differs from the live session");
    return c;
}

namespace {

struct Expected {
    Session session;
    gateway::StateView view;
};

} // namespace

Check gateway_restart(int sessions, std::uint64_t seed) {
    Check c;
    TempDir dir("restart");
    Rng rng(seed);
    std::map<std::string, Expected> expected;
    std::map<std::string, UserProfile> profiles;
    std::string report;
    std::filesystem::path journal;
    {
        auto store = std::make_shared<gateway::FileStore>(dir.path);
        journal = store->journal_path();
        gateway::Service service(bundle(), store);
        std::vector<std::string> users;
        for (int i = 0; i < sessions; ++i) {
            gateway::SessionRequest req;
            if (!users.empty() && coin(rng, 0.3)) {
                req.user_id = users[pick(rng, users.size())];
            } else {
                req.name = "User " + std::to_string(i);
                req.gender = static_cast<Gender>(uniform(rng, 0, 2));
            }
            const auto handle = service.create_session(req);
            users.push_back(handle.user_id);
            const int n = uniform(rng, 0, 30);
            for (int k = 0; k < n; ++k) {
                service.post_event(handle.session_id,
                                   random_event(rng, service.engine(), service.session(handle.session_id)));
            }
            if (coin(rng)) {
                service.submit_feedback(handle.session_id, "myth_5g", coin(rng));
            }
            if (coin(rng)) {
                service.submit_instrument(handle.session_id, "sus", R"({"answers":[4,2,4,2,4,2,4,2,4,2]})");
            }
        }
        for (const auto& sid : service.session_ids()) {
            expected[sid] = {service.session(sid), service.get_state(sid)};
        }
        for (const auto& uid : users) {
            profiles[uid] = service.profile(uid);
        }
        report = service.feedback_report();
    }

    // Crash in the middle of the next write.
    {
        std::ofstream out(journal, std::ios::app | std::ios::binary);
        out << R"({"type":"turn","session_id":"s-)";
    }

    auto store = std::make_shared<gateway::FileStore>(dir.path);
    gateway::Service service(bundle(), store);
    const auto ids = service.session_ids();
    c.require(ids.size() == expected.size(), "restored " + std::to_string(ids.size()) + " of " +
                                                 std::to_string(expected.size()) + " sessions");
    for (const auto& [sid, want] : expected) {
        try {
            const auto got = service.session(sid);
            c.require(got.same_state(want.session), sid + ": state differs after restart");
            c.require(got.profile == want.session.profile, sid + ": profile differs after restart");
            c.require(got.event_log == want.session.event_log, sid + ": log differs after restart");
            const auto view = service.get_state(sid);
            c.require(view.response == want.view.response, sid + ": last response bytes differ after restart");
            c.require(view.summary == want.view.summary, sid + ": summary differs after restart");
        } catch (const Error& e) {
            c.fail(sid + ": " + e.what());
        }
    }
    for (const auto& [uid, want] : profiles) {
        c.require(service.profile(uid) == want, uid + ": profile differs after restart");
    }
    c.require(service.feedback_report() == report, "feedback tallies differ after restart");

    // The store keeps working after the torn tail.
    const auto handle = service.create_session({std::nullopt, "After", Gender::male});
    service.post_event(handle.session_id, button("begin", 7));
    auto reopened = std::make_shared<gateway::FileStore>(dir.path);
    c.require(reopened->load().sessions.size() == expected.size() + 1, "write after recovery was lost");
    return c;
}

Check feedback_conservation(int sessions, int events_per_session, std::uint64_t seed) {
    Check c;
    TempDir dir("feedback");
    const std::vector<std::string> myths = {"myth_hot_bath", "myth_5g", "myth_cold_weather"};
    std::string fact_id;
    for (const auto& item : bundle().catalog->get_section(content::SectionId::facts_and_myths).items) {
        if (!item.feedback_eligible()) {
            fact_id = item.id;
            break;
        }
    }
    c.require(!fact_id.empty(), "no ineligible item to probe");

    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> expected;
    std::string report;
    {
        auto store = std::make_shared<gateway::FileStore>(dir.path);
        gateway::Service service(bundle(), store);
        std::vector<std::string> ids;
        for (int i = 0; i < sessions; ++i) {
            ids.push_back(service.create_session({std::nullopt, "User " + std::to_string(i), Gender::female}).session_id);
        }
        std::vector<std::map<std::string, std::pair<std::uint64_t, std::uint64_t>>> counts(sessions);
        std::vector<std::string> errors(sessions);
        std::latch go(1);
        std::vector<std::thread> threads;
        for (int t = 0; t < sessions; ++t) {
            threads.emplace_back([&, t] {
                Rng rng(seed + t);
                auto& mine = counts[t];
                const auto count = [&](const std::string& item, bool helpful) {
                    (helpful ? mine[item].first : mine[item].second) += 1;
                };
                go.wait();
                try {
                    int done = 0;
                    while (done < events_per_session) {
                        if (coin(rng, 0.1)) {
                            if (error_of([&] { service.submit_feedback(ids[t], fact_id, true); }) !=
                                ErrorCode::not_eligible) {
                                errors[t] = "fact item accepted feedback";
                            }
                            if (error_of([&] { service.submit_feedback(ids[t], "no_such_item", true); }) !=
                                ErrorCode::unknown_item) {
                                errors[t] = "unknown item accepted feedback";
                            }
                        }
                        if (events_per_session - done < 3 || coin(rng)) {
                            const auto& item = myths[pick(rng, myths.size())];
                            const bool helpful = coin(rng);
                            service.submit_feedback(ids[t], item, helpful);
                            count(item, helpful);
                            ++done;
                            continue;
                        }
                        for (const auto* intent : {"open_info", "facts", "rate"}) {
                            service.post_event(ids[t], button(intent, 100));
                        }
                        for (const auto& item : myths) {
                            const bool helpful = coin(rng);
                            service.post_event(ids[t], button(helpful ? "helpful" : "not_helpful", 100));
                            count(item, helpful);
                        }
                        if (service.session(ids[t]).current.qualified() != "info:rated") {
                            errors[t] = "rating walk ended in " + service.session(ids[t]).current.qualified();
                        }
                        done += 3;
                    }
                } catch (const std::exception& e) {
                    errors[t] = e.what();
                }
            });
        }
        go.count_down();
        for (auto& th : threads) {
            th.join();
        }
        for (const auto& e : errors) {
            c.require(e.empty(), "writer failed: " + e);
        }
        for (const auto& m : counts) {
            for (const auto& [item, hn] : m) {
                expected[item].first += hn.first;
                expected[item].second += hn.second;
            }
        }
        std::uint64_t total = 0;
        for (const auto& item : myths) {
            const auto tally = service.submit_feedback(ids[0], item, true);  // probe, counted below
            expected[item].first += 1;
            c.require(tally.helpful_count == expected[item].first && tally.not_helpful_count == expected[item].second,
                      item + ": tally " + std::to_string(tally.helpful_count) + "/" +
                          std::to_string(tally.not_helpful_count) + " vs events " +
                          std::to_string(expected[item].first) + "/" + std::to_string(expected[item].second));
            total += tally.total();
        }
        c.require(total == static_cast<std::uint64_t>(sessions * events_per_session + 3), "total tally mismatch");

        std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> stored;
        for (const auto& e : store->load().feedback) {
            (e.helpful ? stored[e.item_id].first : stored[e.item_id].second) += 1;
        }
        c.require(stored == expected, "journaled feedback events differ from the tallies");
        report = service.feedback_report();
    }
    auto store = std::make_shared<gateway::FileStore>(dir.path);
    gateway::Service restarted(bundle(), store);
    c.require(restarted.feedback_report() == report, "tallies differ after restart");
    return c;
}

// --- validator --------------------------------------------------------------

Check seeded_corruptions(int seeds) {
    Check c;
    const auto& b = bundle();
    const dialogue::ValidationContext ctx{b.wheel.get(), b.catalog.get()};
    c.require(dialogue::validate_flow(*b.flows, ctx).empty(), "standard flows do not validate");

    const auto has = [](const std::vector<dialogue::Diagnostic>& diags, dialogue::Diagnostic::Kind kind,
                        const std::string& state, const std::string& detail) {
        return std::any_of(diags.begin(), diags.end(), [&](const dialogue::Diagnostic& d) {
            return d.kind == kind && d.state == state && d.detail.find(detail) != std::string::npos;
        });
    };

    for (int seed = 0; seed < seeds && c.ok; ++seed) {
        Rng rng(static_cast<std::uint64_t>(seed));
        std::vector<std::pair<std::string, std::string>> with_edges;
        std::vector<std::pair<std::string, std::string>> rendered;
        for (const auto& [fid, flow] : b.flows->flows) {
            for (const auto& [sid, st] : flow.states) {
                if (st.is_router()) {
                    continue;
                }
                rendered.push_back({fid, sid});
                if (!st.transitions.empty()) {
                    with_edges.push_back({fid, sid});
                }
            }
        }
        const auto tag = std::to_string(seed);

        {
            auto flows = *b.flows;
            const auto& [fid, sid] = with_edges[pick(rng, with_edges.size())];
            auto& st = flows.flows.at(fid).states.at(sid);
            auto& t = st.transitions[pick(rng, st.transitions.size())];
            t.target = dialogue::Target::to_state({fid, "missing_" + tag});
            const auto diags = dialogue::validate_flow(flows, ctx);
            c.require(has(diags, dialogue::Diagnostic::Kind::dangling_target, fid + ":" + sid, "missing_" + tag),
                      "seed " + tag + ": dangling edge from " + fid + ":" + sid + " not reported");
        }
        {
            auto flows = *b.flows;
            const std::string fid = pick(rng, 2) == 0 ? "main" : "info";
            auto& flow = flows.flows.at(fid);
            dialogue::FlowState orphan;
            orphan.id = "orphan_" + tag;
            orphan.view.header = "Orphan";
            orphan.terminal = true;
            flow.states.emplace(orphan.id, orphan);
            const auto diags = dialogue::validate_flow(flows, ctx);
            c.require(has(diags, dialogue::Diagnostic::Kind::unreachable, fid + ":" + orphan.id, ""),
                      "seed " + tag + ": unreachable " + fid + ":" + orphan.id + " not reported");
        }
        {
            auto flows = *b.flows;
            const auto& [fid, sid] = rendered[pick(rng, rendered.size())];
            flows.flows.at(fid).states.at(sid).view.body = "You said {slot:never_set_" + tag + "}.";
            const auto diags = dialogue::validate_flow(flows, ctx);
            c.require(has(diags, dialogue::Diagnostic::Kind::unbound_placeholder, fid + ":" + sid,
                          "never_set_" + tag),
                      "seed " + tag + ": unbound placeholder in " + fid + ":" + sid + " not reported");
        }
    }
    return c;
}

} // namespace carebot::testing
