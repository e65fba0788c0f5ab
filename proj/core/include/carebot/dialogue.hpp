#pragma once

#include "carebot/content.hpp"
#include "carebot/emotion.hpp"
#include "carebot/intent.hpp"
#include "carebot/profile.hpp"
#include "carebot/response.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace carebot::dialogue {

// ---------------------------------------------------------------------------
// Events

struct Utterance {
    std::string text;
    friend bool operator==(const Utterance&, const Utterance&) = default;
};
// A tap on a suggestion button. Buttons are bound to intents, so the id is
// the intent id.
struct ButtonPress {
    std::string intent;
    friend bool operator==(const ButtonPress&, const ButtonPress&) = default;
};
struct EmotionSelected {
    emotion::EmotionRef ref;
    friend bool operator==(const EmotionSelected&, const EmotionSelected&) = default;
};
struct CheckboxSubmit {
    std::vector<std::string> tags;
    friend bool operator==(const CheckboxSubmit&, const CheckboxSubmit&) = default;
};

using EventPayload = std::variant<Utterance, ButtonPress, EmotionSelected, CheckboxSubmit>;

enum class EventKind { utterance, button, emotion_selected, checkbox_submit };
std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view s);

struct UserEvent {
    EventPayload payload;
    std::int64_t timestamp = 0;  // recorded, never used to branch

    EventKind kind() const { return static_cast<EventKind>(payload.index()); }
    friend bool operator==(const UserEvent&, const UserEvent&) = default;
};

// ---------------------------------------------------------------------------
// Session

using SlotValue = std::variant<std::string, emotion::EmotionRef, std::vector<std::string>>;
using Slots = std::map<std::string, SlotValue>;

std::string slot_text(const SlotValue& value);

struct StateRef {
    std::string flow;
    std::string state;

    // "flow:state"; the scope key used by the intent registry.
    std::string qualified() const { return flow + ":" + state; }
    static std::optional<StateRef> parse(std::string_view qualified);
    friend auto operator<=>(const StateRef&, const StateRef&) = default;
};

enum class Outcome { transitioned, captured, no_match };
std::string_view to_string(Outcome o);
std::optional<Outcome> outcome_from_string(std::string_view s);

struct LogEntry {
    UserEvent event;
    response::ResponsePayload response;
    StateRef state;  // state after the event
    Outcome outcome = Outcome::no_match;

    friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct Session {
    std::string session_id;
    UserProfile profile;
    StateRef current;
    Slots slots;
    // Last state of each resumable flow the user walked away from.
    std::map<std::string, std::string> resume;
    std::vector<LogEntry> event_log;

    // current, slots and resume: what replay must reproduce.
    bool same_state(const Session& other) const {
        return current == other.current && slots == other.slots && resume == other.resume;
    }
};

// ---------------------------------------------------------------------------
// Flow definition

struct Target {
    enum class Kind { state, enter_flow, self } kind = Kind::self;
    StateRef state;    // Kind::state
    std::string flow;  // Kind::enter_flow

    static Target to_state(StateRef s) { return {Kind::state, std::move(s), {}}; }
    static Target enter(std::string flow) { return {Kind::enter_flow, {}, std::move(flow)}; }
    static Target self() { return {}; }
    std::string describe() const;
};

struct FeedbackDirective {
    std::string item_id;
    bool helpful = false;
};

struct Transition {
    std::string intent;
    Target target;
    std::string label;  // button caption; empty means no button
    std::map<std::string, std::string> set;  // constant slot assignments
    std::vector<std::string> clear;
    std::optional<FeedbackDirective> feedback;
};

// A global intent plus its default transition, available in every state.
struct GlobalIntent {
    Transition transition;
    bool suggest = false;  // offer as a button on every state
};

enum class CaptureMode { none, free_text, emotion, checkbox };
std::string_view to_string(CaptureMode m);

struct Capture {
    CaptureMode mode = CaptureMode::none;
    std::string slot;  // free_text may leave it empty: any input advances
    Target target;
    std::vector<std::string> empty_phrases;  // checkbox: spoken "none"
};

struct SlotCondition {
    enum class Kind { always, has, missing, equals } kind = Kind::always;
    std::string slot;
    std::string value;
};

struct Route {
    SlotCondition when;
    Target target;
};

struct StateTemplate {
    response::TemplateKind kind = response::TemplateKind::standard;
    std::optional<std::string> header;
    std::optional<std::string> body;
    std::optional<std::string> html_frame;
    std::vector<std::string> speak;  // explicit spoken subset (raw, slot-aware)
    std::optional<std::vector<std::string>> buttons;  // explicit intent ids
    bool value_buttons = false;   // one button per profile value
    bool global_buttons = true;   // append suggested global intents
    std::string slides_section;   // slides: section id
    std::vector<std::string> slides_items;  // slides: item subset, empty = all
    std::vector<response::SlideBox> slides;  // slides: inline boxes
    std::vector<response::DashboardTile> tiles;  // dashboard: inline tiles (else catalog)
};

struct FlowState {
    std::string id;
    StateTemplate view;
    std::vector<Transition> transitions;
    Capture capture;
    std::optional<std::string> fallback;
    std::vector<Route> routes;  // non-empty: a routing state, never rendered
    bool terminal = false;

    bool is_router() const { return !routes.empty(); }
    const Transition* transition_for(std::string_view intent) const;
};

struct Flow {
    std::string id;
    std::string entry;
    bool resumable = false;
    std::optional<std::string> fallback;
    std::map<std::string, FlowState> states;
    // States that must be walked in order: from each one, edges into this
    // flow may only stay put or go to the next one (the last may leave to
    // any other state).
    std::vector<std::string> sequence;
};

struct FlowSet {
    StateRef start;
    std::string default_fallback;
    std::map<std::string, Flow> flows;
    std::vector<intent::IntentDef> intents;  // global and state-local
    std::map<std::string, GlobalIntent> globals;
    std::vector<std::string> global_order;  // authored order of global intents

    const FlowState* find(const StateRef& ref) const;
};

// Parses the flow document (everything except the therapy section).
FlowSet parse_flows(const std::string& yaml, std::string source_name = "<flows>");
FlowSet load_flows(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Templates

// Substitutes {slot:NAME}, {profile:FIELD} and gender markers {g:F|M|N}.
// "{{" and "}}" are literal braces. Throws unbound_placeholder.
std::string render_slots(std::string_view text, const UserProfile& profile, const Slots& slots);

struct PlaceholderRef {
    enum class Kind { slot, profile, gender, invalid } kind;
    std::string name;
};
std::vector<PlaceholderRef> placeholders(std::string_view text);
bool is_profile_field(std::string_view field);

// ---------------------------------------------------------------------------
// Validation

struct Diagnostic {
    enum class Kind {
        missing_start,
        missing_entry,
        dangling_target,
        unknown_intent,
        unreachable,
        no_terminal,
        unbound_placeholder,
        bad_placeholder,
        duplicate_phrase,
        duplicate_intent,
        empty_phrase_set,
        router_cycle,
        router_without_default,
        invalid_button,
        no_utterance_route,
        unknown_content,
        unknown_value_tag,
        template_mismatch,
        therapy_shape,
    } kind;
    std::string state;   // qualified state id, when the problem sits on one
    std::string detail;  // intent, slot or free-form detail

    std::string to_string() const;
};

std::string_view to_string(Diagnostic::Kind kind);

struct ValidationContext {
    const emotion::EmotionWheel* wheel = nullptr;
    const content::Catalog* catalog = nullptr;
};

// Empty iff the flow set is well formed: no dangling edges, every state
// reachable, a terminal state reachable, every placeholder bound on every
// path, every button resolvable and every intent reachable by voice.
std::vector<Diagnostic> validate_flow(const FlowSet& flows, const ValidationContext& ctx = {});

// ---------------------------------------------------------------------------
// Engine

struct Turn {
    Session session;
    response::ResponsePayload response;
    Outcome outcome = Outcome::no_match;
    std::vector<content::FeedbackEvent> feedback;  // side effects for the caller to persist
};

// Pure dialogue engine over an immutable flow set.
class Engine {
public:
    Engine(std::shared_ptr<const FlowSet> flows, const emotion::EmotionWheel& wheel,
           const content::Catalog& catalog);

    const FlowSet& flows() const { return *flows_; }
    const emotion::EmotionWheel& wheel() const { return *wheel_; }
    const content::Catalog& catalog() const { return *catalog_; }

    // New session at the start state; no events logged.
    Turn start(std::string session_id, UserProfile profile) const;

    // Throws unknown_session when session.current names no state,
    // malformed_event / unknown_value_tag for unusable payloads.
    Turn advance(const Session& session, const UserEvent& event) const;

    // The current state's payload (no fallback hint).
    response::ResponsePayload render(const Session& session) const;

    // Rebuilds a session from its log. Throws replay_divergence when the log
    // no longer fits the flows.
    Session replay(const std::vector<LogEntry>& log, std::string session_id, UserProfile initial_profile) const;

    // Intents a user can invoke in `state`: its local intents plus globals.
    std::set<std::string> available_intents(const StateRef& state) const;

private:
    struct Decision;

    Decision decide(const Session& session, const FlowState& state, const UserEvent& event) const;
    StateRef resolve(const Session& session, const Target& target, Session& next) const;
    response::ResponsePayload render_state(const Session& session, const FlowState& state,
                                           const std::optional<std::string>& hint) const;
    std::string fallback_for(const StateRef& ref, const FlowState& state) const;

    std::shared_ptr<const FlowSet> flows_;
    intent::Registry registry_;
    const emotion::EmotionWheel* wheel_;
    const content::Catalog* catalog_;
};

inline Turn advance(const Engine& engine, const Session& session, const UserEvent& event) {
    return engine.advance(session, event);
}

inline Session replay(const Engine& engine, const std::vector<LogEntry>& log, std::string session_id,
                      UserProfile initial_profile) {
    return engine.replay(log, std::move(session_id), std::move(initial_profile));
}

} // namespace carebot::dialogue
