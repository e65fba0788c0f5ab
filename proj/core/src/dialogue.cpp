#include "carebot/dialogue.hpp"

namespace carebot::dialogue {

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::utterance: return "utterance";
    case EventKind::button: return "button";
    case EventKind::emotion_selected: return "emotion_selected";
    case EventKind::checkbox_submit: return "checkbox_submit";
    }
    return "utterance";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
    for (auto k : {EventKind::utterance, EventKind::button, EventKind::emotion_selected, EventKind::checkbox_submit}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::transitioned: return "transitioned";
    case Outcome::captured: return "captured";
    case Outcome::no_match: return "no_match";
    }
    return "no_match";
}

std::optional<Outcome> outcome_from_string(std::string_view s) {
    for (auto o : {Outcome::transitioned, Outcome::captured, Outcome::no_match}) {
        if (to_string(o) == s) {
            return o;
        }
    }
    return std::nullopt;
}

std::string_view to_string(CaptureMode m) {
    switch (m) {
    case CaptureMode::none: return "none";
    case CaptureMode::free_text: return "free_text";
    case CaptureMode::emotion: return "emotion";
    case CaptureMode::checkbox: return "checkbox";
    }
    return "none";
}

std::optional<StateRef> StateRef::parse(std::string_view qualified) {
    const auto colon = qualified.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == qualified.size() ||
        qualified.find(':', colon + 1) != std::string_view::npos) {
        return std::nullopt;
    }
    return StateRef{std::string(qualified.substr(0, colon)), std::string(qualified.substr(colon + 1))};
}

std::string Target::describe() const {
    switch (kind) {
    case Kind::state: return state.qualified();
    case Kind::enter_flow: return "@" + flow;
    case Kind::self: return ".";
    }
    return ".";
}

const Transition* FlowState::transition_for(std::string_view intent) const {
    for (const auto& t : transitions) {
        if (t.intent == intent) {
            return &t;
        }
    }
    return nullptr;
}

const FlowState* FlowSet::find(const StateRef& ref) const {
    const auto f = flows.find(ref.flow);
    if (f == flows.end()) {
        return nullptr;
    }
    const auto s = f->second.states.find(ref.state);
    return s == f->second.states.end() ? nullptr : &s->second;
}

std::string_view to_string(Diagnostic::Kind kind) {
    using K = Diagnostic::Kind;
    switch (kind) {
    case K::missing_start: return "missing_start";
    case K::missing_entry: return "missing_entry";
    case K::dangling_target: return "dangling_target";
    case K::unknown_intent: return "unknown_intent";
    case K::unreachable: return "unreachable";
    case K::no_terminal: return "no_terminal";
    case K::unbound_placeholder: return "unbound_placeholder";
    case K::bad_placeholder: return "bad_placeholder";
    case K::duplicate_phrase: return "duplicate_phrase";
    case K::duplicate_intent: return "duplicate_intent";
    case K::empty_phrase_set: return "empty_phrase_set";
    case K::router_cycle: return "router_cycle";
    case K::router_without_default: return "router_without_default";
    case K::invalid_button: return "invalid_button";
    case K::no_utterance_route: return "no_utterance_route";
    case K::unknown_content: return "unknown_content";
    case K::unknown_value_tag: return "unknown_value_tag";
    case K::template_mismatch: return "template_mismatch";
    case K::therapy_shape: return "therapy_shape";
    }
    return "unknown";
}

std::string Diagnostic::to_string() const {
    std::string out(dialogue::to_string(kind));
    if (!state.empty()) {
        out += " [" + state + "]";
    }
    if (!detail.empty()) {
        out += ": " + detail;
    }
    return out;
}

} // namespace carebot::dialogue
