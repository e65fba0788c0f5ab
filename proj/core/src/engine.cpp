#include "carebot/dialogue.hpp"
#include "carebot/error.hpp"

#include <algorithm>

namespace carebot::dialogue {

namespace {

constexpr int max_route_depth = 16;

bool holds(const SlotCondition& c, const Slots& slots) {
    switch (c.kind) {
    case SlotCondition::Kind::always: return true;
    case SlotCondition::Kind::has: return slots.count(c.slot) != 0;
    case SlotCondition::Kind::missing: return slots.count(c.slot) == 0;
    case SlotCondition::Kind::equals: {
        const auto it = slots.find(c.slot);
        return it != slots.end() && slot_text(it->second) == c.value;
    }
    }
    return false;
}

// Value tags mentioned in an utterance, in vocabulary order.
std::vector<std::string> spoken_values(const Tokens& tokens, const content::Catalog& catalog) {
    std::vector<std::string> out;
    for (const auto& v : catalog.values()) {
        std::vector<std::string> forms = v.phrases;
        forms.push_back(v.tag);
        forms.push_back(v.label);
        for (const auto& form : forms) {
            const auto phrase = normalize(form);
            if (!phrase.empty() && contains_run(tokens, phrase)) {
                out.push_back(v.tag);
                break;
            }
        }
    }
    return out;
}

} // namespace

struct Engine::Decision {
    Outcome outcome = Outcome::no_match;
    const Transition* transition = nullptr;  // Outcome::transitioned
    std::optional<SlotValue> captured;       // Outcome::captured
    std::optional<emotion::Source> source;   // emotion captures
    std::optional<std::set<std::string>> values;  // checkbox captures
};

Engine::Engine(std::shared_ptr<const FlowSet> flows, const emotion::EmotionWheel& wheel,
               const content::Catalog& catalog)
    : flows_(std::move(flows)), registry_(flows_->intents), wheel_(&wheel), catalog_(&catalog) {}

std::set<std::string> Engine::available_intents(const StateRef& state) const {
    std::set<std::string> out;
    for (const auto* def : registry_.globals()) {
        out.insert(def->id);
    }
    for (const auto* def : registry_.locals(state.qualified())) {
        out.insert(def->id);
    }
    return out;
}

std::string Engine::fallback_for(const StateRef& ref, const FlowState& state) const {
    if (state.fallback) {
        return *state.fallback;
    }
    const auto& flow = flows_->flows.at(ref.flow);
    return flow.fallback ? *flow.fallback : flows_->default_fallback;
}

Engine::Decision Engine::decide(const Session& session, const FlowState& state, const UserEvent& event) const {
    const auto scope = session.current.qualified();

    // The transition an intent triggers here: the state's own edge, else the
    // global default, unless a local intent of the same id shadows it.
    const auto edge = [&](const std::string& intent_id) -> const Transition* {
        if (const auto* t = state.transition_for(intent_id)) {
            return t;
        }
        const auto* def = registry_.resolve(intent_id, scope);
        if (def == nullptr || !def->is_global()) {
            return nullptr;
        }
        const auto g = flows_->globals.find(intent_id);
        return g == flows_->globals.end() ? nullptr : &g->second.transition;
    };

    Decision d;
    const auto& capture = state.capture;

    if (const auto* u = std::get_if<Utterance>(&event.payload)) {
        if (!is_valid_utf8(u->text)) {
            throw Error(ErrorCode::malformed_event, "utterance is not valid UTF-8");
        }
        const auto tokens = normalize(u->text);
        const auto mode =
            capture.mode == CaptureMode::none ? intent::MatchMode::contiguous : intent::MatchMode::whole_utterance;
        if (const auto m = registry_.match_tokens(tokens, scope, mode)) {
            if (const auto* t = edge(m->intent_id)) {
                d.outcome = Outcome::transitioned;
                d.transition = t;
                return d;
            }
        }
        switch (capture.mode) {
        case CaptureMode::none: break;
        case CaptureMode::free_text: {
            auto text = trim(u->text);
            if (!text.empty()) {
                d.outcome = Outcome::captured;
                d.captured = std::move(text);
            }
            break;
        }
        case CaptureMode::emotion: {
            const auto refs = wheel_->parse_utterance(u->text);
            if (!refs.empty()) {
                d.outcome = Outcome::captured;
                d.captured = refs.front();
                d.source = emotion::Source::voice;
            }
            break;
        }
        case CaptureMode::checkbox: {
            const auto key = join(tokens);
            const bool none = std::any_of(capture.empty_phrases.begin(), capture.empty_phrases.end(),
                                          [&](const std::string& p) { return normalized_key(p) == key; });
            auto tags = none ? std::vector<std::string>{} : spoken_values(tokens, *catalog_);
            if (none || !tags.empty()) {
                d.outcome = Outcome::captured;
                d.values = std::set<std::string>(tags.begin(), tags.end());
                d.captured = std::move(tags);
            }
            break;
        }
        }
        return d;
    }

    if (const auto* b = std::get_if<ButtonPress>(&event.payload)) {
        if (registry_.available(b->intent, scope)) {
            if (const auto* t = edge(b->intent)) {
                d.outcome = Outcome::transitioned;
                d.transition = t;
            }
        }
        return d;
    }

    if (const auto* e = std::get_if<EmotionSelected>(&event.payload)) {
        if (capture.mode == CaptureMode::emotion) {
            d.outcome = Outcome::captured;
            d.captured = wheel_->ref(e->ref.sector, e->ref.intensity);
            d.source = emotion::Source::touch;
        }
        return d;
    }

    const auto& c = std::get<CheckboxSubmit>(event.payload);
    if (capture.mode == CaptureMode::checkbox) {
        std::set<std::string> tags(c.tags.begin(), c.tags.end());
        catalog_->check_values(tags);
        d.outcome = Outcome::captured;
        d.captured = std::vector<std::string>(tags.begin(), tags.end());
        d.values = std::move(tags);
    }
    return d;
}

StateRef Engine::resolve(const Session& session, const Target& target, Session& next) const {
    StateRef dest;
    auto follow = [&](const Target& t, const StateRef& from) {
        switch (t.kind) {
        case Target::Kind::self: return from;
        case Target::Kind::state: return t.state;
        case Target::Kind::enter_flow: {
            const auto f = flows_->flows.find(t.flow);
            if (f == flows_->flows.end()) {
                throw Error(ErrorCode::invariant_violation, "no flow '" + t.flow + "'", t.flow);
            }
            const auto r = next.resume.find(t.flow);
            if (r != next.resume.end()) {
                StateRef resumed{t.flow, r->second};
                next.resume.erase(r);
                return resumed;
            }
            return StateRef{t.flow, f->second.entry};
        }
        }
        return from;
    };

    // Asking for the resumable flow one is already in keeps the current step.
    const bool same_flow = target.kind == Target::Kind::enter_flow && target.flow == session.current.flow &&
                           flows_->flows.at(target.flow).resumable;
    dest = same_flow ? session.current : follow(target, session.current);
    for (int depth = 0;; ++depth) {
        const auto* st = flows_->find(dest);
        if (st == nullptr) {
            throw Error(ErrorCode::invariant_violation, "no state '" + dest.qualified() + "'", dest.qualified());
        }
        if (!st->is_router()) {
            break;
        }
        if (depth == max_route_depth) {
            throw Error(ErrorCode::invariant_violation, "routing loop at '" + dest.qualified() + "'",
                        dest.qualified());
        }
        const auto route = std::find_if(st->routes.begin(), st->routes.end(),
                                        [&](const Route& r) { return holds(r.when, next.slots); });
        if (route == st->routes.end()) {
            throw Error(ErrorCode::invariant_violation, "no route applies at '" + dest.qualified() + "'",
                        dest.qualified());
        }
        dest = follow(route->target, dest);
    }

    const auto& from = session.current;
    if (dest.flow != from.flow) {
        const auto& flow = flows_->flows.at(from.flow);
        const auto* st = flows_->find(from);
        if (flow.resumable && st != nullptr && !st->terminal) {
            next.resume[from.flow] = from.state;
        }
    }
    if (flows_->find(dest)->terminal) {
        next.resume.erase(dest.flow);
    }
    return dest;
}

response::ResponsePayload Engine::render_state(const Session& session, const FlowState& state,
                                               const std::optional<std::string>& hint) const {
    const auto& v = state.view;
    const auto render = [&](const std::string& s) { return render_slots(s, session.profile, session.slots); };
    const auto scope = session.current.qualified();

    response::TemplateSpec spec;
    spec.kind = v.kind;
    if (v.header) {
        spec.header = render(*v.header);
    }
    if (v.body) {
        spec.body = render(*v.body);
    }
    if (v.html_frame) {
        spec.html_frame = render(*v.html_frame);
    }
    if (hint) {
        const auto text = render(*hint);
        spec.body = spec.body ? text + "\n\n" + *spec.body : text;
        spec.speak.push_back({text, std::nullopt});
    } else {
        for (const auto& s : v.speak) {
            spec.speak.push_back({render(s), std::nullopt});
        }
    }

    std::set<std::string> used;
    const auto add_button = [&](const std::string& intent_id, std::string label) {
        if (used.insert(intent_id).second) {
            spec.buttons.push_back({std::move(label), intent_id});
        }
    };
    const auto label_of = [&](const std::string& intent_id) {
        const Transition* t = state.transition_for(intent_id);
        if (t == nullptr) {
            const auto g = flows_->globals.find(intent_id);
            t = g == flows_->globals.end() ? nullptr : &g->second.transition;
        }
        if (t != nullptr && !t->label.empty()) {
            return t->label;
        }
        const auto* def = registry_.resolve(intent_id, scope);
        return def != nullptr && !def->label.empty() ? def->label : intent_id;
    };

    if (v.buttons) {
        for (const auto& id : *v.buttons) {
            add_button(id, render(label_of(id)));
        }
    } else {
        for (const auto& t : state.transitions) {
            if (!t.label.empty()) {
                add_button(t.intent, render(t.label));
            }
        }
    }
    if (v.value_buttons) {
        for (const auto& value : catalog_->values()) {
            const bool chosen = session.profile.values.empty() || session.profile.values.count(value.tag) != 0;
            if (chosen && registry_.available(value.tag, scope)) {
                add_button(value.tag, value.label);
            }
        }
    }
    if (v.global_buttons) {
        for (const auto& id : flows_->global_order) {
            const auto& g = flows_->globals.at(id);
            const auto& t = g.transition.target;
            const bool lands_here = (t.kind == Target::Kind::state && t.state == session.current) ||
                                    (t.kind == Target::Kind::enter_flow && t.flow == session.current.flow);
            const auto* def = registry_.resolve(id, scope);
            if (g.suggest && !lands_here && def != nullptr && def->is_global()) {
                add_button(id, render(label_of(id)));
            }
        }
    }

    switch (v.kind) {
    case response::TemplateKind::slides:
        if (!v.slides_section.empty()) {
            const auto& section = catalog_->get_section(v.slides_section);
            for (const auto& item : section.items) {
                if (v.slides_items.empty() ||
                    std::find(v.slides_items.begin(), v.slides_items.end(), item.id) != v.slides_items.end()) {
                    spec.slides.push_back({item.id, item.speech_text, item.body_text});
                }
            }
        }
        for (const auto& box : v.slides) {
            spec.slides.push_back({box.id, render(box.summary), render(box.text)});
        }
        break;
    case response::TemplateKind::checkboxes:
        for (const auto& value : catalog_->values()) {
            spec.checkboxes.push_back({value.tag, value.label, session.profile.values.count(value.tag) != 0});
        }
        break;
    case response::TemplateKind::dashboard:
        if (v.tiles.empty()) {
            spec.tiles = catalog_->dashboard();
        } else {
            for (const auto& t : v.tiles) {
                spec.tiles.push_back({t.id, render(t.title), render(t.value)});
            }
        }
        break;
    case response::TemplateKind::emotions:
    case response::TemplateKind::standard: break;
    }

    response::BuildContext ctx;
    ctx.wheel = wheel_;
    ctx.available_intents = available_intents(session.current);
    return response::build_response(spec, ctx);
}

Turn Engine::start(std::string session_id, UserProfile profile) const {
    Session s;
    s.session_id = std::move(session_id);
    s.profile = std::move(profile);
    s.current = flows_->start;
    Session next = s;
    s.current = resolve(s, Target::self(), next);
    s.resume = next.resume;
    Turn turn;
    turn.response = render(s);
    turn.session = std::move(s);
    turn.outcome = Outcome::transitioned;
    return turn;
}

response::ResponsePayload Engine::render(const Session& session) const {
    const auto* st = flows_->find(session.current);
    if (st == nullptr) {
        throw Error(ErrorCode::unknown_session, "session is at unknown state '" + session.current.qualified() + "'",
                    session.current.qualified());
    }
    return render_state(session, *st, std::nullopt);
}

Turn Engine::advance(const Session& session, const UserEvent& event) const {
    const auto* st = flows_->find(session.current);
    if (st == nullptr || st->is_router()) {
        throw Error(ErrorCode::unknown_session, "session is at unknown state '" + session.current.qualified() + "'",
                    session.current.qualified());
    }
    const auto d = decide(session, *st, event);

    Turn turn;
    turn.outcome = d.outcome;
    Session next = session;

    if (d.outcome == Outcome::no_match) {
        turn.response = render_state(session, *st, fallback_for(session.current, *st));
    } else {
        Target target;
        if (d.outcome == Outcome::transitioned) {
            const auto& t = *d.transition;
            for (const auto& slot : t.clear) {
                next.slots.erase(slot);
            }
            for (const auto& [slot, value] : t.set) {
                next.slots[slot] = render_slots(value, next.profile, next.slots);
            }
            if (t.feedback) {
                turn.feedback.push_back({t.feedback->item_id, t.feedback->helpful, session.session_id, event.timestamp});
            }
            target = t.target;
        } else {
            const auto& capture = st->capture;
            if (!capture.slot.empty()) {
                next.slots[capture.slot] = *d.captured;
            }
            if (d.source) {
                next.profile.emotion_history.push_back(
                    {std::get<emotion::EmotionRef>(*d.captured), event.timestamp, *d.source, session.session_id});
            }
            if (d.values) {
                next.profile = content::submit_values(next.profile, *d.values, *catalog_);
            }
            target = capture.target;
        }
        next.current = resolve(session, target, next);
        turn.response = render(next);
    }

    next.event_log.push_back({event, turn.response, next.current, d.outcome});
    turn.session = std::move(next);
    return turn;
}

Session Engine::replay(const std::vector<LogEntry>& log, std::string session_id, UserProfile initial_profile) const {
    auto s = start(std::move(session_id), std::move(initial_profile)).session;
    // advance() copies the session, so the growing log is held aside to keep replay linear.
    std::vector<LogEntry> rebuilt;
    rebuilt.reserve(log.size());
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto& entry = log[i];
        const auto where = "log entry " + std::to_string(i);
        if (flows_->find(entry.state) == nullptr) {
            throw Error(ErrorCode::replay_divergence,
                        where + " names state '" + entry.state.qualified() + "' which no longer exists",
                        entry.state.qualified());
        }
        Turn t;
        try {
            t = advance(s, entry.event);
        } catch (const Error& e) {
            throw Error(ErrorCode::replay_divergence, where + " no longer applies: " + e.what(),
                        entry.state.qualified());
        }
        if (t.session.current != entry.state) {
            throw Error(ErrorCode::replay_divergence,
                        where + " led to '" + t.session.current.qualified() + "', recorded '" +
                            entry.state.qualified() + "'",
                        entry.state.qualified());
        }
        rebuilt.push_back(std::move(t.session.event_log.back()));
        s = std::move(t.session);
        s.event_log.clear();
    }
    s.event_log = std::move(rebuilt);
    return s;
}

} // namespace carebot::dialogue
