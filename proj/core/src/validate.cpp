#include "carebot/dialogue.hpp"
#include "carebot/error.hpp"

#include <algorithm>
#include <deque>

namespace carebot::dialogue {

namespace {

using K = Diagnostic::Kind;
using SlotSet = std::set<std::string>;

struct Edge {
    StateRef to;
    SlotSet adds;
    std::vector<std::string> clears;
    SlotSet assumes;  // router guards known to hold on this edge
};

class Validator {
public:
    Validator(const FlowSet& flows, const ValidationContext& ctx)
        : flows_(flows), ctx_(ctx), registry_(flows.intents) {}

    std::vector<Diagnostic> run() {
        check_registry();
        check_structure();
        if (!flows_.find(flows_.start)) {
            add(K::missing_start, "", flows_.start.qualified());
            return std::move(out_);
        }
        const auto bound = bound_slots();
        check_reachability(bound);
        check_placeholders(bound);
        check_sequences();
        return std::move(out_);
    }

private:
    void add(K kind, std::string state, std::string detail) {
        out_.push_back({kind, std::move(state), std::move(detail)});
    }

    template <typename F>
    void each_state(F&& f) const {
        for (const auto& [fid, flow] : flows_.flows) {
            for (const auto& [sid, st] : flow.states) {
                f(StateRef{fid, sid}, flow, st);
            }
        }
    }

    bool target_exists(const Target& t) const {
        switch (t.kind) {
        case Target::Kind::self: return true;
        case Target::Kind::state: return flows_.find(t.state) != nullptr;
        case Target::Kind::enter_flow: return flows_.flows.count(t.flow) != 0;
        }
        return false;
    }

    const Transition* edge_for(const FlowState& st, const std::string& scope, const std::string& intent_id) const {
        if (const auto* t = st.transition_for(intent_id)) {
            return t;
        }
        const auto* def = registry_.resolve(intent_id, scope);
        if (def == nullptr || !def->is_global()) {
            return nullptr;
        }
        const auto g = flows_.globals.find(intent_id);
        return g == flows_.globals.end() ? nullptr : &g->second.transition;
    }

    void check_registry() {
        for (const auto& p : registry_.problems()) {
            const auto kind = p.kind == intent::RegistryProblem::Kind::duplicate_phrase  ? K::duplicate_phrase
                              : p.kind == intent::RegistryProblem::Kind::duplicate_intent ? K::duplicate_intent
                                                                                          : K::empty_phrase_set;
            add(kind, p.scope, p.intent_id + (p.detail.empty() ? "" : " (" + p.detail + ")"));
        }
        for (const auto& def : flows_.intents) {
            if (!def.is_global() && !StateRef::parse(def.state_scope)) {
                add(K::unknown_intent, def.state_scope, def.id + " is scoped to a malformed state id");
            }
        }
    }

    void check_structure() {
        for (const auto& [fid, flow] : flows_.flows) {
            if (flow.states.count(flow.entry) == 0) {
                add(K::missing_entry, fid, flow.entry);
            }
        }
        for (const auto& [id, g] : flows_.globals) {
            if (!target_exists(g.transition.target)) {
                add(K::dangling_target, "", id + " -> " + g.transition.target.describe());
            }
        }
        each_state([&](const StateRef& ref, const Flow&, const FlowState& st) {
            const auto scope = ref.qualified();
            if (st.is_router()) {
                check_router(ref, st);
                return;
            }
            for (const auto& t : st.transitions) {
                if (!target_exists(t.target)) {
                    add(K::dangling_target, scope, t.intent + " -> " + t.target.describe());
                }
                if (!registry_.available(t.intent, scope)) {
                    add(K::unknown_intent, scope, t.intent);
                }
                if (t.feedback && ctx_.catalog) {
                    const auto* item = ctx_.catalog->find_item(t.feedback->item_id);
                    if (item == nullptr || !item->feedback_eligible()) {
                        add(K::unknown_content, scope, "feedback item " + t.feedback->item_id);
                    }
                }
            }
            for (const auto* def : registry_.locals(scope)) {
                if (st.transition_for(def->id) == nullptr) {
                    add(K::unknown_intent, scope, def->id + " has no transition");
                }
            }
            if (st.capture.mode != CaptureMode::none && !target_exists(st.capture.target)) {
                add(K::dangling_target, scope, "capture -> " + st.capture.target.describe());
            }
            check_view(ref, st);
            check_voice_routes(ref, st);
        });
    }

    void check_router(const StateRef& ref, const FlowState& st) {
        const auto scope = ref.qualified();
        SlotSet has, missing;
        bool total = false;
        for (const auto& r : st.routes) {
            if (!target_exists(r.target) || r.target.kind == Target::Kind::self) {
                add(K::dangling_target, scope, "route -> " + r.target.describe());
            }
            switch (r.when.kind) {
            case SlotCondition::Kind::always: total = true; break;
            case SlotCondition::Kind::has: has.insert(r.when.slot); break;
            case SlotCondition::Kind::missing: missing.insert(r.when.slot); break;
            case SlotCondition::Kind::equals: break;
            }
        }
        for (const auto& s : has) {
            total = total || missing.count(s) != 0;
        }
        if (!total) {
            add(K::router_without_default, scope, "");
        }
        if (!st.transitions.empty() || st.capture.mode != CaptureMode::none) {
            add(K::template_mismatch, scope, "a routing state takes no input");
        }

        // Chains of routers must end in a rendered state.
        std::set<StateRef> seen{ref};
        std::deque<StateRef> todo{ref};
        while (!todo.empty()) {
            const auto cur = todo.front();
            todo.pop_front();
            const auto* s = flows_.find(cur);
            for (const auto& r : s->routes) {
                const auto next = route_target(r.target);
                const auto* n = next ? flows_.find(*next) : nullptr;
                if (n == nullptr || !n->is_router()) {
                    continue;
                }
                if (*next == ref) {
                    add(K::router_cycle, scope, "");
                    return;
                }
                if (seen.insert(*next).second) {
                    todo.push_back(*next);
                }
            }
        }
    }

    std::optional<StateRef> route_target(const Target& t) const {
        if (t.kind == Target::Kind::state) {
            return t.state;
        }
        if (t.kind == Target::Kind::enter_flow) {
            const auto f = flows_.flows.find(t.flow);
            if (f != flows_.flows.end()) {
                return StateRef{t.flow, f->second.entry};
            }
        }
        return std::nullopt;
    }

    void check_view(const StateRef& ref, const FlowState& st) {
        const auto scope = ref.qualified();
        const auto& v = st.view;
        using TK = response::TemplateKind;
        if (v.kind == TK::slides) {
            if (v.slides_section.empty() && v.slides.empty()) {
                add(K::template_mismatch, scope, "slides template without slides");
            }
            if (!v.slides_section.empty() && ctx_.catalog) {
                const auto id = content::section_from_string(v.slides_section);
                if (!id) {
                    add(K::unknown_content, scope, "section " + v.slides_section);
                } else {
                    const auto& items = ctx_.catalog->get_section(*id).items;
                    for (const auto& item : v.slides_items) {
                        const bool found = std::any_of(items.begin(), items.end(),
                                                       [&](const content::ContentItem& i) { return i.id == item; });
                        if (!found) {
                            add(K::unknown_content, scope, "item " + item + " in " + v.slides_section);
                        }
                    }
                }
            }
        } else if (!v.slides_section.empty() || !v.slides.empty()) {
            add(K::template_mismatch, scope, "slides on a non-slides template");
        }
        if (!v.tiles.empty() && v.kind != TK::dashboard) {
            add(K::template_mismatch, scope, "tiles on a non-dashboard template");
        }
        if (st.capture.mode == CaptureMode::emotion && v.kind != TK::emotions) {
            add(K::template_mismatch, scope, "emotion capture needs the emotions template");
        }
        if (st.capture.mode == CaptureMode::checkbox && v.kind != TK::checkboxes) {
            add(K::template_mismatch, scope, "checkbox capture needs the checkboxes template");
        }
        if (v.buttons) {
            for (const auto& id : *v.buttons) {
                if (!registry_.available(id, scope) || edge_for(st, scope, id) == nullptr) {
                    add(K::invalid_button, scope, id);
                }
            }
        }
        if (v.value_buttons && ctx_.catalog) {
            for (const auto& value : ctx_.catalog->values()) {
                if (!registry_.available(value.tag, scope)) {
                    add(K::unknown_value_tag, scope, "no intent for value " + value.tag);
                }
            }
        }
    }

    // Every transition must also be reachable by voice: some phrase of the
    // intent, spoken alone, has to select it in this state.
    void check_voice_routes(const StateRef& ref, const FlowState& st) {
        const auto scope = ref.qualified();
        const auto mode = st.capture.mode == CaptureMode::none ? intent::MatchMode::contiguous
                                                               : intent::MatchMode::whole_utterance;
        std::set<std::string> intents;
        for (const auto& t : st.transitions) {
            intents.insert(t.intent);
        }
        for (const auto& id : flows_.global_order) {
            intents.insert(id);
        }
        for (const auto& id : intents) {
            const auto* def = registry_.resolve(id, scope);
            if (def == nullptr || edge_for(st, scope, id) == nullptr) {
                continue;
            }
            const bool voiced = std::any_of(def->phrases.begin(), def->phrases.end(), [&](const Tokens& p) {
                const auto m = registry_.match_tokens(p, scope, mode);
                return m && m->intent_id == id;
            });
            if (!voiced) {
                add(K::no_utterance_route, scope, id);
            }
        }
    }

    std::vector<Edge> edges_of(const StateRef& ref, const FlowState& st) const {
        std::vector<Edge> out;
        const auto land = [&](const Target& t, const StateRef& from) -> std::vector<StateRef> {
            switch (t.kind) {
            case Target::Kind::self: return {from};
            case Target::Kind::state: return {t.state};
            case Target::Kind::enter_flow: {
                const auto f = flows_.flows.find(t.flow);
                if (f == flows_.flows.end()) {
                    return {};
                }
                if (f->second.resumable && t.flow == from.flow) {
                    return {from};
                }
                return {StateRef{t.flow, f->second.entry}};
            }
            }
            return {};
        };
        const auto push = [&](const Target& t, SlotSet adds, const std::vector<std::string>& clears,
                              SlotSet assumes = {}) {
            for (auto& to : land(t, ref)) {
                if (flows_.find(to) != nullptr) {
                    out.push_back({std::move(to), adds, clears, assumes});
                }
            }
        };
        if (st.is_router()) {
            SlotSet earlier_missing;
            for (const auto& r : st.routes) {
                SlotSet assumes = earlier_missing;
                if (r.when.kind == SlotCondition::Kind::has || r.when.kind == SlotCondition::Kind::equals) {
                    assumes.insert(r.when.slot);
                }
                push(r.target, {}, {}, assumes);
                if (r.when.kind == SlotCondition::Kind::missing) {
                    earlier_missing.insert(r.when.slot);
                }
            }
            return out;
        }
        const auto scope = ref.qualified();
        std::set<std::string> seen;
        for (const auto& t : st.transitions) {
            seen.insert(t.intent);
            SlotSet adds;
            for (const auto& [slot, value] : t.set) {
                adds.insert(slot);
            }
            push(t.target, adds, t.clear);
        }
        for (const auto& [id, g] : flows_.globals) {
            const auto* def = registry_.resolve(id, scope);
            if (seen.count(id) == 0 && def != nullptr && def->is_global()) {
                SlotSet adds;
                for (const auto& [slot, value] : g.transition.set) {
                    adds.insert(slot);
                }
                push(g.transition.target, adds, g.transition.clear);
            }
        }
        if (st.capture.mode != CaptureMode::none) {
            SlotSet adds;
            if (!st.capture.slot.empty()) {
                adds.insert(st.capture.slot);
            }
            push(st.capture.target, adds, {});
        }
        return out;
    }

    // Must-analysis: for each reachable state, the slots bound on every path
    // from the start state. nullopt marks unreached states.
    std::map<StateRef, SlotSet> bound_slots() {
        std::map<StateRef, std::optional<SlotSet>> in;
        std::map<StateRef, std::vector<Edge>> graph;
        each_state([&](const StateRef& ref, const Flow&, const FlowState& st) {
            in[ref] = std::nullopt;
            graph[ref] = edges_of(ref, st);
        });

        // Leaving a resumable flow mid-way and coming back later: the slots
        // survive except for clears performed outside that flow.
        std::map<std::string, SlotSet> outside_clears;
        for (const auto& [fid, flow] : flows_.flows) {
            if (!flow.resumable) {
                continue;
            }
            auto& clears = outside_clears[fid];
            for (const auto& [ref, edges] : graph) {
                if (ref.flow == fid) {
                    continue;
                }
                for (const auto& e : edges) {
                    clears.insert(e.clears.begin(), e.clears.end());
                }
            }
        }

        std::deque<StateRef> todo;
        const auto meet = [&](const StateRef& to, SlotSet value) {
            auto& cur = in[to];
            if (!cur) {
                cur = std::move(value);
                todo.push_back(to);
                return;
            }
            SlotSet merged;
            std::set_intersection(cur->begin(), cur->end(), value.begin(), value.end(),
                                  std::inserter(merged, merged.begin()));
            if (merged != *cur) {
                cur = std::move(merged);
                todo.push_back(to);
            }
        };
        meet(flows_.start, {});
        while (!todo.empty()) {
            const auto ref = todo.front();
            todo.pop_front();
            const auto here = *in[ref];
            for (const auto& e : graph[ref]) {
                auto next = here;
                for (const auto& c : e.clears) {
                    next.erase(c);
                }
                next.insert(e.adds.begin(), e.adds.end());
                next.insert(e.assumes.begin(), e.assumes.end());
                meet(e.to, std::move(next));
            }
            const auto& flow = flows_.flows.at(ref.flow);
            const auto* st = flows_.find(ref);
            if (flow.resumable && !st->terminal && !st->is_router()) {
                auto resumed = here;
                for (const auto& c : outside_clears[ref.flow]) {
                    resumed.erase(c);
                }
                meet(ref, std::move(resumed));
            }
        }

        std::map<StateRef, SlotSet> out;
        for (auto& [ref, set] : in) {
            if (set) {
                out.emplace(ref, std::move(*set));
            }
        }
        return out;
    }

    void check_reachability(const std::map<StateRef, SlotSet>& bound) {
        bool terminal = false;
        each_state([&](const StateRef& ref, const Flow&, const FlowState& st) {
            if (bound.count(ref) == 0) {
                add(K::unreachable, ref.qualified(), "");
            } else if (st.terminal) {
                terminal = true;
            }
        });
        if (!terminal) {
            add(K::no_terminal, "", "no terminal state is reachable from " + flows_.start.qualified());
        }
    }

    void check_text(const std::string& scope, const std::string& text, const SlotSet& bound) {
        for (const auto& p : placeholders(text)) {
            switch (p.kind) {
            case PlaceholderRef::Kind::slot:
                if (bound.count(p.name) == 0) {
                    add(K::unbound_placeholder, scope, "slot:" + p.name);
                }
                break;
            case PlaceholderRef::Kind::profile:
                if (!is_profile_field(p.name)) {
                    add(K::unbound_placeholder, scope, "profile:" + p.name);
                }
                break;
            case PlaceholderRef::Kind::gender: break;
            case PlaceholderRef::Kind::invalid: add(K::bad_placeholder, scope, "{" + p.name + "}"); break;
            }
        }
    }

    void check_placeholders(const std::map<StateRef, SlotSet>& bound) {
        for (const auto& [ref, slots] : bound) {
            const auto* st = flows_.find(ref);
            if (st->is_router()) {
                continue;
            }
            const auto scope = ref.qualified();
            const auto& v = st->view;
            const auto text = [&](const std::string& s) { check_text(scope, s, slots); };
            for (const auto* field : {&v.header, &v.body, &v.html_frame}) {
                if (*field) {
                    text(**field);
                }
            }
            for (const auto& s : v.speak) {
                text(s);
            }
            for (const auto& box : v.slides) {
                text(box.summary);
                text(box.text);
            }
            for (const auto& tile : v.tiles) {
                text(tile.title);
                text(tile.value);
            }
            const auto& flow = flows_.flows.at(ref.flow);
            text(st->fallback ? *st->fallback : flow.fallback ? *flow.fallback : flows_.default_fallback);
            for (const auto& t : st->transitions) {
                text(t.label);
                for (const auto& [slot, value] : t.set) {
                    text(value);
                }
            }
        }
        for (const auto& [id, g] : flows_.globals) {
            check_text("", g.transition.label, {});
        }
    }

    void check_sequences() {
        for (const auto& [fid, flow] : flows_.flows) {
            const auto& seq = flow.sequence;
            for (std::size_t i = 0; i < seq.size(); ++i) {
                const StateRef ref{fid, seq[i]};
                const auto* st = flows_.find(ref);
                if (st == nullptr) {
                    add(K::therapy_shape, fid, "sequence names unknown state " + seq[i]);
                    continue;
                }
                for (const auto& e : edges_of(ref, *st)) {
                    if (e.to.flow != fid || e.to == ref) {
                        continue;
                    }
                    const auto pos = std::find(seq.begin(), seq.end(), e.to.state);
                    const bool next = pos != seq.end() && static_cast<std::size_t>(pos - seq.begin()) == i + 1;
                    const bool leaves = pos == seq.end() && i + 1 == seq.size();
                    if (!next && !leaves) {
                        add(K::therapy_shape, ref.qualified(), "skips ahead or back to " + e.to.state);
                    }
                }
            }
        }
    }

    const FlowSet& flows_;
    const ValidationContext& ctx_;
    intent::Registry registry_;
    std::vector<Diagnostic> out_;
};

} // namespace

std::vector<Diagnostic> validate_flow(const FlowSet& flows, const ValidationContext& ctx) {
    return Validator(flows, ctx).run();
}

} // namespace carebot::dialogue
