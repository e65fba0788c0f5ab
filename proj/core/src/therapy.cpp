#include "carebot/therapy.hpp"

#include "carebot/error.hpp"
#include "embedded_data.hpp"
#include "yaml_support.hpp"

#include <algorithm>

namespace carebot::therapy {

namespace {

using dialogue::CaptureMode;
using dialogue::FlowState;
using dialogue::StateRef;
using dialogue::Target;
using dialogue::Transition;
using detail::YamlDoc;

constexpr std::array<std::string_view, 6> process_names = {"acceptance",      "cognitive_defusion",
                                                           "being_present",   "self_as_context",
                                                           "values",          "committed_action"};
constexpr std::array<std::string_view, 4> action_names = {"verbal_confirmation", "free_text_capture", "value_pick",
                                                          "none"};

PhraseSet phrase_set(const YamlDoc& doc, const YAML::Node& node, const char* key, PhraseSet fallback) {
    const auto n = node[key];
    if (!n) {
        return fallback;
    }
    doc.expect_map(n, key);
    return {doc.optional_str(n, "label", fallback.label), doc.str_list(doc.require(n, "phrases"))};
}

StateRef state_ref(const YamlDoc& doc, const YAML::Node& node, const char* key, StateRef fallback) {
    const auto n = node[key];
    if (!n) {
        return fallback;
    }
    const auto ref = StateRef::parse(doc.str(n));
    if (!ref) {
        doc.fail(n, std::string(key) + " must be a qualified flow:state id");
    }
    return *ref;
}

TherapyStep parse_step(const YamlDoc& doc, const YAML::Node& node) {
    doc.expect_map(node, "therapy step");
    TherapyStep step;
    step.id = doc.require_str(node, "id");
    for (const auto& name : doc.str_list(doc.require(node, "processes"))) {
        const auto p = process_from_string(name);
        if (!p) {
            doc.fail(node["processes"], "unknown process '" + name + "'");
        }
        step.processes.push_back(*p);
    }
    step.header = doc.optional_str(node, "header");
    step.text = doc.require_str(node, "text");
    if (const auto speak = node["speak"]) {
        step.speak = doc.str_list(speak);
    }
    const auto action = doc.optional_str(node, "action", "verbal_confirmation");
    const auto kind = action_from_string(action);
    if (!kind) {
        doc.fail(node["action"], "unknown action '" + action +
                                     "' (verbal_confirmation, free_text_capture, value_pick, none)");
    }
    step.action = *kind;
    step.slot = doc.optional_str(node, "slot");
    if (step.action == ActionKind::free_text_capture && step.slot.empty()) {
        doc.fail(node, "free_text_capture steps need a slot");
    }
    if (const auto s = node["suggestions"]) {
        step.suggestions = doc.str_list(s);
    }
    if (node["fallback"]) {
        step.fallback = doc.str(node["fallback"]);
    }
    return step;
}

TherapyScript parse_section(const YamlDoc& doc, const YAML::Node& node) {
    doc.expect_map(node, "therapy");
    TherapyScript s;
    s.flow_id = doc.optional_str(node, "flow", s.flow_id);
    s.emotion_state = state_ref(doc, node, "emotion_state", s.emotion_state);
    s.exit = state_ref(doc, node, "exit", s.exit);
    s.confirm = phrase_set(doc, node, "confirm", {"I understand", {"i understand", "understood", "ok", "okay"}});
    s.next = phrase_set(doc, node, "next", {"Continue", {"next", "continue"}});
    s.restart = phrase_set(doc, node, "restart", {"Start again", {"start again", "restart", "yes"}});
    s.decline = phrase_set(doc, node, "decline", {"Not now", {"not now", "no"}});
    const auto steps = doc.require(node, "steps");
    doc.expect_seq(steps, "steps");
    for (const auto& step : steps) {
        s.steps.push_back(parse_step(doc, step));
    }
    const auto complete = doc.require(node, "complete");
    s.complete_header = doc.optional_str(complete, "header");
    s.complete_text = doc.require_str(complete, "text");
    const auto restart = doc.require(node, "restart_offer");
    s.restart_header = doc.optional_str(restart, "header");
    s.restart_text = doc.require_str(restart, "text");
    s.value_fallback = doc.optional_str(node, "value_fallback", "Please choose one of your values.");
    s.confirm_fallback =
        doc.optional_str(node, "confirm_fallback", "When you are ready, say \"" + s.confirm.label + "\".");
    try {
        check_script(s);
    } catch (const Error& e) {
        doc.fail(node, e.what());
    }
    return s;
}

std::string step_state_id(const TherapyScript& script, std::size_t i) {
    return i < script.steps.size() ? script.steps[i].id : "complete";
}

} // namespace

std::string_view to_string(Process p) { return process_names[static_cast<std::size_t>(p)]; }

std::optional<Process> process_from_string(std::string_view s) {
    for (const auto p : all_processes) {
        if (to_string(p) == s) {
            return p;
        }
    }
    return std::nullopt;
}

std::string_view to_string(ActionKind a) { return action_names[static_cast<std::size_t>(a)]; }

std::optional<ActionKind> action_from_string(std::string_view s) {
    for (std::size_t i = 0; i < action_names.size(); ++i) {
        if (action_names[i] == s) {
            return static_cast<ActionKind>(i);
        }
    }
    return std::nullopt;
}

void check_script(const TherapyScript& script) {
    if (script.steps.size() != step_count) {
        throw Error(ErrorCode::load_error, "therapy script must have exactly " + std::to_string(step_count) +
                                               " steps, found " + std::to_string(script.steps.size()));
    }
    std::set<Process> covered;
    std::set<std::string> ids;
    for (const auto& step : script.steps) {
        covered.insert(step.processes.begin(), step.processes.end());
        if (!ids.insert(step.id).second || step.id == "start" || step.id == "complete" ||
            step.id == "restart_offer") {
            throw Error(ErrorCode::load_error, "therapy step id '" + step.id + "' is duplicated or reserved",
                        step.id);
        }
        if (step.action == ActionKind::free_text_capture && step.slot.empty()) {
            throw Error(ErrorCode::load_error, "therapy step '" + step.id + "' captures text without a slot",
                        step.id);
        }
    }
    for (const auto p : all_processes) {
        if (covered.count(p) == 0) {
            throw Error(ErrorCode::load_error,
                        "therapy script does not cover the " + std::string(to_string(p)) + " process",
                        std::string(to_string(p)));
        }
    }
}

std::optional<TherapyScript> parse_script(const YamlDoc& doc) {
    const auto node = doc.root()["therapy"];
    if (!node) {
        return std::nullopt;
    }
    return parse_section(doc, node);
}

TherapyScript parse_script(const std::string& yaml, std::string source_name) {
    const auto doc = YamlDoc::from_string(yaml, std::move(source_name));
    auto script = parse_script(doc);
    if (!script) {
        doc.fail_root("missing 'therapy' section");
    }
    return std::move(*script);
}

namespace {

CommittedActions actions_from(const YamlDoc& doc) {
    const auto node = doc.require(doc.root(), "committed_actions");
    doc.expect_map(node, "committed_actions");
    std::map<std::string, std::string> table;
    for (const auto& kv : node) {
        table[doc.str(kv.first)] = doc.str(kv.second);
    }
    return CommittedActions(std::move(table));
}

} // namespace

const CommittedActions& CommittedActions::standard() {
    static const CommittedActions actions = parse(std::string(data::committed_actions_yaml),
                                                  "<builtin committed_actions.yaml>");
    return actions;
}

CommittedActions CommittedActions::load(const std::filesystem::path& path) {
    return actions_from(YamlDoc::from_file(path));
}

CommittedActions CommittedActions::parse(const std::string& yaml, std::string source_name) {
    return actions_from(YamlDoc::from_string(yaml, std::move(source_name)));
}

const std::string& CommittedActions::for_value(std::string_view tag) const {
    const auto it = table_.find(std::string(tag));
    if (it == table_.end()) {
        throw Error(ErrorCode::unknown_value_tag, "no committed action for value '" + std::string(tag) + "'",
                    std::string(tag));
    }
    return it->second;
}

void compile(const TherapyScript& script, const content::Catalog& catalog, const CommittedActions& actions,
             dialogue::FlowSet& flows) {
    check_script(script);
    const auto& fid = script.flow_id;
    if (flows.flows.count(fid) != 0) {
        throw Error(ErrorCode::load_error, "flow '" + fid + "' is already defined; the therapy section owns it", fid);
    }
    for (const auto& value : catalog.values()) {
        actions.for_value(value.tag);
    }

    dialogue::Flow flow;
    flow.id = fid;
    flow.entry = "start";
    flow.resumable = true;

    const auto scope = [&](const std::string& state) { return fid + ":" + state; };
    const auto local = [&](const std::string& state, const std::string& id, const PhraseSet& set) {
        flows.intents.push_back(intent::make_intent(id, set.phrases, scope(state), set.label));
    };
    const auto to = [&](const std::string& state) { return Target::to_state({fid, state}); };

    FlowState router;
    router.id = "start";
    router.routes.push_back({{dialogue::SlotCondition::Kind::missing, std::string(declared_emotion_slot), {}},
                             Target::to_state(script.emotion_state)});
    router.routes.push_back(
        {{dialogue::SlotCondition::Kind::equals, std::string(completed_slot), "yes"}, to("restart_offer")});
    router.routes.push_back({{}, to(step_state_id(script, 0))});
    flow.states.emplace(router.id, std::move(router));

    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        const auto& step = script.steps[i];
        const auto next = step_state_id(script, i + 1);
        const bool last = i + 1 == script.steps.size();
        FlowState st;
        st.id = step.id;
        st.view.header = step.header;
        st.view.body = step.text;
        st.view.speak = step.speak;
        st.fallback = step.fallback;

        Transition advance_edge;
        advance_edge.target = to(next);
        if (last) {
            advance_edge.set[std::string(completed_slot)] = "yes";
        }

        switch (step.action) {
        case ActionKind::verbal_confirmation:
            local(step.id, "confirm", script.confirm);
            advance_edge.intent = "confirm";
            advance_edge.label = script.confirm.label;
            st.transitions.push_back(advance_edge);
            if (!st.fallback) {
                st.fallback = script.confirm_fallback;
            }
            break;
        case ActionKind::none:
            local(step.id, "next", script.next);
            advance_edge.intent = "next";
            advance_edge.label = script.next.label;
            st.transitions.push_back(advance_edge);
            st.capture = {CaptureMode::free_text, {}, advance_edge.target, {}};
            break;
        case ActionKind::free_text_capture:
            for (std::size_t k = 0; k < step.suggestions.size(); ++k) {
                const auto id = "suggestion_" + std::to_string(k + 1);
                local(step.id, id, {step.suggestions[k], {step.suggestions[k]}});
                auto t = advance_edge;
                t.intent = id;
                t.label = step.suggestions[k];
                t.set[step.slot] = step.suggestions[k];
                st.transitions.push_back(std::move(t));
            }
            st.capture = {CaptureMode::free_text, step.slot, advance_edge.target, {}};
            break;
        case ActionKind::value_pick:
            for (const auto& value : catalog.values()) {
                std::vector<std::string> phrases = value.phrases;
                phrases.push_back(value.tag);
                phrases.push_back(value.label);
                std::sort(phrases.begin(), phrases.end());
                phrases.erase(std::unique(phrases.begin(), phrases.end(),
                                          [](const std::string& a, const std::string& b) {
                                              return normalized_key(a) == normalized_key(b);
                                          }),
                              phrases.end());
                flows.intents.push_back(intent::make_intent(value.tag, phrases, scope(step.id), value.label));
                auto t = advance_edge;
                t.intent = value.tag;
                t.set[std::string(chosen_value_slot)] = value.tag;
                t.set[std::string(committed_action_slot)] = actions.for_value(value.tag);
                st.transitions.push_back(std::move(t));
            }
            st.view.buttons = std::vector<std::string>{};
            st.view.value_buttons = true;
            if (!st.fallback) {
                st.fallback = script.value_fallback;
            }
            break;
        }
        flow.sequence.push_back(step.id);
        flow.states.emplace(step.id, std::move(st));
    }

    FlowState complete;
    complete.id = "complete";
    complete.terminal = true;
    complete.view.header = script.complete_header;
    complete.view.body = script.complete_text;
    flow.states.emplace(complete.id, std::move(complete));

    FlowState offer;
    offer.id = "restart_offer";
    offer.view.header = script.restart_header;
    offer.view.body = script.restart_text;
    local(offer.id, "restart", script.restart);
    local(offer.id, "decline", script.decline);
    Transition restart{"restart", to(step_state_id(script, 0)), script.restart.label, {}, {}, std::nullopt};
    restart.clear = {std::string(chosen_value_slot), std::string(committed_action_slot), std::string(completed_slot)};
    for (const auto& step : script.steps) {
        if (!step.slot.empty()) {
            restart.clear.push_back(step.slot);
        }
    }
    offer.transitions.push_back(std::move(restart));
    offer.transitions.push_back({"decline", Target::to_state(script.exit), script.decline.label, {}, {}, std::nullopt});
    flow.states.emplace(offer.id, std::move(offer));

    flows.flows.emplace(fid, std::move(flow));
}

TherapyState therapy_state(const dialogue::Session& session, const TherapyScript& script) {
    TherapyState out;
    const auto& slots = session.slots;
    if (const auto it = slots.find(std::string(declared_emotion_slot)); it != slots.end()) {
        if (const auto* ref = std::get_if<emotion::EmotionRef>(&it->second)) {
            out.declared_emotion = *ref;
        }
    }
    const auto thought_step = std::find_if(script.steps.begin(), script.steps.end(), [](const TherapyStep& s) {
        return s.action == ActionKind::free_text_capture;
    });
    if (thought_step != script.steps.end()) {
        if (const auto it = slots.find(thought_step->slot); it != slots.end()) {
            out.threatening_thought = dialogue::slot_text(it->second);
        }
    }
    if (const auto it = slots.find(std::string(chosen_value_slot)); it != slots.end()) {
        out.chosen_value = dialogue::slot_text(it->second);
    }
    if (const auto it = slots.find(std::string(completed_slot)); it != slots.end()) {
        out.completed = dialogue::slot_text(it->second) == "yes";
    }
    out.active = session.current.flow == script.flow_id;
    if (out.active) {
        const auto& state = session.current.state;
        const auto pos = std::find_if(script.steps.begin(), script.steps.end(),
                                      [&](const TherapyStep& s) { return s.id == state; });
        out.step_index = pos != script.steps.end() ? static_cast<std::size_t>(pos - script.steps.begin())
                         : state == "complete"     ? script.steps.size()
                                                   : 0;
    } else if (const auto r = session.resume.find(script.flow_id); r != session.resume.end()) {
        const auto pos = std::find_if(script.steps.begin(), script.steps.end(),
                                      [&](const TherapyStep& s) { return s.id == r->second; });
        out.step_index = pos != script.steps.end() ? static_cast<std::size_t>(pos - script.steps.begin()) : 0;
    } else if (out.completed) {
        out.step_index = script.steps.size();
    }
    return out;
}

dialogue::Turn start_therapy(const dialogue::Engine& engine, const dialogue::Session& session,
                             std::int64_t timestamp) {
    return engine.advance(session, {dialogue::ButtonPress{std::string(open_intent)}, timestamp});
}

} // namespace carebot::therapy
