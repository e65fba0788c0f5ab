#include "carebot/dialogue.hpp"
#include "carebot/error.hpp"

#include "flow_document.hpp"
#include "yaml_support.hpp"

namespace carebot::dialogue {

namespace {

using detail::YamlDoc;

bool as_bool(const YamlDoc& doc, const YAML::Node& node) {
    const auto text = doc.str(node);
    if (text == "true" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "no") {
        return false;
    }
    doc.fail(node, "expected true or false");
}

Target parse_target(const YamlDoc& doc, const YAML::Node& node, const std::string& current_flow) {
    const auto text = doc.str(node);
    if (text == ".") {
        return Target::self();
    }
    if (!text.empty() && text.front() == '@') {
        if (text.size() == 1) {
            doc.fail(node, "'@' must be followed by a flow id");
        }
        return Target::enter(text.substr(1));
    }
    if (auto ref = StateRef::parse(text)) {
        return Target::to_state(*ref);
    }
    if (text.empty() || text.find(':') != std::string::npos) {
        doc.fail(node, "malformed target '" + text + "'");
    }
    if (current_flow.empty()) {
        doc.fail(node, "target '" + text + "' must be qualified as flow:state here");
    }
    return Target::to_state({current_flow, text});
}

std::vector<std::string> phrases_of(const YamlDoc& doc, const YAML::Node& node, std::string& label) {
    if (node.IsSequence() || node.IsScalar()) {
        return doc.str_list(node);
    }
    doc.expect_map(node, "intent");
    label = doc.optional_str(node, "label");
    return doc.str_list(doc.require(node, "phrases"));
}

Transition parse_transition(const YamlDoc& doc, const YAML::Node& node, const std::string& flow) {
    doc.expect_map(node, "transition");
    Transition t;
    t.intent = doc.require_str(node, "intent");
    t.target = parse_target(doc, doc.require(node, "to"), flow);
    t.label = doc.optional_str(node, "label");
    if (const auto set = node["set"]) {
        doc.expect_map(set, "set");
        for (const auto& kv : set) {
            t.set[doc.str(kv.first)] = doc.str(kv.second);
        }
    }
    if (const auto clear = node["clear"]) {
        t.clear = doc.str_list(clear);
    }
    if (const auto fb = node["feedback"]) {
        doc.expect_map(fb, "feedback");
        t.feedback = FeedbackDirective{doc.require_str(fb, "item"), as_bool(doc, doc.require(fb, "helpful"))};
    }
    return t;
}

SlotCondition parse_condition(const YamlDoc& doc, const YAML::Node& node) {
    SlotCondition c;
    if (const auto has = node["has"]) {
        c.kind = SlotCondition::Kind::has;
        c.slot = doc.str(has);
    } else if (const auto missing = node["missing"]) {
        c.kind = SlotCondition::Kind::missing;
        c.slot = doc.str(missing);
    } else if (const auto eq = node["equals"]) {
        doc.expect_map(eq, "equals");
        if (eq.size() != 1) {
            doc.fail(eq, "equals takes exactly one slot: value pair");
        }
        c.kind = SlotCondition::Kind::equals;
        c.slot = doc.str(eq.begin()->first);
        c.value = doc.str(eq.begin()->second);
    }
    return c;
}

FlowState parse_state(const YamlDoc& doc, const std::string& flow, const std::string& id, const YAML::Node& node,
                      std::vector<intent::IntentDef>& intents) {
    doc.expect_map(node, "state");
    FlowState st;
    st.id = id;
    const std::string scope = flow + ":" + id;

    if (const auto route = node["route"]) {
        doc.expect_seq(route, "route");
        for (const auto& r : route) {
            doc.expect_map(r, "route entry");
            st.routes.push_back({parse_condition(doc, r), parse_target(doc, doc.require(r, "to"), flow)});
        }
        return st;
    }

    auto& v = st.view;
    const auto kind_name = doc.optional_str(node, "template", "default");
    const auto kind = response::template_from_string(kind_name);
    if (!kind) {
        doc.fail(node["template"], "unknown template '" + kind_name +
                                       "' (slides, checkboxes, emotions, dashboard, default)");
    }
    v.kind = *kind;
    if (node["header"]) {
        v.header = doc.str(node["header"]);
    }
    if (node["body"]) {
        v.body = doc.str(node["body"]);
    }
    if (node["html_frame"]) {
        v.html_frame = doc.str(node["html_frame"]);
    }
    if (const auto speak = node["speak"]) {
        v.speak = doc.str_list(speak);
    }
    if (const auto buttons = node["buttons"]) {
        v.buttons = buttons.IsSequence() && buttons.size() == 0 ? std::vector<std::string>{} : doc.str_list(buttons);
    }
    if (const auto vb = node["value_buttons"]) {
        v.value_buttons = as_bool(doc, vb);
    }
    if (const auto gb = node["global_buttons"]) {
        v.global_buttons = as_bool(doc, gb);
    }
    if (const auto slides = node["slides"]) {
        if (slides.IsMap()) {
            v.slides_section = doc.require_str(slides, "section");
            if (const auto items = slides["items"]) {
                v.slides_items = doc.str_list(items);
            }
        } else {
            doc.expect_seq(slides, "slides");
            for (const auto& box : slides) {
                doc.expect_map(box, "slide");
                v.slides.push_back({doc.optional_str(box, "id"), doc.require_str(box, "summary"),
                                    doc.require_str(box, "text")});
            }
        }
    }
    if (const auto tiles = node["tiles"]) {
        doc.expect_seq(tiles, "tiles");
        for (const auto& t : tiles) {
            doc.expect_map(t, "tile");
            v.tiles.push_back({doc.require_str(t, "id"), doc.require_str(t, "title"), doc.require_str(t, "value")});
        }
    }

    std::map<std::string, std::string> local_labels;
    if (const auto local = node["intents"]) {
        doc.expect_map(local, "intents");
        for (const auto& kv : local) {
            std::string label;
            auto phrases = phrases_of(doc, kv.second, label);
            local_labels[doc.str(kv.first)] = label;
            intents.push_back(intent::make_intent(doc.str(kv.first), phrases, scope, label));
        }
    }
    if (const auto on = node["on"]) {
        doc.expect_seq(on, "on");
        for (const auto& t : on) {
            auto transition = parse_transition(doc, t, flow);
            // An edge without its own caption shows the local intent's label.
            if (transition.label.empty()) {
                const auto it = local_labels.find(transition.intent);
                if (it != local_labels.end()) {
                    transition.label = it->second;
                }
            }
            st.transitions.push_back(std::move(transition));
        }
    }
    if (const auto cap = node["capture"]) {
        doc.expect_map(cap, "capture");
        const auto mode = doc.require_str(cap, "mode");
        if (mode == "free_text") {
            st.capture.mode = CaptureMode::free_text;
        } else if (mode == "emotion") {
            st.capture.mode = CaptureMode::emotion;
        } else if (mode == "checkbox") {
            st.capture.mode = CaptureMode::checkbox;
        } else {
            doc.fail(cap["mode"], "unknown capture mode '" + mode + "' (free_text, emotion, checkbox)");
        }
        st.capture.slot = doc.optional_str(cap, "slot");
        if (st.capture.slot.empty() && st.capture.mode != CaptureMode::free_text) {
            doc.fail(cap, "capture mode '" + mode + "' needs a slot");
        }
        st.capture.target = parse_target(doc, doc.require(cap, "to"), flow);
        if (const auto none = cap["empty_phrases"]) {
            st.capture.empty_phrases = doc.str_list(none);
        }
    }
    if (node["fallback"]) {
        st.fallback = doc.str(node["fallback"]);
    }
    if (const auto term = node["terminal"]) {
        st.terminal = as_bool(doc, term);
    }
    return st;
}

} // namespace

} // namespace carebot::dialogue

namespace carebot::detail {

void parse_flow_document(const YamlDoc& doc, dialogue::FlowSet& out) {
    using namespace carebot::dialogue;
    const auto& root = doc.root();
    const auto start_node = doc.require(root, "start");
    const auto start = StateRef::parse(doc.str(start_node));
    if (!start) {
        doc.fail(start_node, "start must be a qualified flow:state id");
    }
    out.start = *start;
    out.default_fallback = doc.optional_str(root, "fallback", "Sorry, I did not understand. Please try again.");

    if (const auto globals = root["intents"]) {
        doc.expect_map(globals, "intents");
        for (const auto& kv : globals) {
            const auto id = doc.str(kv.first);
            const auto& node = kv.second;
            doc.expect_map(node, "global intent");
            std::string label = doc.optional_str(node, "label");
            auto phrases = doc.str_list(doc.require(node, "phrases"));
            out.intents.push_back(intent::make_intent(id, phrases, {}, label));
            GlobalIntent g;
            g.transition.intent = id;
            g.transition.label = label;
            g.transition.target = parse_target(doc, doc.require(node, "target"), {});
            if (const auto s = node["suggest"]) {
                g.suggest = as_bool(doc, s);
            }
            if (out.globals.count(id) != 0) {
                doc.fail(kv.first, "global intent '" + id + "' defined twice");
            }
            out.globals.emplace(id, std::move(g));
            out.global_order.push_back(id);
        }
    }

    const auto flows = doc.require(root, "flows");
    doc.expect_map(flows, "flows");
    for (const auto& fkv : flows) {
        Flow flow;
        flow.id = doc.str(fkv.first);
        const auto& node = fkv.second;
        doc.expect_map(node, "flow");
        flow.entry = doc.require_str(node, "entry");
        if (const auto r = node["resumable"]) {
            flow.resumable = as_bool(doc, r);
        }
        if (node["fallback"]) {
            flow.fallback = doc.str(node["fallback"]);
        }
        if (const auto seq = node["sequence"]) {
            flow.sequence = doc.str_list(seq);
        }
        const auto states = doc.require(node, "states");
        doc.expect_map(states, "states");
        for (const auto& skv : states) {
            const auto sid = doc.str(skv.first);
            if (sid.find(':') != std::string::npos || sid.empty()) {
                doc.fail(skv.first, "state id '" + sid + "' must be non-empty and contain no ':'");
            }
            if (flow.states.count(sid) != 0) {
                doc.fail(skv.first, "state '" + sid + "' defined twice");
            }
            flow.states.emplace(sid, parse_state(doc, flow.id, sid, skv.second, out.intents));
        }
        if (out.flows.count(flow.id) != 0) {
            doc.fail(fkv.first, "flow '" + flow.id + "' defined twice");
        }
        out.flows.emplace(flow.id, std::move(flow));
    }
}

} // namespace carebot::detail

namespace carebot::dialogue {

FlowSet parse_flows(const std::string& yaml, std::string source_name) {
    FlowSet out;
    detail::parse_flow_document(detail::YamlDoc::from_string(yaml, std::move(source_name)), out);
    return out;
}

FlowSet load_flows(const std::filesystem::path& path) {
    FlowSet out;
    detail::parse_flow_document(detail::YamlDoc::from_file(path), out);
    return out;
}

} // namespace carebot::dialogue
