#include "carebot/wire.hpp"

#include "carebot/error.hpp"
#include "wire_json.hpp"

namespace carebot::detail {

namespace {

using namespace carebot::response;

json cell_json(const WheelCell& c) {
    return {{"sector", emotion::to_string(c.ref.sector)},
            {"intensity", emotion::to_string(c.ref.intensity)},
            {"label", c.ref.canonical_label},
            {"sector_index", c.position.sector_index},
            {"ring_index", c.position.ring_index},
            {"start_deg", c.position.start_deg},
            {"end_deg", c.position.end_deg}};
}

json data_json(const TemplateData& data) {
    json out = json::object();
    if (const auto* s = std::get_if<SlidesData>(&data)) {
        json boxes = json::array();
        for (const auto& b : s->boxes) {
            boxes.push_back({{"id", b.id}, {"summary", b.summary}, {"text", b.text}});
        }
        out["boxes"] = std::move(boxes);
    } else if (const auto* c = std::get_if<ChecklistData>(&data)) {
        json options = json::array();
        for (const auto& o : c->options) {
            options.push_back({{"tag", o.tag}, {"label", o.label}, {"checked", o.checked}});
        }
        out["options"] = std::move(options);
    } else if (const auto* w = std::get_if<WheelData>(&data)) {
        json cells = json::array();
        for (const auto& cell : w->cells) {
            cells.push_back(cell_json(cell));
        }
        out["cells"] = std::move(cells);
    } else if (const auto* d = std::get_if<DashboardData>(&data)) {
        json tiles = json::array();
        for (const auto& t : d->tiles) {
            tiles.push_back({{"id", t.id}, {"title", t.title}, {"value", t.value}});
        }
        out["tiles"] = std::move(tiles);
    }
    return out;
}

} // namespace

json emotion_to_json(const emotion::EmotionRef& ref) {
    return {{"sector", emotion::to_string(ref.sector)},
            {"intensity", emotion::to_string(ref.intensity)},
            {"label", ref.canonical_label}};
}

json payload_to_json(const ResponsePayload& p) {
    json out = {{"schema_version", wire::schema_version},
                {"template", to_string(p.kind)},
                {"notification", p.notification}};
    if (p.header) {
        out["header"] = *p.header;
    }
    if (p.body) {
        out["body"] = *p.body;
    }
    if (p.html_frame) {
        out["html_frame"] = *p.html_frame;
    }
    json buttons = json::array();
    for (const auto& b : p.buttons) {
        buttons.push_back({{"intent", b.intent}, {"label", b.label}});
    }
    out["buttons"] = std::move(buttons);
    json speak = json::array();
    for (const auto& s : p.speak) {
        json seg = {{"text", s.text}};
        if (s.ssml) {
            seg["ssml"] = *s.ssml;
        }
        speak.push_back(std::move(seg));
    }
    out["speak"] = std::move(speak);
    if (!std::holds_alternative<std::monostate>(p.data)) {
        out["data"] = data_json(p.data);
    }
    return out;
}

json event_to_json(const dialogue::UserEvent& event) {
    using namespace carebot::dialogue;
    json out = {{"kind", to_string(event.kind())}, {"timestamp", event.timestamp}};
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, Utterance>) {
                out["text"] = e.text;
            } else if constexpr (std::is_same_v<T, ButtonPress>) {
                out["button"] = e.intent;
            } else if constexpr (std::is_same_v<T, EmotionSelected>) {
                out["sector"] = emotion::to_string(e.ref.sector);
                out["intensity"] = emotion::to_string(e.ref.intensity);
            } else {
                out["tags"] = e.tags;
            }
        },
        event.payload);
    return out;
}

json profile_to_json(const UserProfile& p) {
    json history = json::array();
    for (const auto& r : p.emotion_history) {
        auto rec = emotion_to_json(r.ref);
        rec["recorded_at"] = r.recorded_at;
        rec["source"] = emotion::to_string(r.source);
        rec["session_id"] = r.session_id;
        history.push_back(std::move(rec));
    }
    return {{"user_id", p.user_id},
            {"name", p.name},
            {"gender", to_string(p.gender)},
            {"values", p.values},
            {"emotion_history", std::move(history)}};
}

json slots_to_json(const dialogue::Slots& slots) {
    json out = json::object();
    for (const auto& [name, value] : slots) {
        if (const auto* text = std::get_if<std::string>(&value)) {
            out[name] = *text;
        } else if (const auto* ref = std::get_if<emotion::EmotionRef>(&value)) {
            out[name] = {{"emotion", emotion_to_json(*ref)}};
        } else {
            out[name] = std::get<std::vector<std::string>>(value);
        }
    }
    return out;
}

json parse_json(std::string_view document) {
    try {
        return json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::decode_error, "invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what(),
                    std::to_string(e.byte));
    }
}

std::string dump(const json& value) {
    try {
        return value.dump();
    } catch (const json::type_error& e) {
        throw Error(ErrorCode::invariant_violation, std::string("cannot serialize: ") + e.what());
    }
}

} // namespace carebot::detail

namespace carebot::wire {

namespace {

using detail::json;
using namespace carebot::response;

// Typed, pointer-tracking access to a decoded document. Every failure
// raises `code` naming the JSON pointer of the offending value.
class Reader {
public:
    Reader(const json& value, std::string pointer, ErrorCode code)
        : value_(value), pointer_(std::move(pointer)), code_(code) {}

    [[noreturn]] void fail(const std::string& message) const {
        const auto where = pointer_.empty() ? std::string("/") : pointer_;
        throw Error(code_, where + ": " + message, where);
    }

    const json& value() const { return value_; }
    const std::string& pointer() const { return pointer_; }

    Reader object(std::initializer_list<std::string_view> allowed) const {
        if (!value_.is_object()) {
            fail("expected an object");
        }
        for (const auto& [key, _] : value_.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                Reader(value_[key], pointer_ + "/" + key, code_).fail("unexpected field");
            }
        }
        return *this;
    }

    bool has(const char* key) const { return value_.contains(key); }

    Reader at(const char* key) const {
        if (!value_.contains(key)) {
            fail(std::string("missing field '") + key + "'");
        }
        return Reader(value_.at(key), pointer_ + "/" + key, code_);
    }

    std::vector<Reader> array() const {
        if (!value_.is_array()) {
            fail("expected an array");
        }
        std::vector<Reader> out;
        for (std::size_t i = 0; i < value_.size(); ++i) {
            out.emplace_back(value_[i], pointer_ + "/" + std::to_string(i), code_);
        }
        return out;
    }

    std::string str() const {
        if (!value_.is_string()) {
            fail("expected a string");
        }
        return value_.get<std::string>();
    }

    bool boolean() const {
        if (!value_.is_boolean()) {
            fail("expected true or false");
        }
        return value_.get<bool>();
    }

    std::int64_t integer() const {
        if (!value_.is_number_integer()) {
            fail("expected an integer");
        }
        return value_.get<std::int64_t>();
    }

    std::size_t index() const {
        if (!value_.is_number_unsigned()) {
            fail("expected a non-negative integer");
        }
        return value_.get<std::size_t>();
    }

    double number() const {
        if (!value_.is_number()) {
            fail("expected a number");
        }
        return value_.get<double>();
    }

    std::vector<std::string> strings() const {
        std::vector<std::string> out;
        for (const auto& r : array()) {
            out.push_back(r.str());
        }
        return out;
    }

private:
    const json& value_;
    std::string pointer_;
    ErrorCode code_;
};

emotion::Sector sector_of(const Reader& r) {
    const auto s = emotion::sector_from_string(r.str());
    if (!s) {
        r.fail("unknown sector");
    }
    return *s;
}

emotion::Intensity intensity_of(const Reader& r) {
    const auto i = emotion::intensity_from_string(r.str());
    if (!i) {
        r.fail("unknown intensity");
    }
    return *i;
}

emotion::EmotionRef emotion_of(const Reader& r, const emotion::EmotionWheel& wheel) {
    const auto ref = wheel.ref(sector_of(r.at("sector")), intensity_of(r.at("intensity")));
    if (r.has("label") && r.at("label").str() != ref.canonical_label) {
        r.at("label").fail("label does not match the cell");
    }
    return ref;
}

TemplateData data_of(TemplateKind kind, const Reader* data) {
    if (kind == TemplateKind::standard) {
        if (data != nullptr) {
            data->fail("the default template carries no data");
        }
        return std::monostate{};
    }
    if (data == nullptr) {
        return std::monostate{};
    }
    switch (kind) {
    case TemplateKind::slides: {
        SlidesData out;
        for (const auto& b : data->object({"boxes"}).at("boxes").array()) {
            b.object({"id", "summary", "text"});
            out.boxes.push_back({b.at("id").str(), b.at("summary").str(), b.at("text").str()});
        }
        return out;
    }
    case TemplateKind::checkboxes: {
        ChecklistData out;
        for (const auto& o : data->object({"options"}).at("options").array()) {
            o.object({"tag", "label", "checked"});
            out.options.push_back({o.at("tag").str(), o.at("label").str(), o.at("checked").boolean()});
        }
        return out;
    }
    case TemplateKind::emotions: {
        WheelData out;
        for (const auto& c : data->object({"cells"}).at("cells").array()) {
            c.object({"sector", "intensity", "label", "sector_index", "ring_index", "start_deg", "end_deg"});
            WheelCell cell;
            cell.ref = {sector_of(c.at("sector")), intensity_of(c.at("intensity")), c.at("label").str()};
            cell.position = {c.at("sector_index").index(), c.at("ring_index").index(), c.at("start_deg").number(),
                             c.at("end_deg").number()};
            out.cells.push_back(std::move(cell));
        }
        return out;
    }
    case TemplateKind::dashboard: {
        DashboardData out;
        for (const auto& t : data->object({"tiles"}).at("tiles").array()) {
            t.object({"id", "title", "value"});
            out.tiles.push_back({t.at("id").str(), t.at("title").str(), t.at("value").str()});
        }
        return out;
    }
    case TemplateKind::standard: break;
    }
    return std::monostate{};
}

ResponsePayload payload_of(const Reader& root) {
    root.object({"schema_version", "template", "header", "body", "html_frame", "buttons", "speak", "data",
                 "notification"});
    const auto version = root.at("schema_version");
    if (version.integer() != schema_version) {
        version.fail("unsupported schema_version " + std::to_string(version.integer()));
    }
    ResponsePayload p;
    const auto tmpl = root.at("template");
    const auto kind = template_from_string(tmpl.str());
    if (!kind) {
        tmpl.fail("unknown template");
    }
    p.kind = *kind;
    if (root.has("header")) {
        p.header = root.at("header").str();
    }
    if (root.has("body")) {
        p.body = root.at("body").str();
    }
    if (root.has("html_frame")) {
        p.html_frame = root.at("html_frame").str();
    }
    for (const auto& b : root.at("buttons").array()) {
        b.object({"intent", "label"});
        p.buttons.push_back({b.at("label").str(), b.at("intent").str()});
    }
    for (const auto& s : root.at("speak").array()) {
        s.object({"text", "ssml"});
        SpeechSegment seg{s.at("text").str(), std::nullopt};
        if (s.has("ssml")) {
            seg.ssml = s.at("ssml").str();
        }
        p.speak.push_back(std::move(seg));
    }
    if (root.has("data")) {
        const auto data = root.at("data");
        p.data = data_of(p.kind, &data);
    } else {
        p.data = data_of(p.kind, nullptr);
    }
    p.notification = root.at("notification").boolean();
    if (const auto broken = check(p)) {
        root.fail("invalid payload: " + *broken);
    }
    return p;
}

dialogue::UserEvent event_of(const Reader& root, const emotion::EmotionWheel& wheel) {
    using namespace carebot::dialogue;
    if (!root.value().is_object()) {
        root.fail("expected an object");
    }
    const auto kind_name = root.at("kind");
    const auto kind = event_kind_from_string(kind_name.str());
    if (!kind) {
        kind_name.fail("unknown event kind");
    }
    UserEvent event;
    switch (*kind) {
    case EventKind::utterance:
        root.object({"kind", "timestamp", "text"});
        event.payload = Utterance{root.at("text").str()};
        if (!is_valid_utf8(std::get<Utterance>(event.payload).text)) {
            root.at("text").fail("text is not valid UTF-8");
        }
        break;
    case EventKind::button:
        root.object({"kind", "timestamp", "button"});
        event.payload = ButtonPress{root.at("button").str()};
        break;
    case EventKind::emotion_selected:
        root.object({"kind", "timestamp", "sector", "intensity", "label"});
        event.payload = EmotionSelected{emotion_of(root, wheel)};
        break;
    case EventKind::checkbox_submit:
        root.object({"kind", "timestamp", "tags"});
        event.payload = CheckboxSubmit{root.at("tags").strings()};
        break;
    }
    if (root.has("timestamp")) {
        event.timestamp = root.at("timestamp").integer();
    }
    return event;
}

UserProfile profile_of(const Reader& root, const emotion::EmotionWheel& wheel) {
    root.object({"user_id", "name", "gender", "values", "emotion_history"});
    UserProfile p;
    p.user_id = root.at("user_id").str();
    p.name = root.at("name").str();
    const auto g = gender_from_string(root.at("gender").str());
    if (!g) {
        root.at("gender").fail("unknown gender");
    }
    p.gender = *g;
    for (auto& v : root.at("values").strings()) {
        p.values.insert(std::move(v));
    }
    for (const auto& r : root.at("emotion_history").array()) {
        r.object({"sector", "intensity", "label", "recorded_at", "source", "session_id"});
        emotion::EmotionRecord rec;
        rec.ref = emotion_of(r, wheel);
        rec.recorded_at = r.at("recorded_at").integer();
        const auto src = emotion::source_from_string(r.at("source").str());
        if (!src) {
            r.at("source").fail("unknown source");
        }
        rec.source = *src;
        rec.session_id = r.at("session_id").str();
        p.emotion_history.push_back(std::move(rec));
    }
    return p;
}

json parse_or_decode_error(std::string_view document) { return detail::parse_json(document); }

} // namespace

std::string serialize(const ResponsePayload& payload) {
    if (const auto broken = check(payload)) {
        throw Error(ErrorCode::invariant_violation, "cannot serialize: " + *broken,
                    broken->substr(0, broken->find(':')));
    }
    return detail::dump(detail::payload_to_json(payload));
}

ResponsePayload deserialize(std::string_view document) {
    const auto root = parse_or_decode_error(document);
    return payload_of(Reader(root, "", ErrorCode::decode_error));
}

dialogue::UserEvent decode_event(std::string_view document, const emotion::EmotionWheel& wheel) {
    const auto root = parse_or_decode_error(document);
    return event_of(Reader(root, "", ErrorCode::malformed_event), wheel);
}

std::string encode_event(const dialogue::UserEvent& event) { return detail::dump(detail::event_to_json(event)); }

std::string encode_profile(const UserProfile& profile) { return detail::dump(detail::profile_to_json(profile)); }

UserProfile decode_profile(std::string_view document, const emotion::EmotionWheel& wheel) {
    const auto root = parse_or_decode_error(document);
    return profile_of(Reader(root, "", ErrorCode::decode_error), wheel);
}

std::string encode_log_entry(const dialogue::LogEntry& entry) {
    const detail::json doc = {{"event", detail::event_to_json(entry.event)},
                              {"response", detail::payload_to_json(entry.response)},
                              {"state", entry.state.qualified()},
                              {"outcome", dialogue::to_string(entry.outcome)}};
    return detail::dump(doc);
}

dialogue::LogEntry decode_log_entry(std::string_view document, const emotion::EmotionWheel& wheel) {
    const auto root_json = parse_or_decode_error(document);
    const Reader root(root_json, "", ErrorCode::decode_error);
    root.object({"event", "response", "state", "outcome"});
    dialogue::LogEntry entry;
    const auto ev = root.at("event");
    entry.event = event_of(Reader(ev.value(), ev.pointer(), ErrorCode::decode_error), wheel);
    entry.response = payload_of(root.at("response"));
    const auto state = dialogue::StateRef::parse(root.at("state").str());
    if (!state) {
        root.at("state").fail("expected flow:state");
    }
    entry.state = *state;
    const auto outcome = dialogue::outcome_from_string(root.at("outcome").str());
    if (!outcome) {
        root.at("outcome").fail("unknown outcome");
    }
    entry.outcome = *outcome;
    return entry;
}

std::string encode_slots(const dialogue::Slots& slots) { return detail::dump(detail::slots_to_json(slots)); }

} // namespace carebot::wire
