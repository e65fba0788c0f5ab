#include "carebot/dialogue.hpp"
#include "carebot/error.hpp"

namespace carebot::dialogue {

namespace {

// Splits "{g:a|b|c}" bodies on '|'.
std::vector<std::string> split_forms(std::string_view body) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto bar = body.find('|', start);
        out.emplace_back(body.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start));
        if (bar == std::string_view::npos) {
            break;
        }
        start = bar + 1;
    }
    return out;
}

PlaceholderRef classify(std::string_view inner) {
    const auto colon = inner.find(':');
    if (colon == std::string_view::npos) {
        return {PlaceholderRef::Kind::invalid, std::string(inner)};
    }
    const auto kind = inner.substr(0, colon);
    const auto name = std::string(inner.substr(colon + 1));
    if (kind == "slot" && !name.empty()) {
        return {PlaceholderRef::Kind::slot, name};
    }
    if (kind == "profile" && !name.empty()) {
        return {PlaceholderRef::Kind::profile, name};
    }
    if (kind == "g") {
        return {split_forms(name).size() == 3 ? PlaceholderRef::Kind::gender : PlaceholderRef::Kind::invalid,
                std::string(inner)};
    }
    return {PlaceholderRef::Kind::invalid, std::string(inner)};
}

// Walks the template; calls on_text for literal runs and on_placeholder for
// each {...}. Unterminated braces are reported as invalid placeholders.
template <typename Text, typename Placeholder>
void scan(std::string_view text, Text&& on_text, Placeholder&& on_placeholder) {
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '{' && i + 1 < text.size() && text[i + 1] == '{') {
            on_text(std::string_view("{"));
            i += 2;
        } else if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
            on_text(std::string_view("}"));
            i += 2;
        } else if (c == '{') {
            const auto close = text.find('}', i + 1);
            if (close == std::string_view::npos) {
                on_placeholder(PlaceholderRef{PlaceholderRef::Kind::invalid, std::string(text.substr(i))}, "");
                return;
            }
            const auto inner = text.substr(i + 1, close - i - 1);
            on_placeholder(classify(inner), inner);
            i = close + 1;
        } else {
            const auto next = text.find_first_of("{}", i + 1);
            const auto end = next == std::string_view::npos ? text.size() : next;
            on_text(text.substr(i, end - i));
            i = end;
        }
    }
}

std::string profile_field(const UserProfile& profile, const std::string& field) {
    if (field == "name") {
        return profile.name;
    }
    if (field == "user_id") {
        return profile.user_id;
    }
    if (field == "gender") {
        return std::string(to_string(profile.gender));
    }
    if (field == "values") {
        std::string out;
        for (const auto& v : profile.values) {
            out += out.empty() ? v : ", " + v;
        }
        return out;
    }
    throw Error(ErrorCode::unbound_placeholder, "unknown profile field '" + field + "'", "profile:" + field);
}

} // namespace

std::string slot_text(const SlotValue& value) {
    if (const auto* text = std::get_if<std::string>(&value)) {
        return *text;
    }
    if (const auto* ref = std::get_if<emotion::EmotionRef>(&value)) {
        return ref->canonical_label;
    }
    std::string out;
    for (const auto& tag : std::get<std::vector<std::string>>(value)) {
        out += out.empty() ? tag : ", " + tag;
    }
    return out;
}

bool is_profile_field(std::string_view field) {
    return field == "name" || field == "user_id" || field == "gender" || field == "values";
}

std::vector<PlaceholderRef> placeholders(std::string_view text) {
    std::vector<PlaceholderRef> out;
    scan(text, [](std::string_view) {}, [&](PlaceholderRef ref, std::string_view) { out.push_back(std::move(ref)); });
    return out;
}

std::string render_slots(std::string_view text, const UserProfile& profile, const Slots& slots) {
    std::string out;
    out.reserve(text.size());
    scan(
        text, [&](std::string_view literal) { out += literal; },
        [&](const PlaceholderRef& ref, std::string_view inner) {
            switch (ref.kind) {
            case PlaceholderRef::Kind::slot: {
                const auto it = slots.find(ref.name);
                if (it == slots.end()) {
                    throw Error(ErrorCode::unbound_placeholder, "slot '" + ref.name + "' is not bound",
                                "slot:" + ref.name);
                }
                out += slot_text(it->second);
                break;
            }
            case PlaceholderRef::Kind::profile:
                out += profile_field(profile, ref.name);
                break;
            case PlaceholderRef::Kind::gender: {
                const auto forms = split_forms(inner.substr(2));
                const std::size_t pick = profile.gender == Gender::female ? 0 : profile.gender == Gender::male ? 1 : 2;
                out += forms[pick];
                break;
            }
            case PlaceholderRef::Kind::invalid:
                throw Error(ErrorCode::unbound_placeholder, "malformed placeholder '{" + ref.name + "}'", ref.name);
            }
        });
    return out;
}

} // namespace carebot::dialogue
