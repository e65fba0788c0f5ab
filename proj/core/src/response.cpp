#include "carebot/response.hpp"

#include "carebot/error.hpp"

#include <algorithm>
#include <array>

namespace carebot::response {

namespace {

constexpr std::array<std::string_view, 5> kind_names = {"slides", "checkboxes", "emotions", "dashboard", "default"};

std::vector<std::string> paragraphs(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto cut = text.find("\n\n", start);
        auto piece = text.substr(start, cut == std::string::npos ? std::string::npos : cut - start);
        const auto first = piece.find_first_not_of(" \t\n");
        if (first != std::string::npos) {
            const auto last = piece.find_last_not_of(" \t\n");
            out.push_back(piece.substr(first, last - first + 1));
        }
        if (cut == std::string::npos) {
            break;
        }
        start = cut + 2;
    }
    return out;
}

bool data_matches_kind(const ResponsePayload& p) {
    switch (p.kind) {
    case TemplateKind::slides:
        return std::holds_alternative<SlidesData>(p.data);
    case TemplateKind::checkboxes:
        return std::holds_alternative<ChecklistData>(p.data);
    case TemplateKind::emotions:
        return std::holds_alternative<WheelData>(p.data);
    case TemplateKind::dashboard:
        return std::holds_alternative<DashboardData>(p.data);
    case TemplateKind::standard:
        return std::holds_alternative<std::monostate>(p.data);
    }
    return false;
}

} // namespace

std::string_view to_string(TemplateKind kind) {
    return kind_names[static_cast<std::size_t>(kind)];
}

std::optional<TemplateKind> template_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kind_names.size(); ++i) {
        if (kind_names[i] == name) {
            return static_cast<TemplateKind>(i);
        }
    }
    return std::nullopt;
}

std::vector<std::string> visible_segments(const ResponsePayload& p) {
    std::vector<std::string> out;
    if (p.header && !p.header->empty()) {
        out.push_back(*p.header);
    }
    if (p.body) {
        for (auto& para : paragraphs(*p.body)) {
            out.push_back(std::move(para));
        }
    }
    if (const auto* slides = std::get_if<SlidesData>(&p.data)) {
        for (const auto& box : slides->boxes) {
            out.push_back(box.summary);
            out.push_back(box.text);
        }
    } else if (const auto* list = std::get_if<ChecklistData>(&p.data)) {
        for (const auto& opt : list->options) {
            out.push_back(opt.label);
        }
    } else if (const auto* dash = std::get_if<DashboardData>(&p.data)) {
        for (const auto& tile : dash->tiles) {
            out.push_back(tile.title);
            out.push_back(tile.value);
        }
    }
    return out;
}

std::vector<SpeechSegment> default_speech(const ResponsePayload& p) {
    std::vector<SpeechSegment> out;
    if (p.header && !p.header->empty()) {
        out.push_back({*p.header, std::nullopt});
    }
    if (p.kind == TemplateKind::slides) {
        if (const auto* slides = std::get_if<SlidesData>(&p.data)) {
            for (const auto& box : slides->boxes) {
                if (!box.summary.empty()) {
                    out.push_back({box.summary, std::nullopt});
                }
            }
        }
        return out;
    }
    if (p.body) {
        for (auto& para : paragraphs(*p.body)) {
            out.push_back({std::move(para), std::nullopt});
        }
    }
    return out;
}

std::optional<std::string> check(const ResponsePayload& p, const std::set<std::string>* available_intents) {
    if (!data_matches_kind(p)) {
        return "template-data: payload data does not match template '" + std::string(to_string(p.kind)) + "'";
    }
    if (const auto* wheel = std::get_if<WheelData>(&p.data)) {
        if (wheel->cells.size() != emotion::cell_count) {
            return "emotions-wheel: expected 24 cells, got " + std::to_string(wheel->cells.size());
        }
    }
    std::set<std::string> seen;
    for (const auto& b : p.buttons) {
        if (b.label.empty() || b.intent.empty()) {
            return "button-fields: buttons need a label and an intent";
        }
        if (!seen.insert(b.intent).second) {
            return "button-unique: intent '" + b.intent + "' bound to two buttons";
        }
        if (available_intents != nullptr && available_intents->count(b.intent) == 0) {
            return "button-intent: intent '" + b.intent + "' is not available in this state";
        }
    }
    const auto visible = visible_segments(p);
    for (const auto& seg : p.speak) {
        if (seg.text.empty()) {
            return "speak-subset: empty speech segment";
        }
        const bool shown = std::any_of(visible.begin(), visible.end(), [&](const std::string& v) {
            return v.find(seg.text) != std::string::npos;
        });
        if (!shown) {
            return "speak-subset: '" + seg.text + "' is not part of the visible text";
        }
    }
    return std::nullopt;
}

ResponsePayload build_response(const TemplateSpec& spec, const BuildContext& ctx) {
    ResponsePayload p;
    p.kind = spec.kind;
    p.header = spec.header;
    p.body = spec.body;
    p.html_frame = spec.html_frame;
    p.buttons = spec.buttons;

    switch (spec.kind) {
    case TemplateKind::slides:
        p.data = SlidesData{spec.slides};
        break;
    case TemplateKind::checkboxes:
        p.data = ChecklistData{spec.checkboxes};
        break;
    case TemplateKind::emotions: {
        if (ctx.wheel == nullptr) {
            throw Error(ErrorCode::invariant_violation, "emotions-wheel: no emotion wheel supplied", "emotions-wheel");
        }
        WheelData wheel;
        for (const auto& ref : ctx.wheel->all()) {
            wheel.cells.push_back({ref, ctx.wheel->layout(ref)});
        }
        p.data = std::move(wheel);
        break;
    }
    case TemplateKind::dashboard:
        p.data = DashboardData{spec.tiles};
        break;
    case TemplateKind::standard:
        break;
    }

    p.speak = spec.speak.empty() ? default_speech(p) : spec.speak;

    if (auto broken = check(p, &ctx.available_intents)) {
        const auto rule = broken->substr(0, broken->find(':'));
        throw Error(ErrorCode::invariant_violation, *broken, rule);
    }
    return p;
}

} // namespace carebot::response
