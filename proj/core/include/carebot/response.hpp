#pragma once

#include "carebot/emotion.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace carebot::response {

enum class TemplateKind { slides, checkboxes, emotions, dashboard, standard };

inline constexpr TemplateKind all_template_kinds[] = {TemplateKind::slides, TemplateKind::checkboxes,
                                                      TemplateKind::emotions, TemplateKind::dashboard,
                                                      TemplateKind::standard};

// Wire names: "slides", "checkboxes", "emotions", "dashboard", "default".
std::string_view to_string(TemplateKind kind);
std::optional<TemplateKind> template_from_string(std::string_view name);

struct Button {
    std::string label;
    std::string intent;
    friend bool operator==(const Button&, const Button&) = default;
};

// One piece of text for the client to synthesize. `ssml` optionally carries
// markup the client may use instead of the plain text.
struct SpeechSegment {
    std::string text;
    std::optional<std::string> ssml;
    friend bool operator==(const SpeechSegment&, const SpeechSegment&) = default;
};

struct SlideBox {
    std::string id;
    std::string summary;  // short form, also the voiced text
    std::string text;     // full text
    friend bool operator==(const SlideBox&, const SlideBox&) = default;
};

struct CheckboxOption {
    std::string tag;
    std::string label;
    bool checked = false;
    friend bool operator==(const CheckboxOption&, const CheckboxOption&) = default;
};

struct WheelCell {
    emotion::EmotionRef ref;
    emotion::WheelPosition position;
    friend bool operator==(const WheelCell&, const WheelCell&) = default;
};

struct DashboardTile {
    std::string id;
    std::string title;
    std::string value;
    friend bool operator==(const DashboardTile&, const DashboardTile&) = default;
};

struct SlidesData {
    std::vector<SlideBox> boxes;
    friend bool operator==(const SlidesData&, const SlidesData&) = default;
};
struct ChecklistData {
    std::vector<CheckboxOption> options;
    friend bool operator==(const ChecklistData&, const ChecklistData&) = default;
};
struct WheelData {
    std::vector<WheelCell> cells;
    friend bool operator==(const WheelData&, const WheelData&) = default;
};
struct DashboardData {
    std::vector<DashboardTile> tiles;
    friend bool operator==(const DashboardData&, const DashboardData&) = default;
};

using TemplateData = std::variant<std::monostate, SlidesData, ChecklistData, WheelData, DashboardData>;

// One multimodal turn: what the screen shows and what the voice says.
struct ResponsePayload {
    TemplateKind kind = TemplateKind::standard;
    std::optional<std::string> header;
    std::optional<std::string> body;
    std::optional<std::string> html_frame;
    std::vector<Button> buttons;
    std::vector<SpeechSegment> speak;
    TemplateData data;
    bool notification = false;

    friend bool operator==(const ResponsePayload&, const ResponsePayload&) = default;
};

// Visible text pieces: header, body paragraphs (split on blank lines), slide
// summaries and texts, checkbox labels, tile titles and values.
std::vector<std::string> visible_segments(const ResponsePayload& payload);

// Default voice rendering for each template kind. Slides voice their box
// summaries while the screen shows the full text; every other kind voices
// header and body.
std::vector<SpeechSegment> default_speech(const ResponsePayload& payload);

// Checks every payload invariant; returns the name of the first broken rule.
// `available_intents` (when given) is the candidate intent set of the state.
std::optional<std::string> check(const ResponsePayload& payload,
                                 const std::set<std::string>* available_intents = nullptr);

// Authoring-side description of a state's response, already slot-rendered.
struct TemplateSpec {
    TemplateKind kind = TemplateKind::standard;
    std::optional<std::string> header;
    std::optional<std::string> body;
    std::optional<std::string> html_frame;
    std::vector<Button> buttons;
    // Explicit spoken subset; empty means the template's default voice.
    std::vector<SpeechSegment> speak;
    std::vector<SlideBox> slides;
    std::vector<CheckboxOption> checkboxes;
    std::vector<DashboardTile> tiles;
};

struct BuildContext {
    const emotion::EmotionWheel* wheel = nullptr;
    std::set<std::string> available_intents;
};

// Throws Error(invariant_violation) naming the failing rule.
ResponsePayload build_response(const TemplateSpec& spec, const BuildContext& ctx);

} // namespace carebot::response
