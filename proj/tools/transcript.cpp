#include "transcript.hpp"

#include <string>

namespace carebot::tools {

namespace {

struct Printer {
    std::ostream* out;

    void operator()(const std::monostate&) const {}
    void operator()(const response::SlidesData& d) const {
        for (const auto& box : d.boxes) {
            *out << "      [slide " << box.id << "] " << box.summary << "\n";
        }
    }
    void operator()(const response::ChecklistData& d) const {
        for (const auto& opt : d.options) {
            *out << "      [" << (opt.checked ? "x" : " ") << "] " << opt.label << " (" << opt.tag << ")\n";
        }
    }
    void operator()(const response::WheelData& d) const {
        *out << "      (emotion wheel, " << d.cells.size() << " cells)\n";
    }
    void operator()(const response::DashboardData& d) const {
        for (const auto& tile : d.tiles) {
            *out << "      [tile] " << tile.title << ": " << tile.value << "\n";
        }
    }
};

} // namespace

void print_payload(std::ostream& out, const response::ResponsePayload& p) {
    out << "bot>  <" << response::to_string(p.kind) << (p.notification ? ", notification" : "") << ">";
    if (p.header) {
        out << " " << *p.header;
    }
    out << "\n";
    if (p.body) {
        std::string body = *p.body;
        for (auto pos = body.find('\n'); pos != std::string::npos; pos = body.find('\n', pos + 7)) {
            body.replace(pos, 1, "\n      ");
        }
        out << "      " << body << "\n";
    }
    std::visit(Printer{&out}, p.data);
    if (!p.buttons.empty()) {
        out << "      buttons:";
        for (const auto& b : p.buttons) {
            out << " [" << b.label << " -> " << b.intent << "]";
        }
        out << "\n";
    }
    for (const auto& seg : p.speak) {
        out << "      says: " << seg.text << "\n";
    }
}

void print_event(std::ostream& out, const dialogue::UserEvent& event) {
    out << "user> ";
    if (const auto* u = std::get_if<dialogue::Utterance>(&event.payload)) {
        out << "\"" << u->text << "\"";
    } else if (const auto* b = std::get_if<dialogue::ButtonPress>(&event.payload)) {
        out << "(tap " << b->intent << ")";
    } else if (const auto* e = std::get_if<dialogue::EmotionSelected>(&event.payload)) {
        out << "(wheel " << emotion::to_string(e->ref.sector) << "/" << emotion::to_string(e->ref.intensity) << ")";
    } else if (const auto* c = std::get_if<dialogue::CheckboxSubmit>(&event.payload)) {
        out << "(checked";
        for (const auto& tag : c->tags) {
            out << " " << tag;
        }
        out << ")";
    }
    out << "\n";
}

} // namespace carebot::tools
