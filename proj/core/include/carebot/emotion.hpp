#pragma once

#include "carebot/text.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace carebot::detail {
class YamlDoc;
}

namespace carebot::emotion {

enum class Sector { joy, trust, fear, surprise, sadness, disgust, anger, anticipation };
enum class Intensity { low, medium, high };

inline constexpr std::size_t sector_count = 8;
inline constexpr std::size_t ring_count = 3;
inline constexpr std::size_t cell_count = sector_count * ring_count;
inline constexpr double sector_width_deg = 360.0 / sector_count;

std::string_view to_string(Sector s);
std::string_view to_string(Intensity i);
std::optional<Sector> sector_from_string(std::string_view s);
std::optional<Intensity> intensity_from_string(std::string_view s);

struct EmotionRef {
    Sector sector = Sector::joy;
    Intensity intensity = Intensity::medium;
    std::string canonical_label;

    // Two refs denote the same cell regardless of label spelling.
    bool same_cell(const EmotionRef& other) const {
        return sector == other.sector && intensity == other.intensity;
    }
    friend bool operator==(const EmotionRef&, const EmotionRef&) = default;
};

struct WheelPosition {
    std::size_t sector_index = 0;
    std::size_t ring_index = 0;
    double start_deg = 0.0;  // inclusive
    double end_deg = 0.0;    // exclusive

    double midpoint_deg() const { return (start_deg + end_deg) / 2.0; }
    friend bool operator==(const WheelPosition&, const WheelPosition&) = default;
};

enum class Source { touch, voice };

std::string_view to_string(Source s);
std::optional<Source> source_from_string(std::string_view s);

struct EmotionRecord {
    EmotionRef ref;
    std::int64_t recorded_at = 0;  // ms since epoch, taken from the triggering event
    Source source = Source::touch;
    std::string session_id;

    friend bool operator==(const EmotionRecord&, const EmotionRecord&) = default;
};

// Ring convention: high intensity is the innermost ring (index 0), low the
// outermost (index 2).
std::size_t ring_index(Intensity i);
Intensity intensity_for_ring(std::size_t ring);

// Immutable Plutchik taxonomy: sector order, 24 labelled cells and a synonym
// table from normalized phrases to cells.
class EmotionWheel {
public:
    struct Cell {
        Sector sector;
        Intensity intensity;
        std::string label;
    };
    struct Synonym {
        std::string phrase;
        std::string label;  // canonical label of the target cell
    };

    // Validates every invariant; throws Error(load_error) naming the problem.
    EmotionWheel(std::array<Sector, sector_count> order, std::vector<Cell> cells,
                 std::vector<Synonym> synonyms);

    // The English taxonomy shipped as the default fixture.
    static const EmotionWheel& standard();
    static EmotionWheel load(const std::filesystem::path& path);
    static EmotionWheel parse(const std::string& yaml, std::string source_name = "<taxonomy>");

    const std::array<Sector, sector_count>& sector_order() const { return order_; }

    // The cell for (sector, intensity).
    EmotionRef ref(Sector s, Intensity i) const;

    // All 24 cells, in sector order then ring order.
    std::vector<EmotionRef> all() const;

    // Exact lookup of a canonical label or synonym; throws not_found.
    EmotionRef lookup(std::string_view label) const;
    std::optional<EmotionRef> find(std::string_view label) const;

    // Longest-match-first, left-to-right scan; duplicates dropped keeping the
    // first occurrence.
    std::vector<EmotionRef> parse_utterance(std::string_view text) const;

    WheelPosition layout(const EmotionRef& ref) const;
    EmotionRef hit_test(double angle_deg, std::size_t ring) const;

    const std::map<std::string, EmotionRef>& phrase_table() const { return phrases_; }
    std::size_t longest_phrase() const { return longest_phrase_; }

private:
    static EmotionWheel from_doc(const detail::YamlDoc& doc);

    std::array<Sector, sector_count> order_;
    std::array<std::string, cell_count> labels_;  // indexed by sector * 3 + intensity
    std::map<std::string, EmotionRef> phrases_;   // normalized phrase -> cell
    std::size_t longest_phrase_ = 1;
};

inline EmotionRef lookup_emotion(std::string_view label, const EmotionWheel& wheel = EmotionWheel::standard()) {
    return wheel.lookup(label);
}

inline std::vector<EmotionRef> parse_emotion_utterance(std::string_view text,
                                                       const EmotionWheel& wheel = EmotionWheel::standard()) {
    return wheel.parse_utterance(text);
}

inline WheelPosition wheel_layout(const EmotionRef& ref, const EmotionWheel& wheel) {
    return wheel.layout(ref);
}

inline EmotionRef hit_test(double angle_deg, std::size_t ring, const EmotionWheel& wheel) {
    return wheel.hit_test(angle_deg, ring);
}

} // namespace carebot::emotion
