#include "carebot/emotion.hpp"

#include "carebot/error.hpp"
#include "embedded_data.hpp"
#include "yaml_support.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace carebot::emotion {

namespace {

constexpr std::array<std::string_view, sector_count> sector_names = {
    "joy", "trust", "fear", "surprise", "sadness", "disgust", "anger", "anticipation"};
constexpr std::array<std::string_view, ring_count> intensity_names = {"low", "medium", "high"};

std::size_t cell_index(Sector s, Intensity i) {
    return static_cast<std::size_t>(s) * ring_count + static_cast<std::size_t>(i);
}

} // namespace

std::string_view to_string(Sector s) {
    return sector_names[static_cast<std::size_t>(s)];
}

std::string_view to_string(Intensity i) {
    return intensity_names[static_cast<std::size_t>(i)];
}

std::optional<Sector> sector_from_string(std::string_view s) {
    for (std::size_t k = 0; k < sector_names.size(); ++k) {
        if (sector_names[k] == s) {
            return static_cast<Sector>(k);
        }
    }
    return std::nullopt;
}

std::optional<Intensity> intensity_from_string(std::string_view s) {
    for (std::size_t k = 0; k < intensity_names.size(); ++k) {
        if (intensity_names[k] == s) {
            return static_cast<Intensity>(k);
        }
    }
    return std::nullopt;
}

std::string_view to_string(Source s) {
    return s == Source::touch ? "touch" : "voice";
}

std::optional<Source> source_from_string(std::string_view s) {
    if (s == "touch") {
        return Source::touch;
    }
    if (s == "voice") {
        return Source::voice;
    }
    return std::nullopt;
}

std::size_t ring_index(Intensity i) {
    switch (i) {
    case Intensity::high:
        return 0;
    case Intensity::medium:
        return 1;
    case Intensity::low:
        return 2;
    }
    return 1;
}

Intensity intensity_for_ring(std::size_t ring) {
    switch (ring) {
    case 0:
        return Intensity::high;
    case 1:
        return Intensity::medium;
    default:
        return Intensity::low;
    }
}

EmotionWheel::EmotionWheel(std::array<Sector, sector_count> order, std::vector<Cell> cells,
                           std::vector<Synonym> synonyms)
    : order_(order) {
    std::set<Sector> seen_sectors(order.begin(), order.end());
    if (seen_sectors.size() != sector_count) {
        throw Error(ErrorCode::load_error, "sector_order must list each of the 8 sectors exactly once");
    }
    if (cells.size() != cell_count) {
        throw Error(ErrorCode::load_error,
                    "taxonomy must define exactly 24 cells, found " + std::to_string(cells.size()));
    }
    std::array<bool, cell_count> filled{};
    for (auto& cell : cells) {
        const auto idx = cell_index(cell.sector, cell.intensity);
        if (filled[idx]) {
            throw Error(ErrorCode::load_error,
                        "duplicate cell (" + std::string(to_string(cell.sector)) + ", " +
                            std::string(to_string(cell.intensity)) + ")");
        }
        const std::string key = normalized_key(cell.label);
        if (key.empty()) {
            throw Error(ErrorCode::load_error, "empty canonical label");
        }
        if (phrases_.count(key) != 0) {
            throw Error(ErrorCode::load_error, "canonical label '" + cell.label + "' used twice", cell.label);
        }
        filled[idx] = true;
        labels_[idx] = cell.label;
        phrases_.emplace(key, EmotionRef{cell.sector, cell.intensity, cell.label});
    }
    for (const auto& syn : synonyms) {
        const std::string key = normalized_key(syn.phrase);
        if (key.empty()) {
            throw Error(ErrorCode::load_error, "empty synonym phrase");
        }
        const auto target = phrases_.find(normalized_key(syn.label));
        if (target == phrases_.end() || target->second.canonical_label != syn.label) {
            throw Error(ErrorCode::load_error,
                        "synonym '" + syn.phrase + "' targets unknown label '" + syn.label + "'", syn.label);
        }
        const EmotionRef ref = target->second;
        const auto [it, inserted] = phrases_.emplace(key, ref);
        if (!inserted && !it->second.same_cell(ref)) {
            throw Error(ErrorCode::load_error, "synonym '" + syn.phrase + "' maps to two different cells",
                        syn.phrase);
        }
    }
    for (const auto& [key, ref] : phrases_) {
        longest_phrase_ = std::max(longest_phrase_, normalize(key).size());
    }
}

const EmotionWheel& EmotionWheel::standard() {
    static const EmotionWheel wheel = parse(std::string(data::emotions_yaml), "<builtin emotions.yaml>");
    return wheel;
}

EmotionWheel EmotionWheel::load(const std::filesystem::path& path) {
    return from_doc(detail::YamlDoc::from_file(path));
}

EmotionWheel EmotionWheel::parse(const std::string& yaml, std::string source_name) {
    return from_doc(detail::YamlDoc::from_string(yaml, std::move(source_name)));
}

EmotionWheel EmotionWheel::from_doc(const detail::YamlDoc& doc) {
    const auto& root = doc.root();

    const auto order_node = doc.require(root, "sector_order");
    doc.expect_seq(order_node, "sector_order");
    if (order_node.size() != sector_count) {
        doc.fail(order_node, "sector_order must list exactly 8 sectors");
    }
    std::array<Sector, sector_count> order{};
    std::set<Sector> seen;
    for (std::size_t k = 0; k < sector_count; ++k) {
        const auto name = doc.str(order_node[k]);
        const auto sector = sector_from_string(name);
        if (!sector) {
            doc.fail(order_node[k], "unknown sector '" + name + "'");
        }
        if (!seen.insert(*sector).second) {
            doc.fail(order_node[k], "sector '" + name + "' listed twice");
        }
        order[k] = *sector;
    }

    const auto cells_node = doc.require(root, "cells");
    doc.expect_seq(cells_node, "cells");
    std::vector<Cell> cells;
    std::set<std::pair<Sector, Intensity>> seen_cells;
    std::set<std::string> seen_labels;
    for (const auto& node : cells_node) {
        doc.expect_map(node, "cell");
        const auto sector_name = doc.require_str(node, "sector");
        const auto intensity_name = doc.require_str(node, "intensity");
        const auto sector = sector_from_string(sector_name);
        if (!sector) {
            doc.fail(node["sector"], "unknown sector '" + sector_name + "'");
        }
        const auto intensity = intensity_from_string(intensity_name);
        if (!intensity) {
            doc.fail(node["intensity"], "unknown intensity '" + intensity_name + "' (low, medium, high)");
        }
        if (!seen_cells.emplace(*sector, *intensity).second) {
            doc.fail(node, "duplicate cell (" + sector_name + ", " + intensity_name + ")");
        }
        auto label = doc.require_str(node, "label");
        if (normalized_key(label).empty() || !seen_labels.insert(normalized_key(label)).second) {
            doc.fail(node["label"], "label '" + label + "' is empty or already used");
        }
        cells.push_back({*sector, *intensity, std::move(label)});
    }
    if (cells.size() != cell_count) {
        doc.fail(cells_node, "expected 24 cells, found " + std::to_string(cells.size()));
    }

    std::vector<Synonym> synonyms;
    if (const auto syn_node = root["synonyms"]) {
        doc.expect_map(syn_node, "synonyms");
        std::map<std::string, std::string> seen_phrases;
        for (const auto& entry : syn_node) {
            const auto phrase = doc.str(entry.first);
            const auto label = doc.str(entry.second);
            if (seen_labels.count(normalized_key(label)) == 0) {
                doc.fail(entry.second, "synonym '" + phrase + "' targets unknown label '" + label + "'");
            }
            const auto key = normalized_key(phrase);
            if (key.empty()) {
                doc.fail(entry.first, "synonym phrase normalizes to nothing");
            }
            const auto [it, inserted] = seen_phrases.emplace(key, normalized_key(label));
            if (!inserted && it->second != normalized_key(label)) {
                doc.fail(entry.first, "synonym '" + phrase + "' maps to two different cells");
            }
            // Store the canonical spelling of the label.
            for (const auto& c : cells) {
                if (normalized_key(c.label) == normalized_key(label)) {
                    synonyms.push_back({phrase, c.label});
                    break;
                }
            }
        }
    }

    try {
        return EmotionWheel(order, std::move(cells), std::move(synonyms));
    } catch (const Error& e) {
        doc.fail_root(e.what());
    }
}

EmotionRef EmotionWheel::ref(Sector s, Intensity i) const {
    return EmotionRef{s, i, labels_[cell_index(s, i)]};
}

std::vector<EmotionRef> EmotionWheel::all() const {
    std::vector<EmotionRef> out;
    out.reserve(cell_count);
    for (const auto s : order_) {
        for (std::size_t ring = 0; ring < ring_count; ++ring) {
            out.push_back(ref(s, intensity_for_ring(ring)));
        }
    }
    return out;
}

std::optional<EmotionRef> EmotionWheel::find(std::string_view label) const {
    const auto it = phrases_.find(normalized_key(label));
    if (it == phrases_.end()) {
        return std::nullopt;
    }
    return it->second;
}

EmotionRef EmotionWheel::lookup(std::string_view label) const {
    if (auto ref = find(label)) {
        return *ref;
    }
    throw Error(ErrorCode::not_found, "no emotion named '" + std::string(label) + "'", std::string(label));
}

std::vector<EmotionRef> EmotionWheel::parse_utterance(std::string_view text) const {
    const Tokens tokens = normalize(text);
    std::vector<EmotionRef> found;
    std::size_t pos = 0;
    while (pos < tokens.size()) {
        std::size_t consumed = 0;
        const std::size_t max_len = std::min(longest_phrase_, tokens.size() - pos);
        for (std::size_t len = max_len; len >= 1; --len) {
            Tokens window(tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                          tokens.begin() + static_cast<std::ptrdiff_t>(pos + len));
            const auto it = phrases_.find(join(window));
            if (it != phrases_.end()) {
                const bool dup = std::any_of(found.begin(), found.end(),
                                             [&](const EmotionRef& r) { return r.same_cell(it->second); });
                if (!dup) {
                    found.push_back(it->second);
                }
                consumed = len;
                break;
            }
        }
        pos += consumed == 0 ? 1 : consumed;
    }
    return found;
}

WheelPosition EmotionWheel::layout(const EmotionRef& r) const {
    const auto it = std::find(order_.begin(), order_.end(), r.sector);
    const auto idx = static_cast<std::size_t>(it - order_.begin());
    return WheelPosition{idx, ring_index(r.intensity), sector_width_deg * static_cast<double>(idx),
                         sector_width_deg * static_cast<double>(idx + 1)};
}

EmotionRef EmotionWheel::hit_test(double angle_deg, std::size_t ring) const {
    double a = std::fmod(angle_deg, 360.0);
    if (a < 0) {
        a += 360.0;
    }
    auto idx = static_cast<std::size_t>(std::floor(a / sector_width_deg));
    idx = std::min(idx, sector_count - 1);
    return ref(order_[idx], intensity_for_ring(std::min(ring, ring_count - 1)));
}

} // namespace carebot::emotion
