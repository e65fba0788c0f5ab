#pragma once

#include "carebot/profile.hpp"
#include "carebot/response.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace carebot::detail {
class YamlDoc;
}

namespace carebot::content {

enum class SectionId { facts_and_myths, rehabilitation, stress_in_isolation, masks_tutorial };

inline constexpr std::array<SectionId, 4> all_sections = {SectionId::facts_and_myths, SectionId::rehabilitation,
                                                          SectionId::stress_in_isolation, SectionId::masks_tutorial};

std::string_view to_string(SectionId id);
std::optional<SectionId> section_from_string(std::string_view s);

enum class ItemKind { fact, myth_correction, tutorial_step };

std::string_view to_string(ItemKind kind);
std::optional<ItemKind> item_kind_from_string(std::string_view s);

struct ContentItem {
    std::string id;
    std::string body_text;
    std::string speech_text;  // may be a summary of body_text
    ItemKind kind = ItemKind::fact;

    bool feedback_eligible() const { return kind == ItemKind::myth_correction; }
};

struct ContentSection {
    SectionId id = SectionId::facts_and_myths;
    std::string title;
    std::vector<ContentItem> items;
};

struct ValueTag {
    std::string tag;
    std::string label;
    std::vector<std::string> phrases;  // extra spoken forms besides tag and label
};

// Verified content, the value vocabulary and dashboard tiles. Immutable once
// loaded.
class Catalog {
public:
    static const Catalog& standard();
    static Catalog load(const std::filesystem::path& path);
    static Catalog parse(const std::string& yaml, std::string source_name = "<content>");

    const ContentSection& get_section(SectionId id) const;
    // Throws unknown_section.
    const ContentSection& get_section(std::string_view id) const;
    // Canonical JSON document for a section; identical bytes on every call.
    const std::string& section_document(SectionId id) const;

    const ContentItem* find_item(std::string_view item_id) const;
    // Throws unknown_item.
    const ContentItem& item(std::string_view item_id) const;

    const std::vector<ValueTag>& values() const { return values_; }
    const ValueTag* find_value(std::string_view tag) const;
    // Throws unknown_value_tag naming the first unknown tag.
    void check_values(const std::set<std::string>& tags) const;

    const std::vector<response::DashboardTile>& dashboard() const { return dashboard_; }

private:
    static Catalog from_doc(const detail::YamlDoc& doc);

    std::array<ContentSection, 4> sections_;
    std::array<std::string, 4> documents_;
    std::vector<ValueTag> values_;
    std::vector<response::DashboardTile> dashboard_;
};

// Replaces the profile's value set. Throws unknown_value_tag.
UserProfile submit_values(const UserProfile& profile, const std::set<std::string>& chosen, const Catalog& catalog);

struct FeedbackTally {
    std::string item_id;
    std::uint64_t helpful_count = 0;
    std::uint64_t not_helpful_count = 0;

    std::uint64_t total() const { return helpful_count + not_helpful_count; }
    friend bool operator==(const FeedbackTally&, const FeedbackTally&) = default;
};

struct FeedbackEvent {
    std::string item_id;
    bool helpful = false;
    std::string session_id;
    std::int64_t timestamp = 0;

    friend bool operator==(const FeedbackEvent&, const FeedbackEvent&) = default;
};

// Durable sink for feedback events; implemented by the session store.
class FeedbackJournal {
public:
    virtual ~FeedbackJournal() = default;
    virtual void append_feedback(const FeedbackEvent& event) = 0;
};

// Helpful / not-helpful counters for myth corrections. Counters are atomic
// per item, and an event is journaled before its counter moves, so totals
// always equal the number of persisted events.
class FeedbackLedger {
public:
    explicit FeedbackLedger(const Catalog& catalog);

    // Throws unknown_item or not_eligible; journal failures propagate and
    // leave the tally untouched.
    FeedbackTally record(const FeedbackEvent& event, FeedbackJournal* journal = nullptr);
    FeedbackTally record_feedback(std::string_view item_id, bool helpful, std::string_view session_id,
                                  FeedbackJournal* journal = nullptr) {
        return record(FeedbackEvent{std::string(item_id), helpful, std::string(session_id), 0}, journal);
    }

    FeedbackTally tally(std::string_view item_id) const;
    std::vector<FeedbackTally> all() const;

private:
    struct Counter {
        std::atomic<std::uint64_t> helpful{0};
        std::atomic<std::uint64_t> not_helpful{0};
    };

    const Catalog* catalog_;
    std::map<std::string, std::unique_ptr<Counter>, std::less<>> counters_;
};

} // namespace carebot::content
