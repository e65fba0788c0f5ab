#include "carebot/content.hpp"

#include "carebot/error.hpp"
#include "embedded_data.hpp"
#include "yaml_support.hpp"

#include <json.hpp>

namespace carebot {

std::string_view to_string(Gender g) {
    switch (g) {
    case Gender::female:
        return "female";
    case Gender::male:
        return "male";
    case Gender::unspecified:
        break;
    }
    return "unspecified";
}

std::optional<Gender> gender_from_string(std::string_view s) {
    if (s == "female") {
        return Gender::female;
    }
    if (s == "male") {
        return Gender::male;
    }
    if (s == "unspecified") {
        return Gender::unspecified;
    }
    return std::nullopt;
}

} // namespace carebot

namespace carebot::content {

namespace {

constexpr std::array<std::string_view, 4> section_names = {"facts_and_myths", "rehabilitation",
                                                           "stress_in_isolation", "masks_tutorial"};
constexpr std::array<std::string_view, 3> kind_names = {"fact", "myth_correction", "tutorial_step"};

std::string render_document(const ContentSection& section) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& item : section.items) {
        items.push_back({{"id", item.id},
                         {"kind", to_string(item.kind)},
                         {"body", item.body_text},
                         {"speech", item.speech_text},
                         {"feedback", item.feedback_eligible()}});
    }
    nlohmann::json doc = {{"schema_version", 1},
                          {"section", to_string(section.id)},
                          {"title", section.title},
                          {"items", std::move(items)}};
    return doc.dump();
}

} // namespace

std::string_view to_string(SectionId id) {
    return section_names[static_cast<std::size_t>(id)];
}

std::optional<SectionId> section_from_string(std::string_view s) {
    for (std::size_t i = 0; i < section_names.size(); ++i) {
        if (section_names[i] == s) {
            return static_cast<SectionId>(i);
        }
    }
    return std::nullopt;
}

std::string_view to_string(ItemKind kind) {
    return kind_names[static_cast<std::size_t>(kind)];
}

std::optional<ItemKind> item_kind_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kind_names.size(); ++i) {
        if (kind_names[i] == s) {
            return static_cast<ItemKind>(i);
        }
    }
    return std::nullopt;
}

const Catalog& Catalog::standard() {
    static const Catalog catalog = parse(std::string(data::content_yaml), "<builtin content.yaml>");
    return catalog;
}

Catalog Catalog::load(const std::filesystem::path& path) {
    return from_doc(detail::YamlDoc::from_file(path));
}

Catalog Catalog::parse(const std::string& yaml, std::string source_name) {
    return from_doc(detail::YamlDoc::from_string(yaml, std::move(source_name)));
}

Catalog Catalog::from_doc(const detail::YamlDoc& doc) {
    Catalog catalog;
    const auto& root = doc.root();
    const auto sections = doc.require(root, "sections");
    doc.expect_map(sections, "sections");

    std::array<bool, 4> present{};
    std::set<std::string> item_ids;
    for (const auto& entry : sections) {
        const auto name = doc.str(entry.first);
        const auto id = section_from_string(name);
        if (!id) {
            doc.fail(entry.first, "unknown section '" + name + "'");
        }
        const auto idx = static_cast<std::size_t>(*id);
        if (present[idx]) {
            doc.fail(entry.first, "section '" + name + "' defined twice");
        }
        present[idx] = true;

        const auto& node = entry.second;
        doc.expect_map(node, "section");
        ContentSection section;
        section.id = *id;
        section.title = doc.require_str(node, "title");
        const auto items = doc.require(node, "items");
        doc.expect_seq(items, "items");
        if (items.size() == 0) {
            doc.fail(items, "section '" + name + "' has no items");
        }
        for (const auto& it : items) {
            doc.expect_map(it, "item");
            ContentItem item;
            item.id = doc.require_str(it, "id");
            if (!item_ids.insert(item.id).second) {
                doc.fail(it["id"], "duplicate item id '" + item.id + "'");
            }
            const auto kind_name = doc.require_str(it, "kind");
            const auto kind = item_kind_from_string(kind_name);
            if (!kind) {
                doc.fail(it["kind"], "unknown item kind '" + kind_name + "' (fact, myth_correction, tutorial_step)");
            }
            item.kind = *kind;
            item.body_text = doc.require_str(it, "body");
            item.speech_text = doc.optional_str(it, "speech", item.body_text);
            section.items.push_back(std::move(item));
        }
        catalog.sections_[idx] = std::move(section);
    }
    for (std::size_t i = 0; i < present.size(); ++i) {
        if (!present[i]) {
            doc.fail(sections, "missing section '" + std::string(section_names[i]) + "'");
        }
    }

    const auto values = doc.require(root, "values");
    doc.expect_seq(values, "values");
    std::set<std::string> tags;
    for (const auto& v : values) {
        doc.expect_map(v, "value");
        ValueTag tag;
        tag.tag = doc.require_str(v, "tag");
        if (normalized_key(tag.tag) != tag.tag) {
            doc.fail(v["tag"], "value tag '" + tag.tag + "' must be a single lower-case word");
        }
        if (!tags.insert(tag.tag).second) {
            doc.fail(v["tag"], "duplicate value tag '" + tag.tag + "'");
        }
        tag.label = doc.optional_str(v, "label", tag.tag);
        if (const auto phrases = v["phrases"]) {
            tag.phrases = doc.str_list(phrases);
        }
        catalog.values_.push_back(std::move(tag));
    }

    if (const auto dash = root["dashboard"]) {
        doc.expect_seq(dash, "dashboard");
        for (const auto& t : dash) {
            doc.expect_map(t, "dashboard tile");
            catalog.dashboard_.push_back(
                {doc.require_str(t, "id"), doc.require_str(t, "title"), doc.require_str(t, "value")});
        }
    }

    for (std::size_t i = 0; i < catalog.sections_.size(); ++i) {
        catalog.documents_[i] = render_document(catalog.sections_[i]);
    }
    return catalog;
}

const ContentSection& Catalog::get_section(SectionId id) const {
    return sections_[static_cast<std::size_t>(id)];
}

const ContentSection& Catalog::get_section(std::string_view id) const {
    const auto parsed = section_from_string(id);
    if (!parsed) {
        throw Error(ErrorCode::unknown_section, "unknown section '" + std::string(id) + "'", std::string(id));
    }
    return get_section(*parsed);
}

const std::string& Catalog::section_document(SectionId id) const {
    return documents_[static_cast<std::size_t>(id)];
}

const ContentItem* Catalog::find_item(std::string_view item_id) const {
    for (const auto& section : sections_) {
        for (const auto& item : section.items) {
            if (item.id == item_id) {
                return &item;
            }
        }
    }
    return nullptr;
}

const ContentItem& Catalog::item(std::string_view item_id) const {
    if (const auto* found = find_item(item_id)) {
        return *found;
    }
    throw Error(ErrorCode::unknown_item, "unknown content item '" + std::string(item_id) + "'", std::string(item_id));
}

const ValueTag* Catalog::find_value(std::string_view tag) const {
    for (const auto& v : values_) {
        if (v.tag == tag) {
            return &v;
        }
    }
    return nullptr;
}

void Catalog::check_values(const std::set<std::string>& tags) const {
    for (const auto& tag : tags) {
        if (find_value(tag) == nullptr) {
            throw Error(ErrorCode::unknown_value_tag, "unknown value tag '" + tag + "'", tag);
        }
    }
}

UserProfile submit_values(const UserProfile& profile, const std::set<std::string>& chosen, const Catalog& catalog) {
    catalog.check_values(chosen);
    UserProfile updated = profile;
    updated.values = chosen;
    return updated;
}

FeedbackLedger::FeedbackLedger(const Catalog& catalog) : catalog_(&catalog) {
    for (const auto id : all_sections) {
        for (const auto& item : catalog.get_section(id).items) {
            if (item.feedback_eligible()) {
                counters_.emplace(item.id, std::make_unique<Counter>());
            }
        }
    }
}

FeedbackTally FeedbackLedger::record(const FeedbackEvent& event, FeedbackJournal* journal) {
    const auto& item = catalog_->item(event.item_id);
    if (!item.feedback_eligible()) {
        throw Error(ErrorCode::not_eligible, "item '" + item.id + "' does not take feedback", item.id);
    }
    auto& counter = *counters_.find(event.item_id)->second;
    if (journal != nullptr) {
        journal->append_feedback(event);
    }
    if (event.helpful) {
        counter.helpful.fetch_add(1);
    } else {
        counter.not_helpful.fetch_add(1);
    }
    return tally(event.item_id);
}

FeedbackTally FeedbackLedger::tally(std::string_view item_id) const {
    const auto it = counters_.find(item_id);
    if (it == counters_.end()) {
        const auto& item = catalog_->item(item_id);
        throw Error(ErrorCode::not_eligible, "item '" + item.id + "' does not take feedback", item.id);
    }
    return FeedbackTally{it->first, it->second->helpful.load(), it->second->not_helpful.load()};
}

std::vector<FeedbackTally> FeedbackLedger::all() const {
    std::vector<FeedbackTally> out;
    for (const auto& [id, counter] : counters_) {
        out.push_back({id, counter->helpful.load(), counter->not_helpful.load()});
    }
    return out;
}

} // namespace carebot::content
