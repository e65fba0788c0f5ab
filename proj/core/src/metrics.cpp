#include "carebot/metrics.hpp"

#include "carebot/error.hpp"
#include "embedded_data.hpp"
#include "yaml_support.hpp"

#include <algorithm>
#include <set>

namespace carebot::metrics {

namespace {

using detail::YamlDoc;

int int_of(const YamlDoc& doc, const YAML::Node& node) {
    const auto text = doc.str(node);
    try {
        std::size_t used = 0;
        const int value = std::stoi(text, &used);
        if (used == text.size()) {
            return value;
        }
    } catch (const std::exception&) {
    }
    doc.fail(node, "expected an integer, got '" + text + "'");
}

ItemTable table_from(const YamlDoc& doc, const char* key) {
    const auto node = doc.require(doc.root(), key);
    doc.expect_map(node, key);
    ItemTable t;
    t.name = key;
    t.min = int_of(doc, doc.require(node, "min"));
    t.max = int_of(doc, doc.require(node, "max"));
    if (t.min >= t.max) {
        doc.fail(node, "min must be below max");
    }
    const auto items = doc.require(node, "items");
    doc.expect_seq(items, "items");
    std::set<std::string> ids;
    for (const auto& item : items) {
        doc.expect_map(item, "item");
        ItemDef def;
        def.id = doc.require_str(item, "id");
        def.text = doc.optional_str(item, "text");
        def.group = doc.optional_str(item, "group");
        def.reversed = doc.optional_str(item, "reversed", "false") == "true";
        if (!ids.insert(def.id).second) {
            doc.fail(item, "duplicate item id '" + def.id + "'");
        }
        t.items.push_back(std::move(def));
    }
    if (t.items.empty()) {
        doc.fail(node, std::string(key) + " has no items");
    }
    return t;
}

template <std::size_t N>
void require_groups(const YamlDoc& doc, const ItemTable& t, const std::array<std::string_view, N>& names) {
    for (const auto& item : t.items) {
        if (std::find(names.begin(), names.end(), item.group) == names.end()) {
            doc.fail(doc.root()[t.name], "item '" + item.id + "' has unknown group '" + item.group + "'");
        }
    }
    const auto groups = t.groups();
    for (const auto name : names) {
        if (std::find(groups.begin(), groups.end(), name) == groups.end()) {
            doc.fail(doc.root()[t.name], t.name + " has no items for '" + std::string(name) + "'");
        }
    }
}

void check_answers(const std::vector<int>& answers, const ItemTable& table) {
    if (answers.size() != table.items.size()) {
        throw Error(ErrorCode::wrong_length,
                    table.name + " needs " + std::to_string(table.items.size()) + " answers, got " +
                        std::to_string(answers.size()),
                    table.name);
    }
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (answers[i] < table.min || answers[i] > table.max) {
            throw Error(ErrorCode::invalid_answer_range,
                        "answer " + std::to_string(answers[i]) + " to " + table.items[i].id + " is outside " +
                            std::to_string(table.min) + ".." + std::to_string(table.max),
                        table.items[i].id);
        }
    }
}

// Per-group mean of transformed answers.
template <typename Transform>
std::map<std::string, double> group_means(const std::vector<int>& answers, const ItemTable& table,
                                          Transform&& transform) {
    std::map<std::string, std::pair<double, int>> acc;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        auto& [sum, n] = acc[table.items[i].group];
        sum += transform(answers[i], table.items[i]);
        ++n;
    }
    std::map<std::string, double> out;
    for (const auto& [group, sn] : acc) {
        out[group] = sn.first / sn.second;
    }
    return out;
}

} // namespace

std::vector<std::string> ItemTable::groups() const {
    std::vector<std::string> out;
    for (const auto& item : items) {
        if (std::find(out.begin(), out.end(), item.group) == out.end()) {
            out.push_back(item.group);
        }
    }
    return out;
}

Instruments Instruments::from_doc(const YamlDoc& doc) {
    Instruments out;
    out.sus = table_from(doc, "sus");
    out.ueq = table_from(doc, "ueq");
    out.seq = table_from(doc, "seq");
    out.skill_index = table_from(doc, "skill_index");
    require_groups(doc, out.ueq, ueq_scales);
    require_groups(doc, out.seq, seq_dimensions);
    return out;
}

const Instruments& Instruments::standard() {
    static const Instruments instruments =
        parse(std::string(data::instruments_yaml), "<builtin instruments.yaml>");
    return instruments;
}

Instruments Instruments::load(const std::filesystem::path& path) { return from_doc(YamlDoc::from_file(path)); }

Instruments Instruments::parse(const std::string& yaml, std::string source_name) {
    return from_doc(YamlDoc::from_string(yaml, std::move(source_name)));
}

double sus_score(const std::vector<int>& answers, const ItemTable& table) {
    check_answers(answers, table);
    int sum = 0;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        sum += table.items[i].reversed ? table.max - answers[i] : answers[i] - table.min;
    }
    return sum * 100.0 / static_cast<double>(answers.size() * (table.max - table.min));
}

std::string_view to_string(SusGrade g) { return g == SusGrade::above_average ? "above_average" : "below_average"; }

SusGrade sus_grade(double score) {
    return score >= sus_above_average_threshold ? SusGrade::above_average : SusGrade::below_average;
}

std::map<std::string, double> UeqScores::by_name() const {
    return {{"attractiveness", attractiveness}, {"perspicuity", perspicuity}, {"efficiency", efficiency},
            {"dependability", dependability},   {"stimulation", stimulation}, {"novelty", novelty}};
}

double ueq_transform(int answer, bool reversed, const ItemTable& table) {
    const double centre = (table.min + table.max) / 2.0;
    return reversed ? centre - answer : answer - centre;
}

UeqScores ueq_score(const std::vector<int>& answers, const ItemTable& table) {
    check_answers(answers, table);
    const auto means = group_means(answers, table, [&](int a, const ItemDef& item) {
        return ueq_transform(a, item.reversed, table);
    });
    const auto get = [&](const char* name) {
        const auto it = means.find(name);
        return it == means.end() ? 0.0 : it->second;
    };
    return {get("attractiveness"), get("perspicuity"),  get("efficiency"),
            get("dependability"),  get("stimulation"), get("novelty")};
}

std::map<std::string, double> SeqScores::by_name() const {
    return {{"depth", depth}, {"fluency", fluency}, {"positivity", positivity}, {"arousal", arousal}};
}

SeqScores seq_score(const std::map<std::string, std::vector<int>>& answers, const ItemTable& table) {
    std::map<std::string, double> means;
    for (const auto dim : seq_dimensions) {
        const auto it = answers.find(std::string(dim));
        if (it == answers.end()) {
            throw Error(ErrorCode::missing_dimension, "no answers for " + std::string(dim), std::string(dim));
        }
        ItemTable sub{table.name, table.min, table.max, {}};
        for (const auto& item : table.items) {
            if (item.group == dim) {
                sub.items.push_back(item);
            }
        }
        check_answers(it->second, sub);
        double sum = 0;
        for (const int a : it->second) {
            sum += a;
        }
        means[std::string(dim)] = sum / static_cast<double>(it->second.size());
    }
    for (const auto& [dim, values] : answers) {
        if (std::find(seq_dimensions.begin(), seq_dimensions.end(), dim) == seq_dimensions.end()) {
            throw Error(ErrorCode::missing_dimension, "unknown dimension '" + dim + "'", dim);
        }
    }
    return {means["depth"], means["fluency"], means["positivity"], means["arousal"]};
}

std::string_view to_string(EfficacyGroup g) {
    switch (g) {
    case EfficacyGroup::light: return "light";
    case EfficacyGroup::medium: return "medium";
    case EfficacyGroup::heavy: return "heavy";
    }
    return "light";
}

namespace {

void check_thresholds(const EfficacyThresholds& t) {
    if (!(t.lower >= 0.0 && t.lower < t.upper && t.upper <= 1.0) || t.max_activities <= 0) {
        throw Error(ErrorCode::invalid_thresholds,
                    "efficacy thresholds need 0 <= lower < upper <= 1 and a positive activity cap");
    }
}

} // namespace

double efficacy_score(const EfficacyInput& input, const EfficacyThresholds& thresholds, const ItemTable& table) {
    check_thresholds(thresholds);
    check_answers(input.skill_items, table);
    if (input.monthly_activity_count < 0) {
        throw Error(ErrorCode::invalid_answer_range, "activity count must not be negative", "monthly_activity_count");
    }
    long sum = 0;
    for (const int a : input.skill_items) {
        sum += a - table.min;
    }
    const double skill =
        static_cast<double>(sum) / static_cast<double>(input.skill_items.size() * (table.max - table.min));
    const double activity = static_cast<double>(std::min(input.monthly_activity_count, thresholds.max_activities)) /
                            static_cast<double>(thresholds.max_activities);
    return (skill + activity) / 2.0;
}

EfficacyGroup efficacy_group_for_score(double score, const EfficacyThresholds& thresholds) {
    check_thresholds(thresholds);
    if (score >= thresholds.upper) {
        return EfficacyGroup::heavy;
    }
    return score >= thresholds.lower ? EfficacyGroup::medium : EfficacyGroup::light;
}

EfficacyGroup efficacy_group(const EfficacyInput& input, const EfficacyThresholds& thresholds,
                             const ItemTable& table) {
    return efficacy_group_for_score(efficacy_score(input, thresholds, table), thresholds);
}

} // namespace carebot::metrics
