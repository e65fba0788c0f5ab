#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace carebot::detail {
class YamlDoc;
}

namespace carebot::metrics {

struct ItemDef {
    std::string id;
    std::string text;
    std::string group;      // UEQ scale or SEQ dimension; empty otherwise
    bool reversed = false;  // the positive answer sits at the low end
};

// One questionnaire: its answer range and items in presentation order.
struct ItemTable {
    std::string name;
    int min = 1;
    int max = 5;
    std::vector<ItemDef> items;

    std::vector<std::string> groups() const;  // in order of first appearance
};

// Item tables for every instrument. Swapping the file localizes the
// questionnaires without code changes.
struct Instruments {
    ItemTable sus;
    ItemTable ueq;
    ItemTable seq;
    ItemTable skill_index;

    static const Instruments& standard();
    static Instruments load(const std::filesystem::path& path);
    static Instruments parse(const std::string& yaml, std::string source_name = "<instruments>");

private:
    static Instruments from_doc(const detail::YamlDoc& doc);
};

// --- SUS --------------------------------------------------------------------

// Throws wrong_length or invalid_answer_range (subject: item id).
double sus_score(const std::vector<int>& answers, const ItemTable& table = Instruments::standard().sus);

enum class SusGrade { below_average, above_average };
std::string_view to_string(SusGrade g);

inline constexpr double sus_above_average_threshold = 68.0;
SusGrade sus_grade(double score);

// --- UEQ --------------------------------------------------------------------

inline constexpr std::array<std::string_view, 6> ueq_scales = {"attractiveness", "perspicuity", "efficiency",
                                                               "dependability",  "stimulation", "novelty"};

struct UeqScores {
    double attractiveness = 0;
    double perspicuity = 0;
    double efficiency = 0;
    double dependability = 0;
    double stimulation = 0;
    double novelty = 0;

    std::map<std::string, double> by_name() const;
};

// Maps one raw answer to -3..+3 given the item's polarity.
double ueq_transform(int answer, bool reversed, const ItemTable& table = Instruments::standard().ueq);

UeqScores ueq_score(const std::vector<int>& answers, const ItemTable& table = Instruments::standard().ueq);

// --- Session Evaluation Questionnaire ---------------------------------------

inline constexpr std::array<std::string_view, 4> seq_dimensions = {"depth", "fluency", "positivity", "arousal"};

struct SeqScores {
    double depth = 0;
    double fluency = 0;
    double positivity = 0;
    double arousal = 0;

    std::map<std::string, double> by_name() const;
};

// Answers grouped by dimension. Throws missing_dimension, wrong_length
// (item count differs from the table) or invalid_answer_range.
SeqScores seq_score(const std::map<std::string, std::vector<int>>& answers,
                    const ItemTable& table = Instruments::standard().seq);

// --- Internet efficacy ------------------------------------------------------

struct EfficacyInput {
    std::vector<int> skill_items;  // skill index answers
    long monthly_activity_count = 0;
};

struct EfficacyThresholds {
    double lower = 0.4125;  // combined score at or above: medium
    double upper = 0.5875;  // combined score at or above: heavy
    long max_activities = 20;  // activity counts saturate here
};

enum class EfficacyGroup { light, medium, heavy };
std::string_view to_string(EfficacyGroup g);

// Mean of the normalized skill index and the normalized activity count, in
// [0, 1]. Throws wrong_length / invalid_answer_range.
double efficacy_score(const EfficacyInput& input, const EfficacyThresholds& thresholds = {},
                      const ItemTable& table = Instruments::standard().skill_index);

// Throws invalid_thresholds unless 0 <= lower < upper <= 1 and
// max_activities > 0. Cut points are lower-inclusive.
EfficacyGroup efficacy_group(const EfficacyInput& input, const EfficacyThresholds& thresholds = {},
                             const ItemTable& table = Instruments::standard().skill_index);
EfficacyGroup efficacy_group_for_score(double score, const EfficacyThresholds& thresholds);

} // namespace carebot::metrics
