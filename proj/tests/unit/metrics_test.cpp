#include "support.hpp"

#include "carebot/error.hpp"

#include <gtest/gtest.h>

using namespace carebot;
using namespace carebot::metrics;
namespace ct = carebot::testing;

namespace {

template <typename F>
std::pair<ErrorCode, std::string> error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return {e.code(), e.subject()};
    }
    return {ErrorCode::not_found, "no error"};
}

std::map<std::string, std::vector<int>> seq_answers(int value) {
    std::map<std::string, std::vector<int>> out;
    for (const auto dim : seq_dimensions) {
        out[std::string(dim)] = std::vector<int>(3, value);
    }
    return out;
}

} // namespace

TEST(Sus, AgreesWithOracle) {
    const auto c = ct::sus_oracle_agreement(10000, 3);
    EXPECT_TRUE(c.ok) << c.detail;
}

TEST(Sus, GradeNames) {
    EXPECT_EQ(to_string(sus_grade(79)), "above_average");
    EXPECT_EQ(to_string(sus_grade(50)), "below_average");
}

TEST(Sus, RejectionNamesTheItem) {
    const auto [code, subject] = error_of([] { sus_score({3, 3, 0, 3, 3, 3, 3, 3, 3, 3}); });
    EXPECT_EQ(code, ErrorCode::invalid_answer_range);
    EXPECT_EQ(subject, Instruments::standard().sus.items[2].id);
}

TEST(Ueq, Properties) {
    const auto c = ct::ueq_properties();
    EXPECT_TRUE(c.ok) << c.detail;
}

TEST(Ueq, ScaleSizes) {
    std::map<std::string, int> sizes;
    for (const auto& item : Instruments::standard().ueq.items) {
        ++sizes[item.group];
    }
    EXPECT_EQ(sizes["attractiveness"], 6);
    for (const auto* scale : {"perspicuity", "efficiency", "dependability", "stimulation", "novelty"}) {
        EXPECT_EQ(sizes[scale], 4) << scale;
    }
}

TEST(Seq, MeansPerDimension) {
    auto answers = seq_answers(4);
    answers["depth"] = {7, 7, 1};
    const auto s = seq_score(answers);
    EXPECT_DOUBLE_EQ(s.depth, 5.0);
    EXPECT_DOUBLE_EQ(s.fluency, 4.0);
    EXPECT_EQ(s.by_name().size(), 4u);
}

TEST(Seq, Rejections) {
    auto missing = seq_answers(4);
    missing.erase("arousal");
    EXPECT_EQ(error_of([&] { seq_score(missing); }), std::make_pair(ErrorCode::missing_dimension, std::string("arousal")));

    auto short_dim = seq_answers(4);
    short_dim["fluency"].pop_back();
    EXPECT_EQ(error_of([&] { seq_score(short_dim); }).first, ErrorCode::wrong_length);

    auto out_of_range = seq_answers(4);
    out_of_range["positivity"][1] = 8;
    EXPECT_EQ(error_of([&] { seq_score(out_of_range); }).first, ErrorCode::invalid_answer_range);

    auto extra = seq_answers(4);
    extra["mood"] = {4, 4, 4};
    EXPECT_EQ(error_of([&] { seq_score(extra); }).first, ErrorCode::missing_dimension);
}

TEST(Efficacy, ScoreAndGroups) {
    const auto n = Instruments::standard().skill_index.items.size();
    EXPECT_DOUBLE_EQ(efficacy_score({std::vector<int>(n, 1), 0}), 0.0);
    EXPECT_DOUBLE_EQ(efficacy_score({std::vector<int>(n, 5), 20}), 1.0);
    EXPECT_DOUBLE_EQ(efficacy_score({std::vector<int>(n, 5), 500}), 1.0);
    EXPECT_EQ(efficacy_group({std::vector<int>(n, 1), 0}), EfficacyGroup::light);
    EXPECT_EQ(efficacy_group({std::vector<int>(n, 3), 10}), EfficacyGroup::medium);
    EXPECT_EQ(efficacy_group({std::vector<int>(n, 5), 20}), EfficacyGroup::heavy);

    const EfficacyThresholds t;
    EXPECT_EQ(efficacy_group_for_score(t.lower, t), EfficacyGroup::medium);
    EXPECT_EQ(efficacy_group_for_score(t.upper, t), EfficacyGroup::heavy);
    EXPECT_EQ(efficacy_group_for_score(std::nextafter(t.lower, 0.0), t), EfficacyGroup::light);
}

TEST(Efficacy, GroupIsMonotoneInScore) {
    ct::Rng rng(8);
    const auto n = Instruments::standard().skill_index.items.size();
    for (int i = 0; i < 2000; ++i) {
        const EfficacyInput a{ct::random_answers(rng, n, 1, 5), ct::uniform(rng, 0, 30)};
        const EfficacyInput b{ct::random_answers(rng, n, 1, 5), ct::uniform(rng, 0, 30)};
        const double sa = efficacy_score(a);
        const double sb = efficacy_score(b);
        ASSERT_GE(sa, 0.0);
        ASSERT_LE(sa, 1.0);
        if (sa <= sb) {
            ASSERT_LE(static_cast<int>(efficacy_group(a)), static_cast<int>(efficacy_group(b)));
        }
    }
}

TEST(Efficacy, Rejections) {
    const auto n = Instruments::standard().skill_index.items.size();
    EXPECT_EQ(error_of([&] { efficacy_score({std::vector<int>(n - 1, 3), 1}); }).first, ErrorCode::wrong_length);
    EXPECT_EQ(error_of([&] { efficacy_score({std::vector<int>(n, 3), -1}); }).first, ErrorCode::invalid_answer_range);
    EXPECT_EQ(error_of([] { efficacy_group_for_score(0.5, {0.6, 0.4, 20}); }).first, ErrorCode::invalid_thresholds);
    EXPECT_EQ(error_of([] { efficacy_group_for_score(0.5, {0.2, 0.4, 0}); }).first, ErrorCode::invalid_thresholds);
}

TEST(Instruments, LoadFromYaml) {
    std::string yaml = "sus: {min: 1, max: 5, items: [{id: s1, text: A}]}\nueq:\n  min: 1\n  max: 7\n  items:\n";
    for (const auto scale : ueq_scales) {
        yaml += "    - {id: u_" + std::string(scale) + ", text: B, group: " + std::string(scale) + "}\n";
    }
    yaml += "seq:\n  min: 1\n  max: 7\n  items:\n";
    for (const auto dim : seq_dimensions) {
        yaml += "    - {id: q_" + std::string(dim) + ", text: C, group: " + std::string(dim) + "}\n";
    }
    yaml += "skill_index: {min: 1, max: 5, items: [{id: k1, text: D}]}\n";
    const auto inst = Instruments::parse(yaml);
    EXPECT_EQ(inst.sus.items.size(), 1u);
    EXPECT_DOUBLE_EQ(sus_score({5}, inst.sus), 100.0);
    EXPECT_DOUBLE_EQ(ueq_score({7, 7, 7, 7, 7, 1}, inst.ueq).novelty, -3.0);
    EXPECT_THROW(Instruments::parse("sus: {}"), Error);
}
