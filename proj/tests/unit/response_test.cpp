#include "support.hpp"

#include "carebot/error.hpp"

#include <gtest/gtest.h>

using namespace carebot;
using namespace carebot::response;

namespace {

BuildContext context(std::set<std::string> intents = {"go_home", "repeat"}) {
    return {&emotion::EmotionWheel::standard(), std::move(intents)};
}

ErrorCode build_error(const TemplateSpec& spec, const BuildContext& ctx, std::string* rule = nullptr) {
    try {
        build_response(spec, ctx);
    } catch (const Error& e) {
        if (rule != nullptr) {
            *rule = e.subject();
        }
        return e.code();
    }
    return ErrorCode::not_found;
}

} // namespace

TEST(TemplateKind, WireNames) {
    EXPECT_EQ(to_string(TemplateKind::standard), "default");
    for (const auto kind : all_template_kinds) {
        EXPECT_EQ(template_from_string(to_string(kind)), kind);
    }
    EXPECT_FALSE(template_from_string("carousel"));
}

TEST(BuildResponse, DefaultSpeechFollowsTemplate) {
    TemplateSpec spec;
    spec.header = "Hello";
    spec.body = "First paragraph.\n\nSecond paragraph.";
    const auto p = build_response(spec, context());
    ASSERT_EQ(p.speak.size(), 3u);
    EXPECT_EQ(p.speak[0].text, "Hello");
    EXPECT_EQ(p.speak[2].text, "Second paragraph.");

    TemplateSpec slides;
    slides.kind = TemplateKind::slides;
    slides.header = "Facts";
    slides.slides = {{"a", "Short A", "Long text A"}, {"b", "Short B", "Long text B"}};
    const auto s = build_response(slides, context());
    std::vector<std::string> voiced;
    for (const auto& seg : s.speak) {
        voiced.push_back(seg.text);
    }
    EXPECT_EQ(voiced, (std::vector<std::string>{"Facts", "Short A", "Short B"}));
}

TEST(BuildResponse, WheelCarriesAllCells) {
    TemplateSpec spec;
    spec.kind = TemplateKind::emotions;
    spec.header = "How do you feel?";
    const auto p = build_response(spec, context());
    const auto& cells = std::get<WheelData>(p.data).cells;
    ASSERT_EQ(cells.size(), 24u);
    for (const auto& cell : cells) {
        EXPECT_EQ(cell.position, emotion::EmotionWheel::standard().layout(cell.ref));
    }
    EXPECT_EQ(build_error(spec, {nullptr, {}}), ErrorCode::invariant_violation);
}

TEST(BuildResponse, RejectsBrokenInvariants) {
    std::string rule;
    TemplateSpec unknown_button;
    unknown_button.body = "Hi";
    unknown_button.buttons = {{"Therapy", "open_therapy"}};
    EXPECT_EQ(build_error(unknown_button, context(), &rule), ErrorCode::invariant_violation);
    EXPECT_EQ(rule, "button-intent");

    TemplateSpec twice;
    twice.body = "Hi";
    twice.buttons = {{"Home", "go_home"}, {"Main menu", "go_home"}};
    EXPECT_EQ(build_error(twice, context(), &rule), ErrorCode::invariant_violation);
    EXPECT_EQ(rule, "button-unique");

    TemplateSpec unlabeled;
    unlabeled.body = "Hi";
    unlabeled.buttons = {{"", "go_home"}};
    EXPECT_EQ(build_error(unlabeled, context(), &rule), ErrorCode::invariant_violation);
    EXPECT_EQ(rule, "button-fields");

    TemplateSpec off_screen;
    off_screen.body = "Visible words only.";
    off_screen.speak = {{"Secret words", std::nullopt}};
    EXPECT_EQ(build_error(off_screen, context(), &rule), ErrorCode::invariant_violation);
    EXPECT_EQ(rule, "speak-subset");

    TemplateSpec subset;
    subset.body = "Visible words only.";
    subset.speak = {{"words", std::string("<speak>words</speak>")}};
    EXPECT_NO_THROW(build_response(subset, context()));
}

TEST(Check, DataMustMatchKind) {
    ResponsePayload p;
    p.kind = TemplateKind::slides;
    p.data = DashboardData{};
    const auto broken = check(p);
    ASSERT_TRUE(broken);
    EXPECT_EQ(broken->substr(0, broken->find(':')), "template-data");

    ResponsePayload wheel;
    wheel.kind = TemplateKind::emotions;
    wheel.data = WheelData{};
    ASSERT_TRUE(check(wheel));
}

TEST(VisibleSegments, CoverEveryTemplateText) {
    ResponsePayload p;
    p.kind = TemplateKind::dashboard;
    p.header = "Today";
    p.data = DashboardData{{{"w", "Weather", "Sunny"}}};
    const auto seg = visible_segments(p);
    EXPECT_NE(std::find(seg.begin(), seg.end(), "Weather"), seg.end());
    EXPECT_NE(std::find(seg.begin(), seg.end(), "Sunny"), seg.end());

    ResponsePayload c;
    c.kind = TemplateKind::checkboxes;
    c.data = ChecklistData{{{"family", "Family", false}}};
    const auto cs = visible_segments(c);
    EXPECT_NE(std::find(cs.begin(), cs.end(), "Family"), cs.end());
}

TEST(RandomPayloads, PassCheck) {
    carebot::testing::Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto p = carebot::testing::random_payload(rng, emotion::EmotionWheel::standard());
        const auto broken = check(p);
        ASSERT_FALSE(broken) << *broken;
    }
}
