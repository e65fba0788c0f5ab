#include "support.hpp"

#include <gtest/gtest.h>

using namespace carebot;
namespace ct = carebot::testing;

TEST(IntentRegistry, AgreesWithBruteForce) {
    for (const std::uint64_t seed : {1, 2, 3}) {
        const auto c = ct::intent_oracle(1000, seed);
        EXPECT_TRUE(c.ok) << "seed " << seed << ": " << c.detail;
    }
}

TEST(IntentRegistry, LocalIntentsWin) {
    const auto c = ct::intent_priority();
    EXPECT_TRUE(c.ok) << c.detail;
}

TEST(IntentRegistry, ReportsMatchedPhrase) {
    const intent::Registry registry(ct::fifty_phrase_intents());
    const auto m = registry.match("Could you say that again, please?", "demo:none");
    ASSERT_TRUE(m);
    EXPECT_EQ(m->intent_id, "repeat");
    EXPECT_EQ(m->matched_phrase, (Tokens{"say", "that", "again"}));
    EXPECT_EQ(m->score, 3u);
    EXPECT_FALSE(m->local);
}

TEST(IntentRegistry, ResolvePrefersLocalDefinition) {
    auto defs = ct::fifty_phrase_intents();
    defs.push_back(intent::make_intent("go_home", {"leave"}, "demo:step"));
    const intent::Registry registry(defs);
    ASSERT_NE(registry.resolve("go_home", "demo:step"), nullptr);
    EXPECT_FALSE(registry.resolve("go_home", "demo:step")->is_global());
    EXPECT_TRUE(registry.resolve("go_home", "demo:menu")->is_global());
    EXPECT_EQ(registry.resolve("facts", "demo:step"), nullptr);
    EXPECT_TRUE(registry.available("confirm", "demo:step"));
    EXPECT_EQ(registry.locals("demo:step").size(), 4u);
    EXPECT_EQ(registry.globals().size(), 8u);
}

TEST(IntentRegistry, ReportsProblems) {
    const intent::Registry registry({
        intent::make_intent("a", {"hello there"}),
        intent::make_intent("b", {"Hello, there!"}),
        intent::make_intent("c", {}),
        intent::make_intent("d", {"?!"}),
        intent::make_intent("a", {"other"}),
        intent::make_intent("e", {"hello there"}, "x:y"),
    });
    std::set<std::pair<intent::RegistryProblem::Kind, std::string>> seen;
    for (const auto& p : registry.problems()) {
        seen.insert({p.kind, p.intent_id});
    }
    using K = intent::RegistryProblem::Kind;
    EXPECT_TRUE(seen.count({K::duplicate_phrase, "b"}) || seen.count({K::duplicate_phrase, "a"}));
    EXPECT_TRUE(seen.count({K::empty_phrase_set, "c"}));
    EXPECT_TRUE(seen.count({K::empty_phrase, "d"}));
    EXPECT_TRUE(seen.count({K::duplicate_intent, "a"}));
    // The same phrase in a local scope is allowed: locals shadow globals.
    EXPECT_FALSE(seen.count({K::duplicate_phrase, "e"}));
}

TEST(IntentRegistry, EmptyRegistryNeverMatches) {
    const intent::Registry registry;
    EXPECT_FALSE(registry.match("anything at all", "a:b"));
}
