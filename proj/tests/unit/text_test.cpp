#include "carebot/text.hpp"

#include <gtest/gtest.h>

using carebot::Tokens;

TEST(Normalize, FoldsCaseAndDropsPunctuation) {
    EXPECT_EQ(carebot::normalize("  Hello, WORLD!  "), (Tokens{"hello", "world"}));
    EXPECT_EQ(carebot::normalize("don't stop"), (Tokens{"dont", "stop"}));
    EXPECT_TRUE(carebot::normalize("?! ...").empty());
    EXPECT_TRUE(carebot::normalize("").empty());
}

TEST(Normalize, LowersPolishLetters) {
    EXPECT_EQ(carebot::normalized_key("ŻÓŁĆ Gęślą"), "żółć gęślą");
}

TEST(Normalize, KeepsOtherCodePoints) {
    EXPECT_EQ(carebot::normalized_key("日本 ok"), "日本 ok");
}

TEST(ContainsRun, FindsContiguousRuns) {
    const Tokens hay = {"i", "need", "help", "now"};
    EXPECT_TRUE(carebot::contains_run(hay, {"need", "help"}));
    EXPECT_TRUE(carebot::contains_run(hay, {"now"}));
    EXPECT_FALSE(carebot::contains_run(hay, {"i", "help"}));
    EXPECT_FALSE(carebot::contains_run(hay, {"now", "please"}));
}

TEST(Trim, StripsAsciiWhitespace) {
    EXPECT_EQ(carebot::trim("\t Anna \n"), "Anna");
    EXPECT_EQ(carebot::trim("   "), "");
}

TEST(Utf8, Validates) {
    EXPECT_TRUE(carebot::is_valid_utf8("zażółć"));
    EXPECT_FALSE(carebot::is_valid_utf8("\xc3\x28"));
    EXPECT_FALSE(carebot::is_valid_utf8("\xff"));
}
