#pragma once

#include "carebot/emotion.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace carebot {

enum class Gender { female, male, unspecified };

std::string_view to_string(Gender g);
std::optional<Gender> gender_from_string(std::string_view s);

// Per-user data that outlives a single session.
struct UserProfile {
    std::string user_id;
    std::string name;
    Gender gender = Gender::unspecified;
    std::set<std::string> values;
    std::vector<emotion::EmotionRecord> emotion_history;

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

} // namespace carebot
