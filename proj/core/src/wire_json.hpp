#pragma once

// JSON building blocks behind carebot/wire.hpp, shared with the gateway.

#include "carebot/dialogue.hpp"
#include "carebot/profile.hpp"
#include "carebot/response.hpp"

#include <json.hpp>

namespace carebot::detail {

using json = nlohmann::json;

json payload_to_json(const response::ResponsePayload& payload);
json event_to_json(const dialogue::UserEvent& event);
json profile_to_json(const UserProfile& profile);
json slots_to_json(const dialogue::Slots& slots);
json emotion_to_json(const emotion::EmotionRef& ref);

// Parses text into JSON, throwing decode_error with the byte offset.
json parse_json(std::string_view document);

// Canonical text form: sorted keys, compact.
std::string dump(const json& value);

} // namespace carebot::detail
