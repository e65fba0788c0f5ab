#pragma once

#include "carebot/dialogue.hpp"
#include "carebot/emotion.hpp"
#include "carebot/profile.hpp"
#include "carebot/response.hpp"

#include <string>
#include <string_view>

// Canonical JSON documents exchanged with clients and written to the store.
// Objects are emitted with sorted keys and no insignificant whitespace, so
// equal values always serialize to identical bytes. Field reference:
// docs/formats.md#wire.
namespace carebot::wire {

inline constexpr int schema_version = 1;

// Throws invariant_violation if the payload breaks a response invariant.
std::string serialize(const response::ResponsePayload& payload);

// Throws decode_error naming the byte offset (syntax) or JSON pointer
// (schema) of the first problem.
response::ResponsePayload deserialize(std::string_view document);

// Client events:
//   {"kind":"utterance","text":"..."}
//   {"kind":"button","button":"<intent id>"}
//   {"kind":"emotion_selected","sector":"fear","intensity":"medium"}
//   {"kind":"checkbox_submit","tags":["family"]}
// each with an optional integer "timestamp" (milliseconds).
// Throws decode_error for invalid JSON and malformed_event when the fields do
// not fit the kind.
dialogue::UserEvent decode_event(std::string_view document,
                                 const emotion::EmotionWheel& wheel = emotion::EmotionWheel::standard());
std::string encode_event(const dialogue::UserEvent& event);

std::string encode_profile(const UserProfile& profile);
UserProfile decode_profile(std::string_view document,
                           const emotion::EmotionWheel& wheel = emotion::EmotionWheel::standard());

std::string encode_log_entry(const dialogue::LogEntry& entry);
dialogue::LogEntry decode_log_entry(std::string_view document,
                                    const emotion::EmotionWheel& wheel = emotion::EmotionWheel::standard());

std::string encode_slots(const dialogue::Slots& slots);

} // namespace carebot::wire
