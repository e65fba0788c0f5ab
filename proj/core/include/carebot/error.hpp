#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carebot {

enum class ErrorCode {
    not_found,
    load_error,
    unknown_user,
    unknown_session,
    malformed_event,
    unbound_placeholder,
    replay_divergence,
    unknown_section,
    unknown_item,
    not_eligible,
    unknown_value_tag,
    invariant_violation,
    decode_error,
    invalid_answer_range,
    wrong_length,
    missing_dimension,
    invalid_thresholds,
    validation_error,
    store_failure,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library. `subject()` carries the offending
// name (placeholder, item id, intent id, ...) when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string subject = {})
        : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    ErrorCode code_;
    std::string subject_;
};

} // namespace carebot
