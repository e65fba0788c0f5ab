#include "carebot/error.hpp"

namespace carebot {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::load_error: return "load_error";
    case ErrorCode::unknown_user: return "unknown_user";
    case ErrorCode::unknown_session: return "unknown_session";
    case ErrorCode::malformed_event: return "malformed_event";
    case ErrorCode::unbound_placeholder: return "unbound_placeholder";
    case ErrorCode::replay_divergence: return "replay_divergence";
    case ErrorCode::unknown_section: return "unknown_section";
    case ErrorCode::unknown_item: return "unknown_item";
    case ErrorCode::not_eligible: return "not_eligible";
    case ErrorCode::unknown_value_tag: return "unknown_value_tag";
    case ErrorCode::invariant_violation: return "invariant_violation";
    case ErrorCode::decode_error: return "decode_error";
    case ErrorCode::invalid_answer_range: return "invalid_answer_range";
    case ErrorCode::wrong_length: return "wrong_length";
    case ErrorCode::missing_dimension: return "missing_dimension";
    case ErrorCode::invalid_thresholds: return "invalid_thresholds";
    case ErrorCode::validation_error: return "validation_error";
    case ErrorCode::store_failure: return "store_failure";
    }
    return "unknown";
}

} // namespace carebot
