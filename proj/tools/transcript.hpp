#pragma once

#include "carebot/dialogue.hpp"
#include "carebot/response.hpp"

#include <ostream>

namespace carebot::tools {

// Human-readable rendering of one payload, indented under a "bot>" prefix.
void print_payload(std::ostream& out, const response::ResponsePayload& payload);

// "user> ..." line describing an event.
void print_event(std::ostream& out, const dialogue::UserEvent& event);

} // namespace carebot::tools
