#pragma once

#include "carebot/dialogue.hpp"

namespace carebot::detail {

class YamlDoc;

void parse_flow_document(const YamlDoc& doc, dialogue::FlowSet& out);

} // namespace carebot::detail
