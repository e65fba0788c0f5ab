#pragma once

#include "carebot/dialogue.hpp"
#include "carebot/emotion.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace carebot::tools {

// One line of a simulation script:
//   say <text>              spoken or typed utterance
//   tap <intent>            button press
//   touch <emotion label>   tap on the emotion wheel
//   check [tag,tag,...]     submit the checkbox list
//   expect <flow:state>     assert the current state
//   instrument <kind> <json answers>
// Blank lines and lines starting with '#' are skipped.
struct ScriptStep {
    enum class Kind { event, expect, instrument } kind = Kind::event;
    dialogue::UserEvent event;
    std::string argument;  // expected state, or instrument kind
    std::string body;      // instrument answers
    int line = 0;
};

// Throws Error(load_error) naming the line.
std::vector<ScriptStep> parse_script(std::string_view text, const emotion::EmotionWheel& wheel);

// Touch-only walk through every module, ending with a SUS submission.
extern const std::string_view default_script;

} // namespace carebot::tools
