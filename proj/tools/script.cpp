#include "script.hpp"

#include "carebot/error.hpp"
#include "carebot/text.hpp"

#include <sstream>

namespace carebot::tools {

const std::string_view default_script = R"(# greeting and values
tap begin
expect main:home
tap open_info
tap values
check family,health
expect info:values_saved
tap back
# myths and feedback
tap facts
tap rate
tap helpful
tap not_helpful
tap helpful
expect info:rated
tap go_home
# emotion wheel
tap open_emotions
touch fear
expect emotions:confirmed
# therapy
tap open_therapy
expect therapy:acknowledge
tap confirm
tap suggestion_2
tap confirm
tap family
tap confirm
expect therapy:complete
instrument sus {"answers": [3, 3, 3, 3, 3, 3, 3, 3, 3, 3]}
)";

std::vector<ScriptStep> parse_script(std::string_view text, const emotion::EmotionWheel& wheel) {
    std::vector<ScriptStep> steps;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto space = line.find(' ');
        const auto verb = line.substr(0, space);
        const auto arg = space == std::string::npos ? std::string() : trim(line.substr(space + 1));
        const auto fail = [&](const std::string& message) {
            throw Error(ErrorCode::load_error, "script line " + std::to_string(line_no) + ": " + message);
        };

        ScriptStep step;
        step.line = line_no;
        if (verb == "say") {
            step.event.payload = dialogue::Utterance{arg};
        } else if (verb == "tap") {
            if (arg.empty()) {
                fail("tap needs an intent id");
            }
            step.event.payload = dialogue::ButtonPress{arg};
        } else if (verb == "touch") {
            const auto ref = wheel.find(arg);
            if (!ref) {
                fail("unknown emotion '" + arg + "'");
            }
            step.event.payload = dialogue::EmotionSelected{*ref};
        } else if (verb == "check") {
            dialogue::CheckboxSubmit submit;
            std::istringstream tags(arg);
            std::string tag;
            while (std::getline(tags, tag, ',')) {
                if (auto t = trim(tag); !t.empty()) {
                    submit.tags.push_back(t);
                }
            }
            step.event.payload = std::move(submit);
        } else if (verb == "expect") {
            if (!dialogue::StateRef::parse(arg)) {
                fail("expect needs flow:state");
            }
            step.kind = ScriptStep::Kind::expect;
            step.argument = arg;
        } else if (verb == "instrument") {
            const auto sp = arg.find(' ');
            if (sp == std::string::npos) {
                fail("instrument needs a kind and a JSON body");
            }
            step.kind = ScriptStep::Kind::instrument;
            step.argument = arg.substr(0, sp);
            step.body = trim(arg.substr(sp + 1));
        } else {
            fail("unknown command '" + verb + "'");
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

} // namespace carebot::tools
