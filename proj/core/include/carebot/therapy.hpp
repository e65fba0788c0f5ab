#pragma once

#include "carebot/content.hpp"
#include "carebot/dialogue.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace carebot::detail {
class YamlDoc;
}

namespace carebot::therapy {

enum class Process { acceptance, cognitive_defusion, being_present, self_as_context, values, committed_action };

inline constexpr std::array<Process, 6> all_processes = {Process::acceptance,      Process::cognitive_defusion,
                                                         Process::being_present,   Process::self_as_context,
                                                         Process::values,          Process::committed_action};

std::string_view to_string(Process p);
std::optional<Process> process_from_string(std::string_view s);

enum class ActionKind { verbal_confirmation, free_text_capture, value_pick, none };

std::string_view to_string(ActionKind a);
std::optional<ActionKind> action_from_string(std::string_view s);

struct TherapyStep {
    std::string id;
    std::vector<Process> processes;
    std::string header;
    std::string text;                 // slot-aware instruction
    std::vector<std::string> speak;   // optional spoken subset
    ActionKind action = ActionKind::verbal_confirmation;
    std::string slot;                 // free_text_capture target slot
    std::vector<std::string> suggestions;  // free_text_capture: tappable answers
    std::optional<std::string> fallback;
};

struct PhraseSet {
    std::string label;
    std::vector<std::string> phrases;
};

struct TherapyScript {
    std::string flow_id = "therapy";
    dialogue::StateRef emotion_state{"emotions", "wheel"};
    dialogue::StateRef exit{"main", "home"};
    PhraseSet confirm;
    PhraseSet next;     // ActionKind::none
    PhraseSet restart;
    PhraseSet decline;
    std::vector<TherapyStep> steps;
    std::string complete_header;
    std::string complete_text;
    std::string restart_header;
    std::string restart_text;
    std::string value_fallback;
    std::string confirm_fallback;
};

inline constexpr std::size_t step_count = 5;

// Slot names shared by the script compiler and TherapyState.
inline constexpr std::string_view declared_emotion_slot = "declared_emotion";
inline constexpr std::string_view chosen_value_slot = "chosen_value";
inline constexpr std::string_view committed_action_slot = "committed_action";
inline constexpr std::string_view completed_slot = "therapy_completed";

// Throws load_error unless the script has exactly five steps whose process
// tags cover all six processes and whose free-text steps name a slot.
void check_script(const TherapyScript& script);

// Reads the `therapy` section of a flow document. Returns nullopt when the
// document has none.
std::optional<TherapyScript> parse_script(const detail::YamlDoc& doc);
TherapyScript parse_script(const std::string& yaml, std::string source_name = "<therapy>");

// Value tag -> committed action suggestion.
class CommittedActions {
public:
    CommittedActions() = default;
    explicit CommittedActions(std::map<std::string, std::string> table) : table_(std::move(table)) {}

    static const CommittedActions& standard();
    static CommittedActions load(const std::filesystem::path& path);
    static CommittedActions parse(const std::string& yaml, std::string source_name = "<committed actions>");

    // Throws unknown_value_tag.
    const std::string& for_value(std::string_view tag) const;
    const std::map<std::string, std::string>& table() const { return table_; }

private:
    std::map<std::string, std::string> table_;
};

// Throws unknown_value_tag.
inline const std::string& committed_action_for(std::string_view tag,
                                               const CommittedActions& actions = CommittedActions::standard()) {
    return actions.for_value(tag);
}

// Adds the therapy flow (a router, one state per step, completion and
// restart states) and its intents to `flows`. Every vocabulary value needs a
// committed action; throws load_error otherwise.
void compile(const TherapyScript& script, const content::Catalog& catalog, const CommittedActions& actions,
             dialogue::FlowSet& flows);

// The therapy-related part of a session.
struct TherapyState {
    std::optional<emotion::EmotionRef> declared_emotion;
    std::optional<std::string> threatening_thought;
    std::optional<std::string> chosen_value;
    std::size_t step_index = 0;  // steps.size() once the last step is done
    bool completed = false;
    bool active = false;  // session currently inside the therapy flow
};

TherapyState therapy_state(const dialogue::Session& session, const TherapyScript& script);

// Enters therapy as if the user asked for it: routes to the emotion wheel
// when no emotion is declared, offers a restart after completion, else
// renders the current step.
dialogue::Turn start_therapy(const dialogue::Engine& engine, const dialogue::Session& session,
                             std::int64_t timestamp = 0);

inline dialogue::Turn therapy_advance(const dialogue::Engine& engine, const dialogue::Session& session,
                                      const dialogue::UserEvent& event) {
    return engine.advance(session, event);
}

// Intent id that opens the therapy flow.
inline constexpr std::string_view open_intent = "open_therapy";

} // namespace carebot::therapy
