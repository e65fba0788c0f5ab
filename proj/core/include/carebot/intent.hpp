#pragma once

#include "carebot/text.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace carebot::intent {

struct IntentDef {
    std::string id;
    std::vector<Tokens> phrases;  // normalized
    // Empty for global intents, otherwise the qualified state id the intent
    // is local to.
    std::string state_scope;
    std::string label;  // button caption; may be empty

    bool is_global() const { return state_scope.empty(); }
};

// Builds an IntentDef, normalizing each phrase.
IntentDef make_intent(std::string id, const std::vector<std::string>& phrases, std::string state_scope = {},
                      std::string label = {});

struct IntentMatch {
    std::string intent_id;
    Tokens matched_phrase;
    std::size_t score = 0;  // matched phrase length in tokens, always >= 1
    bool local = false;

    friend bool operator==(const IntentMatch&, const IntentMatch&) = default;
};

enum class MatchMode {
    contiguous,      // phrase occurs as a contiguous token run in the utterance
    whole_utterance  // phrase equals the whole normalized utterance
};

struct RegistryProblem {
    enum class Kind { empty_phrase_set, empty_phrase, duplicate_phrase, duplicate_intent } kind;
    std::string intent_id;
    std::string scope;  // empty for global
    std::string detail;
};

// Immutable set of intents indexed for matching. State-local intents of the
// current state always win over global ones; within one priority class the
// longest matched phrase wins, then the lexicographically smallest id.
class Registry {
public:
    Registry() = default;
    explicit Registry(std::vector<IntentDef> intents);

    std::optional<IntentMatch> match(std::string_view utterance, std::string_view state_id,
                                     MatchMode mode = MatchMode::contiguous) const;
    std::optional<IntentMatch> match_tokens(const Tokens& tokens, std::string_view state_id,
                                            MatchMode mode = MatchMode::contiguous) const;

    // The definition a state sees for `id`: its own local intent first, then
    // the global one.
    const IntentDef* resolve(std::string_view id, std::string_view state_id) const;
    bool available(std::string_view id, std::string_view state_id) const { return resolve(id, state_id) != nullptr; }

    const std::vector<IntentDef>& intents() const { return intents_; }
    std::vector<const IntentDef*> globals() const;
    std::vector<const IntentDef*> locals(std::string_view state_id) const;

    std::vector<RegistryProblem> problems() const;

private:
    struct Entry {
        std::size_t intent;  // index into intents_
        std::size_t phrase;  // index into intents_[intent].phrases
    };
    struct ScopeIndex {
        std::unordered_map<std::string, std::vector<Entry>> by_first_token;
        std::unordered_map<std::string, std::vector<Entry>> by_whole_phrase;
    };

    std::optional<IntentMatch> best_in(const ScopeIndex& index, const Tokens& tokens, MatchMode mode) const;

    std::vector<IntentDef> intents_;
    std::map<std::string, ScopeIndex, std::less<>> scopes_;  // "" = global
};

Tokens normalize_utterance(std::string_view text);

} // namespace carebot::intent
