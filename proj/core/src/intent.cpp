#include "carebot/intent.hpp"

#include <algorithm>
#include <set>

namespace carebot::intent {

IntentDef make_intent(std::string id, const std::vector<std::string>& phrases, std::string state_scope,
                      std::string label) {
    IntentDef def{std::move(id), {}, std::move(state_scope), std::move(label)};
    def.phrases.reserve(phrases.size());
    for (const auto& p : phrases) {
        def.phrases.push_back(normalize(p));
    }
    return def;
}

Tokens normalize_utterance(std::string_view text) {
    return normalize(text);
}

Registry::Registry(std::vector<IntentDef> intents) : intents_(std::move(intents)) {
    scopes_.try_emplace("");
    for (std::size_t i = 0; i < intents_.size(); ++i) {
        auto& scope = scopes_[intents_[i].state_scope];
        for (std::size_t p = 0; p < intents_[i].phrases.size(); ++p) {
            const auto& phrase = intents_[i].phrases[p];
            if (phrase.empty()) {
                continue;
            }
            scope.by_first_token[phrase.front()].push_back({i, p});
            scope.by_whole_phrase[join(phrase)].push_back({i, p});
        }
    }
}

std::optional<IntentMatch> Registry::best_in(const ScopeIndex& index, const Tokens& tokens, MatchMode mode) const {
    std::optional<IntentMatch> best;
    auto consider = [&](const Entry& e) {
        const auto& def = intents_[e.intent];
        const auto& phrase = def.phrases[e.phrase];
        if (!best || phrase.size() > best->score ||
            (phrase.size() == best->score && def.id < best->intent_id)) {
            best = IntentMatch{def.id, phrase, phrase.size(), !def.is_global()};
        }
    };

    if (mode == MatchMode::whole_utterance) {
        const auto it = index.by_whole_phrase.find(join(tokens));
        if (it != index.by_whole_phrase.end()) {
            for (const auto& e : it->second) {
                consider(e);
            }
        }
        return best;
    }

    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        const auto it = index.by_first_token.find(tokens[pos]);
        if (it == index.by_first_token.end()) {
            continue;
        }
        for (const auto& e : it->second) {
            const auto& phrase = intents_[e.intent].phrases[e.phrase];
            if (pos + phrase.size() > tokens.size()) {
                continue;
            }
            if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos))) {
                consider(e);
            }
        }
    }
    return best;
}

std::optional<IntentMatch> Registry::match_tokens(const Tokens& tokens, std::string_view state_id,
                                                  MatchMode mode) const {
    if (tokens.empty()) {
        return std::nullopt;
    }
    if (!state_id.empty()) {
        const auto local = scopes_.find(state_id);
        if (local != scopes_.end()) {
            if (auto m = best_in(local->second, tokens, mode)) {
                return m;
            }
        }
    }
    const auto global = scopes_.find(std::string_view{});
    if (global == scopes_.end()) {
        return std::nullopt;
    }
    return best_in(global->second, tokens, mode);
}

std::optional<IntentMatch> Registry::match(std::string_view utterance, std::string_view state_id,
                                           MatchMode mode) const {
    return match_tokens(normalize(utterance), state_id, mode);
}

const IntentDef* Registry::resolve(std::string_view id, std::string_view state_id) const {
    const IntentDef* global = nullptr;
    for (const auto& def : intents_) {
        if (def.id != id) {
            continue;
        }
        if (!def.is_global() && def.state_scope == state_id) {
            return &def;
        }
        if (def.is_global() && global == nullptr) {
            global = &def;
        }
    }
    return global;
}

std::vector<const IntentDef*> Registry::globals() const {
    std::vector<const IntentDef*> out;
    for (const auto& def : intents_) {
        if (def.is_global()) {
            out.push_back(&def);
        }
    }
    return out;
}

std::vector<const IntentDef*> Registry::locals(std::string_view state_id) const {
    std::vector<const IntentDef*> out;
    for (const auto& def : intents_) {
        if (!def.is_global() && def.state_scope == state_id) {
            out.push_back(&def);
        }
    }
    return out;
}

std::vector<RegistryProblem> Registry::problems() const {
    std::vector<RegistryProblem> out;
    std::set<std::pair<std::string, std::string>> ids;             // (scope, id)
    std::map<std::pair<std::string, std::string>, std::string> owner;  // (scope, phrase) -> id
    std::set<std::string> global_ids;
    for (const auto& def : intents_) {
        if (def.is_global()) {
            global_ids.insert(def.id);
        }
    }
    for (const auto& def : intents_) {
        if (!ids.emplace(def.state_scope, def.id).second) {
            out.push_back({RegistryProblem::Kind::duplicate_intent, def.id, def.state_scope,
                           "intent defined twice in the same scope"});
        }
        if (!def.is_global() && global_ids.count(def.id) != 0) {
            out.push_back({RegistryProblem::Kind::duplicate_intent, def.id, def.state_scope,
                           "local intent shadows a global intent of the same id"});
        }
        if (def.phrases.empty()) {
            out.push_back({RegistryProblem::Kind::empty_phrase_set, def.id, def.state_scope, "no phrases"});
        }
        for (const auto& phrase : def.phrases) {
            if (phrase.empty()) {
                out.push_back({RegistryProblem::Kind::empty_phrase, def.id, def.state_scope,
                               "phrase normalizes to nothing"});
                continue;
            }
            const auto [it, inserted] = owner.emplace(std::make_pair(def.state_scope, join(phrase)), def.id);
            if (!inserted && it->second != def.id) {
                out.push_back({RegistryProblem::Kind::duplicate_phrase, def.id, def.state_scope,
                               "phrase '" + join(phrase) + "' also belongs to '" + it->second + "'"});
            }
        }
    }
    return out;
}

} // namespace carebot::intent
