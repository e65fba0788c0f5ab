#pragma once

#include "carebot/content.hpp"
#include "carebot/dialogue.hpp"
#include "carebot/emotion.hpp"
#include "carebot/metrics.hpp"
#include "carebot/therapy.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace carebot {

// Fixture files; unset entries use the built-in copies.
struct BundlePaths {
    std::optional<std::filesystem::path> emotions;
    std::optional<std::filesystem::path> content;
    std::optional<std::filesystem::path> flows;
    std::optional<std::filesystem::path> committed_actions;
    std::optional<std::filesystem::path> instruments;
};

// Everything the engine needs, loaded and cross-checked.
struct Bundle {
    std::shared_ptr<const emotion::EmotionWheel> wheel;
    std::shared_ptr<const content::Catalog> catalog;
    std::shared_ptr<const dialogue::FlowSet> flows;
    std::optional<therapy::TherapyScript> therapy;
    std::shared_ptr<const therapy::CommittedActions> actions;
    std::shared_ptr<const metrics::Instruments> instruments;

    dialogue::Engine engine() const { return dialogue::Engine(flows, *wheel, *catalog); }
};

struct FlowCheck {
    std::shared_ptr<const dialogue::FlowSet> flows;
    std::optional<therapy::TherapyScript> therapy;
    std::vector<dialogue::Diagnostic> diagnostics;
};

// Parses a flow document, compiles its therapy section and validates the
// result against the given wheel and catalog. Throws load_error for
// documents that do not parse.
FlowCheck check_flows(const std::string& yaml, const std::string& source_name, const emotion::EmotionWheel& wheel,
                      const content::Catalog& catalog, const therapy::CommittedActions& actions);

// Throws load_error for unreadable files and validation_error listing the
// diagnostics when the flows do not validate.
Bundle load_bundle(const BundlePaths& paths = {});

const Bundle& standard_bundle();

} // namespace carebot
