#include "carebot/bundle.hpp"

#include "carebot/error.hpp"
#include "embedded_data.hpp"
#include "flow_document.hpp"
#include "yaml_support.hpp"

#include <fstream>
#include <sstream>

namespace carebot {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::load_error, path.string() + ": cannot open file", path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

} // namespace

FlowCheck check_flows(const std::string& yaml, const std::string& source_name, const emotion::EmotionWheel& wheel,
                      const content::Catalog& catalog, const therapy::CommittedActions& actions) {
    const auto doc = detail::YamlDoc::from_string(yaml, source_name);
    auto flows = std::make_shared<dialogue::FlowSet>();
    detail::parse_flow_document(doc, *flows);
    FlowCheck out;
    out.therapy = therapy::parse_script(doc);
    if (out.therapy) {
        try {
            therapy::compile(*out.therapy, catalog, actions, *flows);
        } catch (const Error& e) {
            doc.fail(doc.root()["therapy"], e.what());
        }
    }
    out.diagnostics = dialogue::validate_flow(*flows, {&wheel, &catalog});
    out.flows = std::move(flows);
    return out;
}

Bundle load_bundle(const BundlePaths& paths) {
    Bundle b;
    b.wheel = paths.emotions ? std::make_shared<emotion::EmotionWheel>(emotion::EmotionWheel::load(*paths.emotions))
                             : std::make_shared<emotion::EmotionWheel>(emotion::EmotionWheel::standard());
    b.catalog = paths.content ? std::make_shared<content::Catalog>(content::Catalog::load(*paths.content))
                              : std::make_shared<content::Catalog>(content::Catalog::standard());
    b.actions = paths.committed_actions
                    ? std::make_shared<therapy::CommittedActions>(
                          therapy::CommittedActions::load(*paths.committed_actions))
                    : std::make_shared<therapy::CommittedActions>(therapy::CommittedActions::standard());
    b.instruments = paths.instruments
                        ? std::make_shared<metrics::Instruments>(metrics::Instruments::load(*paths.instruments))
                        : std::make_shared<metrics::Instruments>(metrics::Instruments::standard());

    const auto yaml = paths.flows ? read_file(*paths.flows) : std::string(data::flows_yaml);
    const auto name = paths.flows ? paths.flows->string() : std::string("<builtin flows.yaml>");
    auto checked = check_flows(yaml, name, *b.wheel, *b.catalog, *b.actions);
    if (!checked.diagnostics.empty()) {
        std::string message = name + ": flows do not validate";
        for (const auto& d : checked.diagnostics) {
            message += "\n  " + d.to_string();
        }
        throw Error(ErrorCode::validation_error, message, checked.diagnostics.front().to_string());
    }
    b.flows = std::move(checked.flows);
    b.therapy = std::move(checked.therapy);
    return b;
}

const Bundle& standard_bundle() {
    static const Bundle bundle = load_bundle();
    return bundle;
}

} // namespace carebot
