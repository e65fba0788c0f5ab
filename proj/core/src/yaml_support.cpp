#include "yaml_support.hpp"

#include <fstream>
#include <sstream>

namespace carebot::detail {

namespace {

std::string located(const std::string& source, const YAML::Mark& mark, const std::string& message) {
    std::ostringstream out;
    out << source;
    if (!mark.is_null()) {
        out << ':' << (mark.line + 1) << ':' << (mark.column + 1);
    }
    out << ": " << message;
    return out.str();
}

} // namespace

YamlDoc YamlDoc::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::load_error, path.string() + ": cannot open file");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str(), path.string());
}

YamlDoc YamlDoc::from_string(const std::string& text, std::string source_name) {
    try {
        YAML::Node root = YAML::Load(text);
        if (!root.IsMap()) {
            throw Error(ErrorCode::load_error, source_name + ":1:1: document root must be a mapping");
        }
        return YamlDoc(std::move(root), std::move(source_name));
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::load_error, located(source_name, e.mark, e.msg));
    }
}

void YamlDoc::fail(const YAML::Node& at, const std::string& message) const {
    throw Error(ErrorCode::load_error, located(source_, at.Mark(), message));
}

void YamlDoc::fail_root(const std::string& message) const {
    fail(root_, message);
}

const YAML::Node YamlDoc::require(const YAML::Node& map, const char* key) const {
    const YAML::Node node = map[key];
    if (!node) {
        fail(map, std::string("missing required field '") + key + "'");
    }
    return node;
}

std::string YamlDoc::str(const YAML::Node& node) const {
    if (!node.IsScalar()) {
        fail(node, "expected a scalar value");
    }
    return node.Scalar();
}

std::string YamlDoc::require_str(const YAML::Node& map, const char* key) const {
    return str(require(map, key));
}

std::string YamlDoc::optional_str(const YAML::Node& map, const char* key, std::string fallback) const {
    const YAML::Node node = map[key];
    if (!node || node.IsNull()) {
        return fallback;
    }
    return str(node);
}

std::vector<std::string> YamlDoc::str_list(const YAML::Node& node) const {
    std::vector<std::string> out;
    if (node.IsScalar()) {
        out.push_back(node.Scalar());
        return out;
    }
    expect_seq(node, "list of strings");
    for (const auto& item : node) {
        out.push_back(str(item));
    }
    return out;
}

void YamlDoc::expect_map(const YAML::Node& node, const char* what) const {
    if (!node.IsMap()) {
        fail(node, std::string("expected a mapping for ") + what);
    }
}

void YamlDoc::expect_seq(const YAML::Node& node, const char* what) const {
    if (!node.IsSequence()) {
        fail(node, std::string("expected a sequence for ") + what);
    }
}

} // namespace carebot::detail
