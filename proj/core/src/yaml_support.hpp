#pragma once

// Shared helpers for the YAML fixture loaders. Every failure is reported as
// a load_error carrying "<source>:<line>:<column>: <message>".

#include "carebot/error.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <string>
#include <vector>

namespace carebot::detail {

class YamlDoc {
public:
    static YamlDoc from_file(const std::filesystem::path& path);
    static YamlDoc from_string(const std::string& text, std::string source_name);

    const YAML::Node& root() const { return root_; }
    const std::string& source() const { return source_; }

    [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const;
    [[noreturn]] void fail_root(const std::string& message) const;

    const YAML::Node require(const YAML::Node& map, const char* key) const;
    std::string str(const YAML::Node& node) const;
    std::string require_str(const YAML::Node& map, const char* key) const;
    std::string optional_str(const YAML::Node& map, const char* key, std::string fallback = {}) const;
    std::vector<std::string> str_list(const YAML::Node& node) const;
    void expect_map(const YAML::Node& node, const char* what) const;
    void expect_seq(const YAML::Node& node, const char* what) const;

private:
    YamlDoc(YAML::Node root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

    YAML::Node root_;
    std::string source_;
};

} // namespace carebot::detail
