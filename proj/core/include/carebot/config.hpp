#pragma once

#include "carebot/bundle.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace carebot {

enum class StoreKind { file, memory };

struct Config {
    std::string host = "127.0.0.1";
    int port = 8080;
    StoreKind store_kind = StoreKind::file;
    std::filesystem::path store_dir = "carebot-data";
    BundlePaths bundle;
    int greeting_hour = 9;  // local hour for the daily greeting; -1 disables it
};

// Environment lookup; returns nullopt for unset variables.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

// Reads a YAML config file (any key may be omitted), then applies
// CAREBOT_HOST, CAREBOT_PORT, CAREBOT_STORE, CAREBOT_STORE_KIND,
// CAREBOT_FLOWS, CAREBOT_CONTENT, CAREBOT_EMOTIONS, CAREBOT_ACTIONS,
// CAREBOT_INSTRUMENTS and CAREBOT_GREETING_HOUR. Relative fixture paths in
// the file resolve against the file's directory. Throws load_error.
Config load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env = process_env);

} // namespace carebot
