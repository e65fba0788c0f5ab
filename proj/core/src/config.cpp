#include "carebot/config.hpp"

#include "carebot/error.hpp"
#include "yaml_support.hpp"

#include <cstdlib>
#include <set>

namespace carebot {

namespace {

int parse_int(const std::string& text, const std::string& what, int lo, int hi) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used == text.size() && v >= lo && v <= hi) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::load_error,
                what + " must be an integer in " + std::to_string(lo) + ".." + std::to_string(hi) + ", got '" +
                    text + "'",
                what);
}

StoreKind store_kind_of(const std::string& text, const std::string& what) {
    if (text == "file") {
        return StoreKind::file;
    }
    if (text == "memory") {
        return StoreKind::memory;
    }
    throw Error(ErrorCode::load_error, what + " must be 'file' or 'memory', got '" + text + "'", what);
}

} // namespace

std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str())) {
        return std::string(v);
    }
    return std::nullopt;
}

Config load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
    Config cfg;
    if (file) {
        const auto doc = detail::YamlDoc::from_file(*file);
        const auto base = file->parent_path();
        const auto& root = doc.root();
        if (root && !root.IsNull()) {
            doc.expect_map(root, "config");
            static const std::set<std::string> known = {"host",     "port",    "store",      "store_kind",
                                                        "flows",    "content", "emotions",   "committed_actions",
                                                        "instruments", "greeting_hour"};
            for (const auto& kv : root) {
                const auto key = kv.first.as<std::string>();
                if (known.count(key) == 0) {
                    doc.fail(kv.first, "unknown config key '" + key + "'");
                }
            }
            const auto path_of = [&](const char* key) -> std::optional<std::filesystem::path> {
                if (!root[key]) {
                    return std::nullopt;
                }
                std::filesystem::path p = doc.str(root[key]);
                return p.is_relative() ? base / p : p;
            };
            if (root["host"]) {
                cfg.host = doc.str(root["host"]);
            }
            if (root["port"]) {
                cfg.port = parse_int(doc.str(root["port"]), "port", 0, 65535);
            }
            if (root["store_kind"]) {
                cfg.store_kind = store_kind_of(doc.str(root["store_kind"]), "store_kind");
            }
            if (auto p = path_of("store")) {
                cfg.store_dir = *p;
            }
            if (root["greeting_hour"]) {
                cfg.greeting_hour = parse_int(doc.str(root["greeting_hour"]), "greeting_hour", -1, 23);
            }
            cfg.bundle.flows = path_of("flows");
            cfg.bundle.content = path_of("content");
            cfg.bundle.emotions = path_of("emotions");
            cfg.bundle.committed_actions = path_of("committed_actions");
            cfg.bundle.instruments = path_of("instruments");
        }
    }

    if (auto v = env("CAREBOT_HOST")) {
        cfg.host = *v;
    }
    if (auto v = env("CAREBOT_PORT")) {
        cfg.port = parse_int(*v, "CAREBOT_PORT", 0, 65535);
    }
    if (auto v = env("CAREBOT_STORE")) {
        cfg.store_dir = *v;
    }
    if (auto v = env("CAREBOT_STORE_KIND")) {
        cfg.store_kind = store_kind_of(*v, "CAREBOT_STORE_KIND");
    }
    if (auto v = env("CAREBOT_GREETING_HOUR")) {
        cfg.greeting_hour = parse_int(*v, "CAREBOT_GREETING_HOUR", -1, 23);
    }
    const auto path_env = [&](const char* name, std::optional<std::filesystem::path>& slot) {
        if (auto v = env(name)) {
            slot = *v;
        }
    };
    path_env("CAREBOT_FLOWS", cfg.bundle.flows);
    path_env("CAREBOT_CONTENT", cfg.bundle.content);
    path_env("CAREBOT_EMOTIONS", cfg.bundle.emotions);
    path_env("CAREBOT_ACTIONS", cfg.bundle.committed_actions);
    path_env("CAREBOT_INSTRUMENTS", cfg.bundle.instruments);
    return cfg;
}

} // namespace carebot
