#include "script.hpp"
#include "transcript.hpp"

#include "carebot/bundle.hpp"
#include "carebot/config.hpp"
#include "carebot/error.hpp"
#include "carebot/gateway.hpp"
#include "carebot/http_server.hpp"
#include "carebot/store.hpp"
#include "carebot/wire.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace carebot;

std::atomic<bool> stop_requested{false};

extern "C" void on_signal(int) { stop_requested = true; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::not_found, path + ": cannot open", path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int serve(const std::optional<std::string>& config_file, const std::optional<std::string>& host,
          std::optional<int> port, bool memory) {
    auto cfg = load_config(config_file ? std::optional<std::filesystem::path>(*config_file) : std::nullopt);
    if (host) {
        cfg.host = *host;
    }
    if (port) {
        cfg.port = *port;
    }
    if (memory) {
        cfg.store_kind = StoreKind::memory;
    }
    auto bundle = load_bundle(cfg.bundle);
    std::shared_ptr<gateway::Store> store;
    if (cfg.store_kind == StoreKind::file) {
        store = std::make_shared<gateway::FileStore>(cfg.store_dir, *bundle.wheel);
    } else {
        store = std::make_shared<gateway::MemoryStore>();
    }
    gateway::Service service(std::move(bundle), store);
    http::Server server(service);
    const int bound = server.bind(cfg.host, cfg.port);
    std::cout << "carebot listening on http://" << cfg.host << ":" << bound << " ("
              << service.session_ids().size() << " sessions restored)" << std::endl;

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::thread runner([&] { server.run(); });
    int last_greeting_day = -1;
    while (!stop_requested) {
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
        if (cfg.greeting_hour < 0) {
            continue;
        }
        const auto t = std::time(nullptr);
        std::tm local{};
        localtime_r(&t, &local);
        if (local.tm_hour == cfg.greeting_hour && local.tm_yday != last_greeting_day) {
            last_greeting_day = local.tm_yday;
            service.greet_subscribers();
        }
    }
    server.stop();
    runner.join();
    return 0;
}

int validate(const std::string& flow_file, const BundlePaths& paths) {
    const auto wheel = paths.emotions ? emotion::EmotionWheel::load(*paths.emotions) : emotion::EmotionWheel::standard();
    const auto catalog = paths.content ? content::Catalog::load(*paths.content) : content::Catalog::standard();
    const auto actions = paths.committed_actions ? therapy::CommittedActions::load(*paths.committed_actions)
                                                 : therapy::CommittedActions::standard();
    const auto check = check_flows(read_file(flow_file), flow_file, wheel, catalog, actions);
    for (const auto& d : check.diagnostics) {
        std::cout << flow_file << ": " << d.to_string() << "\n";
    }
    if (!check.diagnostics.empty()) {
        std::cout << check.diagnostics.size() << " problem(s)\n";
        return 1;
    }
    std::size_t states = 0;
    for (const auto& [id, flow] : check.flows->flows) {
        states += flow.states.size();
    }
    std::cout << flow_file << ": ok (" << check.flows->flows.size() << " flows, " << states << " states"
              << (check.therapy ? ", therapy" : "") << ")\n";
    return 0;
}

// Re-runs one session log and prints it; returns false on divergence.
bool replay_session(const dialogue::Engine& engine, const std::string& session_id, const UserProfile& profile,
                    const std::vector<dialogue::LogEntry>& log) {
    auto turn = engine.start(session_id, profile);
    tools::print_payload(std::cout, turn.response);
    auto session = turn.session;
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto& entry = log[i];
        tools::print_event(std::cout, entry.event);
        try {
            turn = engine.advance(session, entry.event);
        } catch (const Error& e) {
            std::cout << "!! turn " << i + 1 << " fails: " << e.what() << "\n";
            return false;
        }
        tools::print_payload(std::cout, turn.response);
        if (turn.session.current != entry.state) {
            std::cout << "!! turn " << i + 1 << " ends in " << turn.session.current.qualified() << ", log says "
                      << entry.state.qualified() << "\n";
            return false;
        }
        if (turn.response != entry.response) {
            std::cout << "!! turn " << i + 1 << " response differs from the logged one\n";
            return false;
        }
        session = std::move(turn.session);
    }
    std::cout << "-- " << log.size() << " turns, final state " << session.current.qualified() << "\n";
    return true;
}

int replay(const std::string& path, const std::optional<std::string>& only_session, const std::string& name,
           const BundlePaths& paths) {
    const auto bundle = load_bundle(paths);
    const auto engine = bundle.engine();
    std::filesystem::path file = path;
    if (std::filesystem::is_directory(file)) {
        file /= "journal.jsonl";
    }
    const auto text = read_file(file.string());
    const auto first_line = text.substr(0, text.find('\n'));

    bool ok = true;
    if (first_line.find("\"type\"") != std::string::npos) {
        const auto snapshot = gateway::read_journal(file, *bundle.wheel);
        std::size_t shown = 0;
        for (const auto& s : snapshot.sessions) {
            if (only_session && s.session_id != *only_session) {
                continue;
            }
            ++shown;
            std::cout << "== session " << s.session_id << " (user " << s.initial_profile.user_id << ", "
                      << s.initial_profile.name << ")\n";
            ok = replay_session(engine, s.session_id, s.initial_profile, s.log) && ok;
        }
        if (only_session && shown == 0) {
            throw Error(ErrorCode::unknown_session, "no session '" + *only_session + "' in " + file.string(),
                        *only_session);
        }
        std::cout << "== " << shown << " session(s), " << snapshot.feedback.size() << " feedback event(s), "
                  << snapshot.instruments.size() << " instrument response(s)\n";
    } else {
        // One encoded log entry per line.
        std::vector<dialogue::LogEntry> log;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) {
                log.push_back(wire::decode_log_entry(line, *bundle.wheel));
            }
        }
        UserProfile profile;
        profile.user_id = "replay";
        profile.name = name;
        ok = replay_session(engine, "replay", profile, log);
    }
    return ok ? 0 : 1;
}

int simulate(const std::optional<std::string>& script_file, const std::string& name, const std::string& gender,
             const BundlePaths& paths) {
    auto bundle = load_bundle(paths);
    const auto wheel = bundle.wheel;
    const auto steps =
        tools::parse_script(script_file ? read_file(*script_file) : std::string(tools::default_script), *wheel);
    const auto g = gender_from_string(gender);
    if (!g) {
        throw Error(ErrorCode::validation_error, "gender must be female, male or unspecified", "gender");
    }

    auto store = std::make_shared<gateway::MemoryStore>();
    std::int64_t clock = 1'600'000'000'000;
    gateway::Service service(std::move(bundle), store, {[&clock] { return clock += 1000; }});
    const auto handle = service.create_session({std::nullopt, name, *g});
    tools::print_payload(std::cout, wire::deserialize(handle.response));

    for (const auto& step : steps) {
        switch (step.kind) {
        case tools::ScriptStep::Kind::event: {
            tools::print_event(std::cout, step.event);
            tools::print_payload(std::cout, wire::deserialize(service.post_event(handle.session_id, step.event)));
            break;
        }
        case tools::ScriptStep::Kind::expect: {
            const auto current = service.session(handle.session_id).current.qualified();
            if (current != step.argument) {
                std::cout << "!! line " << step.line << ": expected " << step.argument << ", in " << current << "\n";
                return 1;
            }
            break;
        }
        case tools::ScriptStep::Kind::instrument:
            std::cout << "user> (" << step.argument << " answers " << step.body << ")\n";
            std::cout << "      scores: " << service.submit_instrument(handle.session_id, step.argument, step.body)
                      << "\n";
            break;
        }
    }
    std::cout << "-- summary " << service.get_state(handle.session_id).summary << "\n";
    return 0;
}

void add_fixture_options(CLI::App* cmd, BundlePaths& paths, bool with_flows) {
    const auto opt = [cmd](const char* name, std::optional<std::filesystem::path>& slot, const char* what) {
        cmd->add_option_function<std::string>(
               name, [&slot](const std::string& v) { slot = v; }, what)
            ->check(CLI::ExistingFile);
    };
    if (with_flows) {
        opt("--flows", paths.flows, "Flow definitions (YAML)");
    }
    opt("--content", paths.content, "Verified content and value vocabulary (YAML)");
    opt("--emotions", paths.emotions, "Emotion taxonomy (YAML)");
    opt("--actions", paths.committed_actions, "Committed action suggestions (YAML)");
    opt("--instruments", paths.instruments, "Questionnaire item tables (YAML)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"carebot: multimodal support assistant"};
    app.require_subcommand(1);

    BundlePaths paths;

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP gateway");
    std::optional<std::string> config_file;
    std::optional<std::string> host;
    std::optional<int> port;
    bool memory = false;
    serve_cmd->add_option("-c,--config", config_file, "Config file (YAML)")->check(CLI::ExistingFile);
    serve_cmd->add_option("--host", host, "Listen address");
    serve_cmd->add_option("-p,--port", port, "Listen port (0 picks a free one)");
    serve_cmd->add_flag("--memory", memory, "Keep everything in memory");

    auto* validate_cmd = app.add_subcommand("validate", "Check a flow file");
    std::string flow_file;
    validate_cmd->add_option("flow-file", flow_file, "Flow definitions (YAML)")->required()->check(CLI::ExistingFile);
    add_fixture_options(validate_cmd, paths, false);

    auto* replay_cmd = app.add_subcommand("replay", "Replay a session journal and print each turn");
    std::string log_path;
    std::optional<std::string> only_session;
    std::string name = "Guest";
    replay_cmd->add_option("log", log_path, "Store directory, journal.jsonl, or a file of log entries")
        ->required()
        ->check(CLI::ExistingPath);
    replay_cmd->add_option("-s,--session", only_session, "Replay only this session");
    replay_cmd->add_option("--name", name, "User name for a plain log");
    add_fixture_options(replay_cmd, paths, true);

    auto* simulate_cmd = app.add_subcommand("simulate", "Run a scripted conversation");
    std::optional<std::string> script_file;
    std::string gender = "unspecified";
    simulate_cmd->add_option("-s,--script", script_file, "Script file (default: built-in journey)")
        ->check(CLI::ExistingFile);
    simulate_cmd->add_option("--name", name, "User name");
    simulate_cmd->add_option("--gender", gender, "female, male or unspecified");
    add_fixture_options(simulate_cmd, paths, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) {
            return serve(config_file, host, port, memory);
        }
        if (*validate_cmd) {
            return validate(flow_file, paths);
        }
        if (*replay_cmd) {
            return replay(log_path, only_session, name, paths);
        }
        return simulate(script_file, name, gender, paths);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return 2;
    }
}
