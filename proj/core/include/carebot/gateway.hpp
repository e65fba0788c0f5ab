#pragma once

#include "carebot/bundle.hpp"
#include "carebot/content.hpp"
#include "carebot/dialogue.hpp"
#include "carebot/store.hpp"
#include "carebot/therapy.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace carebot::gateway {

struct SessionRequest {
    std::optional<std::string> user_id;  // returning user
    std::string name;                    // registration
    Gender gender = Gender::unspecified;
};

// Decodes {"user_id": "..."} or {"name": "...", "gender": "female"}.
SessionRequest decode_session_request(std::string_view document);

struct SessionHandle {
    std::string session_id;
    std::string user_id;
    std::string response;  // wire document of the entry state

    // {"response": {...}, "session_id": "...", "user_id": "..."}
    std::string to_json() const;
};

struct StateView {
    std::string response;  // bytes of the last emitted payload
    std::string summary;   // JSON: state, slots, turn count, therapy progress
};

// Queue of server-pushed payloads for one subscriber.
class Subscription {
public:
    // Waits up to `timeout` for the next document; nullopt on timeout or close.
    std::optional<std::string> next(std::chrono::milliseconds timeout);
    void close();
    bool closed() const;

private:
    friend class NotificationHub;
    void push(std::string document);

    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<std::string> queue_;
    bool closed_ = false;
};

class NotificationHub {
public:
    std::shared_ptr<Subscription> subscribe(const std::string& session_id);
    // Returns the number of live subscribers reached.
    std::size_t publish(const std::string& session_id, const std::string& document);
    std::vector<std::string> subscribed_sessions() const;
    void close_all();

private:
    mutable std::mutex mutex_;
    std::multimap<std::string, std::weak_ptr<Subscription>> subscribers_;
};

struct ServiceOptions {
    // Milliseconds since the epoch; stamped on events that carry none.
    std::function<std::int64_t()> clock;
};

// Session lifecycle and event ingestion over a bundle and a store. Events on
// one session are applied one at a time; distinct sessions proceed in
// parallel. Every change is durable in the store before a call returns.
class Service {
public:
    // Rebuilds all sessions, profiles and tallies from the store. Throws
    // replay_divergence when a stored log no longer fits the flows.
    Service(Bundle bundle, std::shared_ptr<Store> store, ServiceOptions options = {});

    // Throws unknown_user or validation_error (empty name).
    SessionHandle create_session(const SessionRequest& request);

    // Returns the wire document. Throws unknown_session, malformed_event,
    // unknown_value_tag, or store_failure (the event is then not applied).
    std::string post_event(const std::string& session_id, dialogue::UserEvent event);
    std::string post_event_json(const std::string& session_id, std::string_view document);

    StateView get_state(const std::string& session_id) const;

    // Kinds: sus, ueq, seq, efficacy. Returns the scores as JSON. Throws
    // validation_error naming the offending item, not_found for other kinds.
    std::string submit_instrument(const std::string& session_id, const std::string& kind, std::string_view answers);

    // Throws unknown_item / not_eligible / store_failure.
    content::FeedbackTally submit_feedback(const std::string& session_id, const std::string& item_id, bool helpful);
    // JSON array of tallies for every myth correction.
    std::string feedback_report() const;

    // Throws unknown_section.
    const std::string& section(std::string_view section_id) const;

    std::shared_ptr<Subscription> subscribe(const std::string& session_id);
    // Pushes a greeting notification; returns the subscribers reached.
    std::size_t send_daily_greeting(const std::string& session_id);
    // Greets every session with a live subscriber.
    std::size_t greet_subscribers();

    // Snapshot copies, for tests and tools.
    dialogue::Session session(const std::string& session_id) const;
    UserProfile profile(const std::string& user_id) const;
    std::vector<std::string> session_ids() const;

    const Bundle& bundle() const { return bundle_; }
    const dialogue::Engine& engine() const { return engine_; }
    NotificationHub& notifications() { return hub_; }

private:
    struct SessionSlot {
        mutable std::mutex mutex;
        dialogue::Session session;
        std::string last_response;
    };
    struct UserSlot {
        mutable std::mutex mutex;
        UserProfile profile;
    };

    std::shared_ptr<SessionSlot> find_session(const std::string& session_id) const;
    std::shared_ptr<UserSlot> find_user(const std::string& user_id) const;
    std::int64_t now() const;
    void restore();

    Bundle bundle_;
    dialogue::Engine engine_;
    std::shared_ptr<Store> store_;
    ServiceOptions options_;
    content::FeedbackLedger ledger_;
    NotificationHub hub_;

    mutable std::shared_mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
    std::map<std::string, std::shared_ptr<UserSlot>> users_;
};

// Opaque identifier with 128 bits from the system's random source.
std::string random_id(std::string_view prefix = {});

} // namespace carebot::gateway
