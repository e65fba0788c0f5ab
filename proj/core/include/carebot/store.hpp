#pragma once

#include "carebot/content.hpp"
#include "carebot/dialogue.hpp"
#include "carebot/emotion.hpp"
#include "carebot/profile.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

namespace carebot::gateway {

struct SessionRecord {
    std::string session_id;
    UserProfile initial_profile;
    std::int64_t created_at = 0;
    std::vector<dialogue::LogEntry> log;
};

struct InstrumentRecord {
    std::string session_id;
    std::string user_id;
    std::string kind;
    std::string answers;  // canonical JSON
    std::string scores;   // canonical JSON
    std::int64_t timestamp = 0;

    friend bool operator==(const InstrumentRecord&, const InstrumentRecord&) = default;
};

// Everything a store holds, in write order.
struct StoreSnapshot {
    std::map<std::string, UserProfile> profiles;  // latest version per user
    std::vector<SessionRecord> sessions;
    std::vector<content::FeedbackEvent> feedback;  // standalone and in-dialogue
    std::vector<InstrumentRecord> instruments;
};

// Durable storage. Every method returns only once the data is durable and
// throws Error(store_failure) otherwise; a failed call leaves no trace that
// load() would return. append_turn throws unknown_session for a session that
// was never created.
class Store {
public:
    virtual ~Store() = default;

    virtual void put_profile(const UserProfile& profile) = 0;
    virtual void create_session(const std::string& session_id, const UserProfile& initial_profile,
                                std::int64_t created_at) = 0;
    // One dialogue turn: the log entry, the user's profile after it and the
    // feedback it produced are written as a unit.
    virtual void append_turn(const std::string& session_id, const dialogue::LogEntry& entry,
                             const UserProfile& profile_after,
                             const std::vector<content::FeedbackEvent>& feedback) = 0;
    virtual void append_feedback(const content::FeedbackEvent& event) = 0;
    virtual void append_instrument(const InstrumentRecord& record) = 0;

    virtual StoreSnapshot load() = 0;
};

// Keeps records in the same encoded form the file store writes, so both
// behave alike. fail_writes() makes the next writes throw, for tests.
class MemoryStore : public Store {
public:
    void put_profile(const UserProfile& profile) override;
    void create_session(const std::string& session_id, const UserProfile& initial_profile,
                        std::int64_t created_at) override;
    void append_turn(const std::string& session_id, const dialogue::LogEntry& entry, const UserProfile& profile_after,
                     const std::vector<content::FeedbackEvent>& feedback) override;
    void append_feedback(const content::FeedbackEvent& event) override;
    void append_instrument(const InstrumentRecord& record) override;
    StoreSnapshot load() override;

    void fail_writes(int count) { failures_ = count; }
    std::size_t record_count() const;

private:
    void write(std::string line);

    mutable std::mutex mutex_;
    std::vector<std::string> lines_;
    std::set<std::string> sessions_;
    std::atomic<int> failures_{0};
};

// Append-only journal of JSON lines in <dir>/journal.jsonl, flushed with
// fsync before a write returns. A torn last line (crash mid-write) is
// dropped when the store opens; any other unreadable line makes the
// constructor throw decode_error.
class FileStore : public Store {
public:
    explicit FileStore(std::filesystem::path dir,
                       const emotion::EmotionWheel& wheel = emotion::EmotionWheel::standard());
    ~FileStore() override;

    FileStore(const FileStore&) = delete;
    FileStore& operator=(const FileStore&) = delete;

    void put_profile(const UserProfile& profile) override;
    void create_session(const std::string& session_id, const UserProfile& initial_profile,
                        std::int64_t created_at) override;
    void append_turn(const std::string& session_id, const dialogue::LogEntry& entry, const UserProfile& profile_after,
                     const std::vector<content::FeedbackEvent>& feedback) override;
    void append_feedback(const content::FeedbackEvent& event) override;
    void append_instrument(const InstrumentRecord& record) override;
    StoreSnapshot load() override;

    const std::filesystem::path& journal_path() const { return path_; }

private:
    void write(const std::string& line);

    std::filesystem::path dir_;
    std::filesystem::path path_;
    const emotion::EmotionWheel* wheel_;
    std::mutex mutex_;
    std::set<std::string> sessions_;
    int fd_ = -1;
};

// Record encoders shared by both stores; exposed for tests and tools.
std::string encode_profile_record(const UserProfile& profile);
std::string encode_session_record(const std::string& session_id, const UserProfile& initial_profile,
                                  std::int64_t created_at);
std::string encode_turn_record(const std::string& session_id, const dialogue::LogEntry& entry,
                               const UserProfile& profile_after, const std::vector<content::FeedbackEvent>& feedback);
std::string encode_feedback_record(const content::FeedbackEvent& event);
std::string encode_instrument_record(const InstrumentRecord& record);

// Folds journal lines into a snapshot. Throws decode_error on a corrupt
// line unless it is the last one and `tolerate_torn_tail` is set.
StoreSnapshot fold_records(const std::vector<std::string>& lines, const emotion::EmotionWheel& wheel,
                           bool tolerate_torn_tail = false);

// Reads a journal file without opening it for writing.
StoreSnapshot read_journal(const std::filesystem::path& path,
                           const emotion::EmotionWheel& wheel = emotion::EmotionWheel::standard());

} // namespace carebot::gateway
