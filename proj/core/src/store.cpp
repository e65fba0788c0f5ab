#include "carebot/store.hpp"

#include "carebot/error.hpp"
#include "carebot/wire.hpp"
#include "wire_json.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <sys/stat.h>
#include <unistd.h>

namespace carebot::gateway {

namespace {

void require_session(const std::set<std::string>& sessions, const std::string& session_id) {
    if (sessions.count(session_id) == 0) {
        throw Error(ErrorCode::unknown_session, "no session '" + session_id + "' in the store", session_id);
    }
}

using detail::json;

json feedback_json(const content::FeedbackEvent& e) {
    return {{"item_id", e.item_id}, {"helpful", e.helpful}, {"session_id", e.session_id}, {"timestamp", e.timestamp}};
}

content::FeedbackEvent feedback_of(const json& j) {
    return {j.at("item_id").get<std::string>(), j.at("helpful").get<bool>(), j.at("session_id").get<std::string>(),
            j.at("timestamp").get<std::int64_t>()};
}

UserProfile profile_of(const json& j, const emotion::EmotionWheel& wheel) {
    return wire::decode_profile(detail::dump(j), wheel);
}

[[noreturn]] void io_failure(const std::string& what) {
    throw Error(ErrorCode::store_failure, what + ": " + std::strerror(errno));
}

} // namespace

std::string encode_profile_record(const UserProfile& profile) {
    return detail::dump({{"type", "profile"}, {"profile", detail::profile_to_json(profile)}});
}

std::string encode_session_record(const std::string& session_id, const UserProfile& initial_profile,
                                  std::int64_t created_at) {
    return detail::dump({{"type", "session"},
                         {"session_id", session_id},
                         {"created_at", created_at},
                         {"profile", detail::profile_to_json(initial_profile)}});
}

std::string encode_turn_record(const std::string& session_id, const dialogue::LogEntry& entry,
                               const UserProfile& profile_after, const std::vector<content::FeedbackEvent>& feedback) {
    json fb = json::array();
    for (const auto& e : feedback) {
        fb.push_back(feedback_json(e));
    }
    return detail::dump({{"type", "turn"},
                         {"session_id", session_id},
                         {"entry", json::parse(wire::encode_log_entry(entry))},
                         {"profile", detail::profile_to_json(profile_after)},
                         {"feedback", std::move(fb)}});
}

std::string encode_feedback_record(const content::FeedbackEvent& event) {
    return detail::dump({{"type", "feedback"}, {"feedback", feedback_json(event)}});
}

std::string encode_instrument_record(const InstrumentRecord& r) {
    return detail::dump({{"type", "instrument"},
                         {"session_id", r.session_id},
                         {"user_id", r.user_id},
                         {"kind", r.kind},
                         {"answers", json::parse(r.answers)},
                         {"scores", json::parse(r.scores)},
                         {"timestamp", r.timestamp}});
}

StoreSnapshot fold_records(const std::vector<std::string>& lines, const emotion::EmotionWheel& wheel,
                           bool tolerate_torn_tail) {
    StoreSnapshot out;
    std::map<std::string, std::size_t> session_index;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            const auto rec = detail::parse_json(lines[i]);
            const auto type = rec.at("type").get<std::string>();
            if (type == "profile") {
                auto p = profile_of(rec.at("profile"), wheel);
                out.profiles[p.user_id] = std::move(p);
            } else if (type == "session") {
                SessionRecord s;
                s.session_id = rec.at("session_id").get<std::string>();
                s.created_at = rec.at("created_at").get<std::int64_t>();
                s.initial_profile = profile_of(rec.at("profile"), wheel);
                if (session_index.count(s.session_id) != 0) {
                    throw Error(ErrorCode::decode_error, "session " + s.session_id + " created twice");
                }
                session_index[s.session_id] = out.sessions.size();
                out.sessions.push_back(std::move(s));
            } else if (type == "turn") {
                const auto id = rec.at("session_id").get<std::string>();
                const auto it = session_index.find(id);
                if (it == session_index.end()) {
                    throw Error(ErrorCode::decode_error, "turn for unknown session " + id);
                }
                out.sessions[it->second].log.push_back(wire::decode_log_entry(detail::dump(rec.at("entry")), wheel));
                auto p = profile_of(rec.at("profile"), wheel);
                out.profiles[p.user_id] = std::move(p);
                for (const auto& fb : rec.at("feedback")) {
                    out.feedback.push_back(feedback_of(fb));
                }
            } else if (type == "feedback") {
                out.feedback.push_back(feedback_of(rec.at("feedback")));
            } else if (type == "instrument") {
                out.instruments.push_back({rec.at("session_id").get<std::string>(),
                                           rec.at("user_id").get<std::string>(), rec.at("kind").get<std::string>(),
                                           detail::dump(rec.at("answers")), detail::dump(rec.at("scores")),
                                           rec.at("timestamp").get<std::int64_t>()});
            } else {
                throw Error(ErrorCode::decode_error, "unknown record type '" + type + "'");
            }
        } catch (const std::exception& e) {
            if (tolerate_torn_tail && i + 1 == lines.size()) {
                break;
            }
            throw Error(ErrorCode::decode_error, "journal record " + std::to_string(i + 1) + ": " + e.what(),
                        std::to_string(i + 1));
        }
    }
    return out;
}

// --- MemoryStore ------------------------------------------------------------

void MemoryStore::write(std::string line) {
    if (failures_.load() > 0 && failures_.fetch_sub(1) > 0) {
        throw Error(ErrorCode::store_failure, "injected store failure");
    }
    std::lock_guard lock(mutex_);
    lines_.push_back(std::move(line));
}

void MemoryStore::put_profile(const UserProfile& profile) { write(encode_profile_record(profile)); }

void MemoryStore::create_session(const std::string& session_id, const UserProfile& initial_profile,
                                 std::int64_t created_at) {
    write(encode_session_record(session_id, initial_profile, created_at));
    std::lock_guard lock(mutex_);
    sessions_.insert(session_id);
}

void MemoryStore::append_turn(const std::string& session_id, const dialogue::LogEntry& entry,
                              const UserProfile& profile_after, const std::vector<content::FeedbackEvent>& feedback) {
    {
        std::lock_guard lock(mutex_);
        require_session(sessions_, session_id);
    }
    write(encode_turn_record(session_id, entry, profile_after, feedback));
}

void MemoryStore::append_feedback(const content::FeedbackEvent& event) { write(encode_feedback_record(event)); }

void MemoryStore::append_instrument(const InstrumentRecord& record) { write(encode_instrument_record(record)); }

StoreSnapshot MemoryStore::load() {
    std::vector<std::string> copy;
    {
        std::lock_guard lock(mutex_);
        copy = lines_;
    }
    return fold_records(copy, emotion::EmotionWheel::standard());
}

std::size_t MemoryStore::record_count() const {
    std::lock_guard lock(mutex_);
    return lines_.size();
}

// --- FileStore --------------------------------------------------------------

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path, bool& torn_tail) {
    std::vector<std::string> lines;
    torn_tail = false;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return lines;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto text = buf.str();
    std::size_t start = 0;
    while (start < text.size()) {
        const auto nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            torn_tail = true;
            break;
        }
        if (nl > start) {
            lines.push_back(text.substr(start, nl - start));
        }
        start = nl + 1;
    }
    return lines;
}

} // namespace

FileStore::FileStore(std::filesystem::path dir, const emotion::EmotionWheel& wheel)
    : dir_(std::move(dir)), path_(dir_ / "journal.jsonl"), wheel_(&wheel) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) {
        throw Error(ErrorCode::store_failure, "cannot create " + dir_.string() + ": " + ec.message());
    }
    // Drop a torn final line so new records start on a clean line.
    if (std::filesystem::exists(path_)) {
        std::ifstream in(path_, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto text = buf.str();
        if (!text.empty() && text.back() != '\n') {
            const auto last = text.rfind('\n');
            std::filesystem::resize_file(path_, last == std::string::npos ? 0 : last + 1);
        }
    }
    bool torn = false;
    for (const auto& session : fold_records(read_lines(path_, torn), *wheel_).sessions) {
        sessions_.insert(session.session_id);
    }
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        io_failure("cannot open " + path_.string());
    }
}

FileStore::~FileStore() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void FileStore::write(const std::string& line) {
    std::string data = line;
    data.push_back('\n');
    std::lock_guard lock(mutex_);
    const auto before = ::lseek(fd_, 0, SEEK_END);
    std::size_t done = 0;
    while (done < data.size()) {
        const auto n = ::write(fd_, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            if (before >= 0) {
                // Best effort; a torn line left behind is dropped on the next open.
                const int rc = ::ftruncate(fd_, before);
                static_cast<void>(rc);
            }
            io_failure("write to " + path_.string() + " failed");
        }
        done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) {
        io_failure("fsync of " + path_.string() + " failed");
    }
}

void FileStore::put_profile(const UserProfile& profile) { write(encode_profile_record(profile)); }

void FileStore::create_session(const std::string& session_id, const UserProfile& initial_profile,
                               std::int64_t created_at) {
    write(encode_session_record(session_id, initial_profile, created_at));
    std::lock_guard lock(mutex_);
    sessions_.insert(session_id);
}

void FileStore::append_turn(const std::string& session_id, const dialogue::LogEntry& entry,
                            const UserProfile& profile_after, const std::vector<content::FeedbackEvent>& feedback) {
    {
        std::lock_guard lock(mutex_);
        require_session(sessions_, session_id);
    }
    write(encode_turn_record(session_id, entry, profile_after, feedback));
}

void FileStore::append_feedback(const content::FeedbackEvent& event) { write(encode_feedback_record(event)); }

void FileStore::append_instrument(const InstrumentRecord& record) { write(encode_instrument_record(record)); }

StoreSnapshot FileStore::load() {
    std::lock_guard lock(mutex_);
    bool torn = false;
    const auto lines = read_lines(path_, torn);
    return fold_records(lines, *wheel_, torn);
}

StoreSnapshot read_journal(const std::filesystem::path& path, const emotion::EmotionWheel& wheel) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::not_found, path.string() + ": no such journal", path.string());
    }
    bool torn = false;
    const auto lines = read_lines(path, torn);
    return fold_records(lines, wheel, torn);
}

} // namespace carebot::gateway
