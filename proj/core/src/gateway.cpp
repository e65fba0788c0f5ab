#include "carebot/gateway.hpp"

#include "carebot/error.hpp"
#include "carebot/metrics.hpp"
#include "carebot/text.hpp"
#include "carebot/wire.hpp"
#include "wire_json.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace carebot::gateway {

namespace {

using detail::json;

std::int64_t system_millis() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

[[noreturn]] void invalid(const std::string& message, const std::string& subject) {
    throw Error(ErrorCode::validation_error, message, subject);
}

std::vector<int> int_list(const json& body, const std::string& key) {
    const auto it = body.find(key);
    if (it == body.end() || !it->is_array()) {
        invalid("'" + key + "' must be an array of integers", key);
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& v = (*it)[i];
        if (!v.is_number_integer()) {
            invalid("'" + key + "'[" + std::to_string(i) + "] is not an integer", key + "/" + std::to_string(i));
        }
        out.push_back(v.get<int>());
    }
    return out;
}

json scores_for(const std::string& kind, const json& body, const metrics::Instruments& inst) {
    if (kind == "sus") {
        const double score = metrics::sus_score(int_list(body, "answers"), inst.sus);
        return {{"score", score}, {"grade", metrics::to_string(metrics::sus_grade(score))}};
    }
    if (kind == "ueq") {
        json scales = json::object();
        for (const auto& [name, value] : metrics::ueq_score(int_list(body, "answers"), inst.ueq).by_name()) {
            scales[name] = value;
        }
        return {{"scales", std::move(scales)}};
    }
    if (kind == "seq") {
        const auto it = body.find("answers");
        if (it == body.end() || !it->is_object()) {
            invalid("'answers' must map each dimension to its answers", "answers");
        }
        std::map<std::string, std::vector<int>> answers;
        for (const auto& [dim, values] : it->items()) {
            answers[dim] = int_list(*it, dim);
        }
        json dims = json::object();
        for (const auto& [name, value] : metrics::seq_score(answers, inst.seq).by_name()) {
            dims[name] = value;
        }
        return {{"dimensions", std::move(dims)}};
    }
    if (kind == "efficacy") {
        metrics::EfficacyInput input;
        input.skill_items = int_list(body, "skill_items");
        const auto it = body.find("monthly_activity_count");
        if (it == body.end() || !it->is_number_integer()) {
            invalid("'monthly_activity_count' must be an integer", "monthly_activity_count");
        }
        input.monthly_activity_count = it->get<long>();
        const metrics::EfficacyThresholds thresholds;
        const double score = metrics::efficacy_score(input, thresholds, inst.skill_index);
        return {{"score", score},
                {"group", metrics::to_string(metrics::efficacy_group_for_score(score, thresholds))}};
    }
    throw Error(ErrorCode::not_found, "unknown instrument '" + kind + "'", kind);
}

class StoreJournal : public content::FeedbackJournal {
public:
    explicit StoreJournal(Store& store) : store_(&store) {}
    void append_feedback(const content::FeedbackEvent& event) override { store_->append_feedback(event); }

private:
    Store* store_;
};

} // namespace

std::string random_id(std::string_view prefix) {
    static thread_local std::random_device device;
    std::string out(prefix);
    char buf[9];
    for (int i = 0; i < 4; ++i) {
        std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(device()));
        out += buf;
    }
    return out;
}

SessionRequest decode_session_request(std::string_view document) {
    const auto body = detail::parse_json(document);
    if (!body.is_object()) {
        throw Error(ErrorCode::decode_error, "session request must be an object");
    }
    SessionRequest req;
    for (const auto& [key, value] : body.items()) {
        if (key == "user_id") {
            if (!value.is_string()) {
                invalid("'user_id' must be a string", "user_id");
            }
            req.user_id = value.get<std::string>();
        } else if (key == "name") {
            if (!value.is_string()) {
                invalid("'name' must be a string", "name");
            }
            req.name = value.get<std::string>();
        } else if (key == "gender") {
            const auto g = value.is_string() ? gender_from_string(value.get<std::string>()) : std::nullopt;
            if (!g) {
                invalid("'gender' must be female, male or unspecified", "gender");
            }
            req.gender = *g;
        } else {
            invalid("unknown field '" + key + "'", key);
        }
    }
    return req;
}

std::string SessionHandle::to_json() const {
    return detail::dump({{"session_id", session_id}, {"user_id", user_id}, {"response", json::parse(response)}});
}

// --- notifications ----------------------------------------------------------

std::optional<std::string> Subscription::next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) {
        return std::nullopt;
    }
    auto doc = std::move(queue_.front());
    queue_.pop_front();
    return doc;
}

void Subscription::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool Subscription::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

void Subscription::push(std::string document) {
    {
        std::lock_guard lock(mutex_);
        queue_.push_back(std::move(document));
    }
    cv_.notify_all();
}

std::shared_ptr<Subscription> NotificationHub::subscribe(const std::string& session_id) {
    auto sub = std::make_shared<Subscription>();
    std::lock_guard lock(mutex_);
    subscribers_.emplace(session_id, sub);
    return sub;
}

std::size_t NotificationHub::publish(const std::string& session_id, const std::string& document) {
    std::lock_guard lock(mutex_);
    std::size_t reached = 0;
    auto [it, end] = subscribers_.equal_range(session_id);
    while (it != end) {
        auto sub = it->second.lock();
        if (!sub || sub->closed()) {
            it = subscribers_.erase(it);
            continue;
        }
        sub->push(document);
        ++reached;
        ++it;
    }
    return reached;
}

std::vector<std::string> NotificationHub::subscribed_sessions() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, weak] : subscribers_) {
        const auto sub = weak.lock();
        if (sub && !sub->closed() && (out.empty() || out.back() != id)) {
            out.push_back(id);
        }
    }
    return out;
}

void NotificationHub::close_all() {
    std::lock_guard lock(mutex_);
    for (const auto& [id, weak] : subscribers_) {
        if (auto sub = weak.lock()) {
            sub->close();
        }
    }
    subscribers_.clear();
}

// --- service ----------------------------------------------------------------

Service::Service(Bundle bundle, std::shared_ptr<Store> store, ServiceOptions options)
    : bundle_(std::move(bundle)),
      engine_(bundle_.engine()),
      store_(std::move(store)),
      options_(std::move(options)),
      ledger_(*bundle_.catalog) {
    if (!store_) {
        throw Error(ErrorCode::store_failure, "no store configured");
    }
    if (!options_.clock) {
        options_.clock = system_millis;
    }
    restore();
}

void Service::restore() {
    auto snapshot = store_->load();
    for (auto& [id, profile] : snapshot.profiles) {
        auto slot = std::make_shared<UserSlot>();
        slot->profile = profile;
        users_[id] = std::move(slot);
    }
    for (auto& rec : snapshot.sessions) {
        auto slot = std::make_shared<SessionSlot>();
        slot->session = engine_.replay(rec.log, rec.session_id, rec.initial_profile);
        const auto user = users_.find(rec.initial_profile.user_id);
        if (user != users_.end()) {
            slot->session.profile = user->second->profile;
        }
        slot->last_response = rec.log.empty()
                                  ? wire::serialize(engine_.start(rec.session_id, rec.initial_profile).response)
                                  : wire::serialize(rec.log.back().response);
        sessions_[rec.session_id] = std::move(slot);
    }
    for (const auto& fb : snapshot.feedback) {
        ledger_.record(fb, nullptr);
    }
}

std::int64_t Service::now() const { return options_.clock(); }

std::shared_ptr<Service::SessionSlot> Service::find_session(const std::string& session_id) const {
    std::shared_lock lock(registry_mutex_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        throw Error(ErrorCode::unknown_session, "no session '" + session_id + "'", session_id);
    }
    return it->second;
}

std::shared_ptr<Service::UserSlot> Service::find_user(const std::string& user_id) const {
    std::shared_lock lock(registry_mutex_);
    const auto it = users_.find(user_id);
    if (it == users_.end()) {
        throw Error(ErrorCode::unknown_user, "no user '" + user_id + "'", user_id);
    }
    return it->second;
}

SessionHandle Service::create_session(const SessionRequest& request) {
    std::shared_ptr<UserSlot> user;
    UserProfile profile;
    if (request.user_id) {
        user = find_user(*request.user_id);
        std::lock_guard lock(user->mutex);
        profile = user->profile;
    } else {
        const auto name = trim(request.name);
        if (name.empty()) {
            invalid("registration needs a non-empty name", "name");
        }
        profile.user_id = random_id("u-");
        profile.name = name;
        profile.gender = request.gender;
        store_->put_profile(profile);
        user = std::make_shared<UserSlot>();
        user->profile = profile;
        std::unique_lock lock(registry_mutex_);
        users_[profile.user_id] = user;
    }

    const auto session_id = random_id("s-");
    auto turn = engine_.start(session_id, profile);
    auto document = wire::serialize(turn.response);
    store_->create_session(session_id, profile, now());

    auto slot = std::make_shared<SessionSlot>();
    slot->session = std::move(turn.session);
    slot->last_response = document;
    {
        std::unique_lock lock(registry_mutex_);
        sessions_[session_id] = std::move(slot);
    }
    return {session_id, profile.user_id, std::move(document)};
}

std::string Service::post_event(const std::string& session_id, dialogue::UserEvent event) {
    const auto slot = find_session(session_id);
    if (event.timestamp == 0) {
        event.timestamp = now();
    }
    std::lock_guard session_lock(slot->mutex);
    const auto user = find_user(slot->session.profile.user_id);
    std::lock_guard user_lock(user->mutex);

    auto current = slot->session;
    current.profile = user->profile;
    auto turn = engine_.advance(current, event);
    auto document = wire::serialize(turn.response);
    store_->append_turn(session_id, turn.session.event_log.back(), turn.session.profile, turn.feedback);

    user->profile = turn.session.profile;
    slot->session = std::move(turn.session);
    slot->last_response = document;
    for (const auto& fb : turn.feedback) {
        ledger_.record(fb, nullptr);
    }
    return document;
}

std::string Service::post_event_json(const std::string& session_id, std::string_view document) {
    find_session(session_id);
    return post_event(session_id, wire::decode_event(document, *bundle_.wheel));
}

StateView Service::get_state(const std::string& session_id) const {
    const auto slot = find_session(session_id);
    std::lock_guard lock(slot->mutex);
    const auto& s = slot->session;
    json summary = {{"session_id", s.session_id},
                    {"user_id", s.profile.user_id},
                    {"state", s.current.qualified()},
                    {"slots", detail::slots_to_json(s.slots)},
                    {"turns", s.event_log.size()}};
    if (bundle_.therapy) {
        const auto t = therapy::therapy_state(s, *bundle_.therapy);
        summary["therapy"] = {{"step_index", t.step_index}, {"completed", t.completed}, {"active", t.active}};
    }
    return {slot->last_response, detail::dump(summary)};
}

std::string Service::submit_instrument(const std::string& session_id, const std::string& kind,
                                       std::string_view answers) {
    const auto slot = find_session(session_id);
    std::string user_id;
    {
        std::lock_guard lock(slot->mutex);
        user_id = slot->session.profile.user_id;
    }
    const auto body = detail::parse_json(answers);
    if (!body.is_object()) {
        invalid("instrument answers must be an object", kind);
    }
    json scores;
    try {
        scores = scores_for(kind, body, *bundle_.instruments);
    } catch (const Error& e) {
        switch (e.code()) {
        case ErrorCode::wrong_length:
        case ErrorCode::invalid_answer_range:
        case ErrorCode::missing_dimension:
            invalid(e.what(), e.subject());
        default:
            throw;
        }
    }
    InstrumentRecord record{session_id, user_id, kind, detail::dump(body), detail::dump(scores), now()};
    store_->append_instrument(record);
    return record.scores;
}

content::FeedbackTally Service::submit_feedback(const std::string& session_id, const std::string& item_id,
                                                bool helpful) {
    find_session(session_id);
    StoreJournal journal(*store_);
    return ledger_.record({item_id, helpful, session_id, now()}, &journal);
}

std::string Service::feedback_report() const {
    json out = json::array();
    for (const auto& t : ledger_.all()) {
        out.push_back({{"item_id", t.item_id}, {"helpful", t.helpful_count}, {"not_helpful", t.not_helpful_count}});
    }
    return detail::dump(out);
}

const std::string& Service::section(std::string_view section_id) const {
    return bundle_.catalog->section_document(bundle_.catalog->get_section(section_id).id);
}

std::shared_ptr<Subscription> Service::subscribe(const std::string& session_id) {
    find_session(session_id);
    return hub_.subscribe(session_id);
}

std::size_t Service::send_daily_greeting(const std::string& session_id) {
    const auto slot = find_session(session_id);
    response::TemplateSpec spec;
    response::BuildContext ctx;
    ctx.wheel = bundle_.wheel.get();
    {
        std::lock_guard lock(slot->mutex);
        const auto user = find_user(slot->session.profile.user_id);
        std::lock_guard user_lock(user->mutex);
        spec.header = "Good morning, " + user->profile.name + "!";
        ctx.available_intents = engine_.available_intents(slot->session.current);
    }
    spec.body = "How are you feeling today?";
    if (ctx.available_intents.count("open_emotions") != 0) {
        spec.buttons.push_back({"Share how I feel", "open_emotions"});
    }
    auto payload = response::build_response(spec, ctx);
    payload.notification = true;
    return hub_.publish(session_id, wire::serialize(payload));
}

std::size_t Service::greet_subscribers() {
    std::size_t reached = 0;
    for (const auto& id : hub_.subscribed_sessions()) {
        reached += send_daily_greeting(id);
    }
    return reached;
}

dialogue::Session Service::session(const std::string& session_id) const {
    const auto slot = find_session(session_id);
    std::lock_guard lock(slot->mutex);
    auto out = slot->session;
    out.profile = profile(out.profile.user_id);
    return out;
}

UserProfile Service::profile(const std::string& user_id) const {
    const auto user = find_user(user_id);
    std::lock_guard lock(user->mutex);
    return user->profile;
}

std::vector<std::string> Service::session_ids() const {
    std::shared_lock lock(registry_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, slot] : sessions_) {
        out.push_back(id);
    }
    return out;
}

} // namespace carebot::gateway
