#include "secstate/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace secstate {

namespace {

constexpr double kForever = std::numeric_limits<double>::infinity();

bool type_matches(const json& record, const std::vector<std::string>& types) {
    if (types.empty()) return true;
    const auto& t = record.at("type").get_ref<const std::string&>();
    return std::find(types.begin(), types.end(), t) != types.end();
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(sep, start);
        if (end == std::string_view::npos) end = text.size();
        if (end > start) out.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

double parse_number(const std::string& text, const std::string& name) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw Error(ErrorCode::UsageError, "query parameter '" + name + "' is not a number: '" + text + "'");
    }
    return value;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& name) {
    std::uint64_t value = 0;
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::UsageError, "query parameter '" + name + "' is not a non-negative integer");
    }
    return value;
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("request body: ") + e.what());
    }
}

json error_body(const Error& e) { return {{"error", to_string(e.code())}, {"message", e.what()}}; }

// NFs covered by a scope, in id order.
std::vector<NfId> scope_members(const Scope& scope, const Network& net) {
    switch (scope.level) {
        case ScopeLevel::Local: return {scope.id};
        case ScopeLevel::Domain: return net.domain(scope.id).member_nf_ids;
        case ScopeLevel::Network: break;
    }
    std::vector<NfId> ids;
    for (const auto& f : net.functions()) ids.push_back(f.id);
    return ids;
}

Scope resolve_scope(const std::string& text, const PublishedState& state) {
    const Scope scope = Scope::parse(text);
    if (state.hierarchy.find(scope) == nullptr) {
        throw Error(ErrorCode::UnknownScope, "no scope '" + text + "' in the loaded network");
    }
    return scope;
}

} // namespace

// ---------------------------------------------------------------- LogStore

void LogStore::append(const json& record) {
    {
        std::lock_guard lock(mu_);
        records_.push_back(record);
    }
    cv_.notify_all();
}

void LogStore::reset(std::vector<json> records) {
    {
        std::lock_guard lock(mu_);
        records_ = std::move(records);
        ++run_;
    }
    cv_.notify_all();
}

std::uint64_t LogStore::last_seq() const {
    std::lock_guard lock(mu_);
    return records_.empty() ? 0 : records_.back().at("seq").get<std::uint64_t>();
}

std::size_t LogStore::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

std::uint64_t LogStore::run() const {
    std::lock_guard lock(mu_);
    return run_;
}

std::vector<json> LogStore::since(std::uint64_t after, const std::vector<std::string>& types) const {
    std::lock_guard lock(mu_);
    std::vector<json> out;
    // seq is dense and starts at 1, so records_[after] is the first candidate.
    for (std::size_t i = std::min<std::size_t>(after, records_.size()); i < records_.size(); ++i) {
        if (type_matches(records_[i], types)) out.push_back(records_[i]);
    }
    return out;
}

std::vector<json> LogStore::wait(std::uint64_t after, const std::vector<std::string>& types,
                                 std::chrono::milliseconds timeout) const {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    std::unique_lock lock(mu_);
    const std::uint64_t interrupts = interrupts_;
    std::size_t scanned = std::min<std::size_t>(after, records_.size());
    const std::uint64_t run = run_;
    for (;;) {
        if (run_ != run) scanned = std::min<std::size_t>(after, records_.size());
        std::vector<json> out;
        for (std::size_t i = scanned; i < records_.size(); ++i) {
            if (type_matches(records_[i], types)) out.push_back(records_[i]);
        }
        if (!out.empty()) return out;
        scanned = records_.size();
        if (interrupts_ != interrupts) return out;
        if (cv_.wait_until(lock, deadline) == std::cv_status::timeout) return {};
    }
}

void LogStore::interrupt() {
    {
        std::lock_guard lock(mu_);
        ++interrupts_;
    }
    cv_.notify_all();
}

std::optional<json> LogStore::load_record() const {
    std::lock_guard lock(mu_);
    for (const auto& r : records_) {
        if (r.at("type") == "load") return std::optional<json>(std::in_place, r);
    }
    return std::nullopt;
}

std::optional<json> LogStore::snapshot_at(const std::string& scope, SimTime t) const {
    std::lock_guard lock(mu_);
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
        if (it->at("type") != "snapshot") continue;
        if (it->at("time").get<double>() > t) continue;
        if (it->at("scope").get_ref<const std::string&>() == scope) return std::optional<json>(std::in_place, *it);
    }
    return std::nullopt;
}

json LogStore::fsm_at(const NfId& nf_id, SimTime t) const {
    std::lock_guard lock(mu_);
    json history = json::array();
    std::string current = std::string(to_string(SecurityState::Secure));
    for (const auto& r : records_) {
        if (r.at("type") != "transition" || r.at("nf_id") != nf_id) continue;
        if (r.at("time").get<double>() > t) break;
        history.push_back(to_json(transition_entry_from_json(r)));
        current = r.at("to").get<std::string>();
    }
    return {{"nf_id", nf_id}, {"current", current}, {"history", std::move(history)}};
}

std::string LogStore::to_jsonl() const {
    std::lock_guard lock(mu_);
    std::string out;
    for (const auto& r : records_) {
        out += record_line(r);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------- PublishedState

std::string state_hash(const PublishedState& s) {
    json doc;
    doc["loaded"] = s.loaded;
    doc["replay"] = s.replay;
    doc["now"] = s.now;
    doc["network"] = serialize(s.network);
    doc["config"] = to_json(s.config);
    json snaps = json::array();
    for (const auto* snap : s.hierarchy.all()) snaps.push_back(to_json(*snap));
    doc["hierarchy"] = std::move(snaps);
    doc["fsm"] = s.fsm;
    json intents = json::array();
    for (const auto& i : s.intents) intents.push_back(to_json(i));
    doc["intents"] = std::move(intents);
    json reports = json::array();
    for (const auto& r : s.reports) reports.push_back(to_json(r));
    doc["reports"] = std::move(reports);
    doc["last_seq"] = s.last_seq;

    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : doc.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ------------------------------------------------------------------ Engine

Engine::Engine(EngineOptions options) : options_(std::move(options)) {
    if (!options_.log_path.empty()) {
        log_file_.open(options_.log_path, std::ios::binary | std::ios::trunc);
        if (!log_file_) throw Error(ErrorCode::ValidationError, "cannot write '" + options_.log_path + "'");
    }
    published_ = std::make_shared<const PublishedState>();
    writer_ = std::thread([this] { writer_loop(); });
}

Engine::~Engine() {
    {
        std::lock_guard lock(queue_mu_);
        stopping_ = true;
    }
    queue_cv_.notify_all();
    log_.interrupt();
    writer_.join();
}

void Engine::writer_loop() {
    for (;;) {
        std::packaged_task<json()> task;
        {
            std::unique_lock lock(queue_mu_);
            queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) return;
            task = std::move(queue_.front());
            queue_.pop_front();
        }
        task();
    }
}

json Engine::submit(std::function<json()> command) {
    std::packaged_task<json()> task([this, command = std::move(command)] {
        json result = command();
        publish();
        return result;
    });
    auto future = task.get_future();
    {
        std::lock_guard lock(queue_mu_);
        if (stopping_) throw Error(ErrorCode::NotLoaded, "engine is shutting down");
        queue_.push_back(std::move(task));
    }
    queue_cv_.notify_one();
    return future.get();
}

std::shared_ptr<const PublishedState> Engine::published() const {
    std::lock_guard lock(published_mu_);
    return published_;
}

Simulator& Engine::live() {
    if (replay_) throw Error(ErrorCode::ReadOnly, "the service is replaying a persisted log");
    if (!sim_) throw Error(ErrorCode::NotLoaded, "no scenario loaded");
    return *sim_;
}

void Engine::on_record(const json& record) {
    log_.append(record);
    if (log_file_.is_open()) {
        log_file_ << record_line(record) << '\n';
        log_file_.flush();
    }
}

void Engine::publish() {
    auto state = std::make_shared<PublishedState>();
    if (sim_) {
        state->loaded = true;
        state->now = sim_->now();
        state->network = sim_->network();
        state->config = sim_->config();
        state->hierarchy = sim_->hierarchy();
        // Same shape as the log-derived view so live and replay answers match.
        for (const auto& [id, rec] : sim_->fsm()) {
            json view = to_json(rec);
            view.erase("baseline_as_e");
            state->fsm.emplace(id, std::move(view));
        }
        state->intents = sim_->intents().intents();
        state->reports = sim_->last_reports();
    } else if (replay_) {
        state->loaded = true;
        state->replay = true;
        const auto load = log_.load_record();
        state->network = load_topology(load->at("network"));
        state->config = sim_config_from_json(load->at("config"));
        const auto records = log_.since(0);
        state->now = records.empty() ? 0.0 : records.back().at("time").get<double>();
        std::map<std::string, Intent> by_id;
        std::vector<std::string> order;
        SimTime report_time = -1.0;
        for (const auto& r : records) {
            const auto& type = r.at("type").get_ref<const std::string&>();
            if (type == "intent") {
                Intent intent = intent_from_json(r.at("intent"));
                if (!by_id.count(intent.intent_id)) order.push_back(intent.intent_id);
                by_id[intent.intent_id] = std::move(intent);
            } else if (type == "report") {
                const double t = r.at("time").get<double>();
                if (t != report_time) state->reports.clear();
                report_time = t;
                state->reports.push_back(report_from_json(r));
            }
        }
        for (const auto& id : order) state->intents.push_back(by_id.at(id));
        for (const auto& f : state->network.functions()) {
            if (auto snap = log_.snapshot_at(Scope::local(f.id).to_string(), kForever)) {
                state->hierarchy.locals.push_back(snapshot_from_json(*snap));
            }
            state->fsm.emplace(f.id, log_.fsm_at(f.id, kForever));
        }
        for (const auto& d : state->network.domains()) {
            if (auto snap = log_.snapshot_at(Scope::domain(d.id).to_string(), kForever)) {
                state->hierarchy.domains.push_back(snapshot_from_json(*snap));
            }
        }
        if (auto snap = log_.snapshot_at(Scope::network().to_string(), kForever)) {
            state->hierarchy.network = snapshot_from_json(*snap);
        }
    }
    state->last_seq = log_.last_seq();
    std::lock_guard lock(published_mu_);
    published_ = std::move(state);
}

json Engine::load_scenario(Scenario scenario) {
    return submit([this, scenario = std::move(scenario)]() mutable {
        if (options_.weights) scenario.config.weights = *options_.weights;
        if (options_.scan_period) scenario.config.scan.scan_period = *options_.scan_period;
        if (options_.tau_eff) scenario.config.tau_eff = *options_.tau_eff;
        // Dry construction first so a bad scenario leaves the running one intact.
        Simulator{scenario};
        log_.reset();
        if (log_file_.is_open()) {
            log_file_.close();
            log_file_.open(options_.log_path, std::ios::binary | std::ios::trunc);
        }
        replay_ = false;
        sim_ = std::make_unique<Simulator>(std::move(scenario), [this](const json& r) { on_record(r); });
        return json{{"loaded", true}, {"run", log_.run()}, {"now", sim_->now()}, {"last_seq", log_.last_seq()}};
    });
}

json Engine::load_replay(RunLog log) {
    return submit([this, log = std::move(log)]() mutable {
        const auto& records = log.records();
        if (records.empty() || records.front().at("type") != "load") {
            throw Error(ErrorCode::ValidationError, "run log does not start with a load record");
        }
        std::uint64_t expected = 1;
        for (const auto& r : records) {
            if (!r.contains("seq") || r.at("seq") != expected) {
                throw Error(ErrorCode::ValidationError,
                            "run log sequence broken at record " + std::to_string(expected));
            }
            ++expected;
        }
        load_topology(records.front().at("network"));
        sim_.reset();
        replay_ = true;
        log_.reset(records);
        return json{{"loaded", true}, {"replay", true}, {"run", log_.run()}, {"last_seq", log_.last_seq()}};
    });
}

json Engine::step() {
    return submit([this] {
        auto result = live().step();
        json out{{"now", sim_->now()}, {"event", to_json(result.event)}, {"last_seq", log_.last_seq()}};
        out["transition"] = result.transition ? to_json(*result.transition) : json(nullptr);
        json reports = json::array();
        for (const auto& r : result.reports) reports.push_back(to_json(r));
        out["reports"] = std::move(reports);
        out["rejected"] = result.rejected ? json(*result.rejected) : json(nullptr);
        return out;
    });
}

json Engine::run_until(SimTime until) {
    return submit([this, until] {
        auto& sim = live();
        if (!(until >= sim.now())) {
            throw Error(ErrorCode::UsageError, "cannot run backwards from t=" + std::to_string(sim.now()));
        }
        sim.run_until(until);
        return json{{"now", sim.now()}, {"last_seq", log_.last_seq()}};
    });
}

json Engine::inject(Event ev) {
    return submit([this, ev = std::move(ev)]() mutable {
        auto& sim = live();
        const EventId id = sim.inject(std::move(ev));
        return json{{"event_id", id}, {"time", sim.now()}};
    });
}

json Engine::create_intent(Intent intent) {
    return submit([this, intent = std::move(intent)]() mutable {
        auto& sim = live();
        const std::string id = intent.intent_id;
        sim.create_intent(std::move(intent));
        const Intent& stored = *sim.intents().find(id);
        json children = json::array();
        for (const auto& c : decompose_intent(stored, sim.network())) children.push_back(to_json(c));
        return json{{"intent", to_json(stored)}, {"children", std::move(children)}};
    });
}

json Engine::update_intent(Intent intent) {
    return submit([this, intent = std::move(intent)] {
        auto& sim = live();
        sim.update_intent(intent);
        json children = json::array();
        for (const auto& c : decompose_intent(intent, sim.network())) children.push_back(to_json(c));
        return json{{"intent", to_json(intent)}, {"children", std::move(children)}};
    });
}

json Engine::deactivate_intent(std::string id) {
    return submit([this, id = std::move(id)] {
        auto& sim = live();
        sim.deactivate_intent(id);
        return json{{"intent", to_json(*sim.intents().find(id))}};
    });
}

// --------------------------------------------------------------------- Api

int Api::status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::ValidationError:
        case ErrorCode::WeightsNotNormalized:
        case ErrorCode::OutOfRange:
        case ErrorCode::UnknownEventKind:
        case ErrorCode::UsageError:
            return 400;
        case ErrorCode::UnknownId:
        case ErrorCode::UnknownScope:
            return 404;
        case ErrorCode::NotLoaded:
        case ErrorCode::ReadOnly:
        case ErrorCode::ExhaustedScenario:
            return 409;
        default:
            return 422;
    }
}

ApiResponse Api::handle(const std::string& method, const std::string& path,
                        const std::map<std::string, std::string>& query, const std::string& body) {
    const auto parts = split(path, '/');
    const auto n = parts.size();
    auto is = [&](std::initializer_list<const char*> want) {
        if (want.size() != n) return false;
        std::size_t i = 0;
        for (const char* w : want) {
            if (*w != '*' && parts[i] != w) return false;
            ++i;
        }
        return true;
    };
    try {
        if (method == "GET") {
            if (is({"health"})) {
                auto s = engine_.published();
                return {200,
                        {{"loaded", s->loaded},
                         {"replay", s->replay},
                         {"now", s->now},
                         {"run", engine_.log().run()},
                         {"last_seq", s->last_seq},
                         {"state_hash", state_hash(*s)}}};
            }
            if (is({"state", "*"})) return get_state(parts[1], query);
            if (is({"fsm-table"})) return {200, transition_table_json()};
            if (is({"fsm", "*"})) return get_fsm(parts[1], query);
            if (is({"reports"})) return get_reports(query);
            if (is({"intents"})) return get_intents();
        } else if (method == "POST") {
            if (is({"scenario"})) return {201, engine_.load_scenario(load_scenario(parse_body(body)))};
            if (is({"events"})) {
                json doc = parse_body(body);
                if (doc.is_object()) {
                    doc.erase("id");
                    doc["time"] = 0.0;
                }
                return {202, engine_.inject(event_from_json(doc))};
            }
            if (is({"intents"})) return {201, engine_.create_intent(intent_from_json(parse_body(body)))};
            if (is({"sim", "step"})) return {200, engine_.step()};
            if (is({"sim", "run"})) {
                json doc = parse_body(body.empty() ? "{}" : body);
                if (!doc.is_object() || !doc.contains("until") || !doc.at("until").is_number()) {
                    throw Error(ErrorCode::UsageError, "body must be {\"until\": <time>}");
                }
                return {200, engine_.run_until(doc.at("until").get<double>())};
            }
            if (is({"intents", "*", "deactivate"})) return {200, engine_.deactivate_intent(parts[1])};
        } else if (method == "PUT") {
            if (is({"intents", "*"})) {
                json doc = parse_body(body);
                if (doc.is_object() && !doc.contains("id")) doc["id"] = parts[1];
                Intent intent = intent_from_json(doc);
                if (intent.intent_id != parts[1]) {
                    throw Error(ErrorCode::ValidationError, "intent id in body does not match the path");
                }
                return {200, engine_.update_intent(std::move(intent))};
            }
        } else if (method == "DELETE") {
            if (is({"intents", "*"})) return {200, engine_.deactivate_intent(parts[1])};
        }
        return {404, {{"error", "NotFound"}, {"message", method + " " + path}}};
    } catch (const Error& e) {
        return {status_for(e.code()), error_body(e)};
    } catch (const json::exception& e) {
        return {400, {{"error", "ValidationError"}, {"message", e.what()}}};
    }
}

ApiResponse Api::get_state(const std::string& scope_text, const std::map<std::string, std::string>& query) {
    auto state = engine_.published();
    if (!state->loaded) throw Error(ErrorCode::NotLoaded, "no scenario loaded");
    const Scope scope = resolve_scope(scope_text, *state);
    const auto members = scope_members(scope, state->network);
    json out{{"scope", scope.to_string()}};
    json fsm = json::array();
    if (auto at = query.find("at"); at != query.end()) {
        const double t = parse_number(at->second, "at");
        auto snap = engine_.log().snapshot_at(scope.to_string(), t);
        if (!snap) throw Error(ErrorCode::OutOfRange, "no snapshot at or before t=" + at->second);
        out["at"] = t;
        out["snapshot"] = std::move(*snap);
        for (const auto& id : members) fsm.push_back(engine_.log().fsm_at(id, t));
    } else {
        out["now"] = state->now;
        out["snapshot"] = to_json(*state->hierarchy.find(scope));
        for (const auto& id : members) fsm.push_back(state->fsm.at(id));
    }
    out["fsm"] = std::move(fsm);
    return {200, std::move(out)};
}

ApiResponse Api::get_fsm(const std::string& nf, const std::map<std::string, std::string>& query) {
    auto state = engine_.published();
    if (!state->loaded) throw Error(ErrorCode::NotLoaded, "no scenario loaded");
    auto it = state->fsm.find(nf);
    if (it == state->fsm.end()) throw Error(ErrorCode::UnknownScope, "no network function '" + nf + "'");
    if (auto at = query.find("at"); at != query.end()) {
        return {200, engine_.log().fsm_at(nf, parse_number(at->second, "at"))};
    }
    return {200, it->second};
}

ApiResponse Api::get_reports(const std::map<std::string, std::string>& query) {
    std::uint64_t since = 0;
    if (auto it = query.find("since"); it != query.end()) since = parse_unsigned(it->second, "since");
    std::vector<std::string> types{"report", "snapshot"};
    if (auto it = query.find("types"); it != query.end()) {
        types = it->second == "all" ? std::vector<std::string>{} : split(it->second, ',');
    }
    std::uint64_t wait_ms = 0;
    if (auto it = query.find("wait_ms"); it != query.end()) {
        wait_ms = std::min<std::uint64_t>(parse_unsigned(it->second, "wait_ms"), 60000);
    }
    auto records = wait_ms > 0 ? engine_.log().wait(since, types, std::chrono::milliseconds(wait_ms))
                               : engine_.log().since(since, types);
    return {200,
            {{"run", engine_.log().run()}, {"last_seq", engine_.log().last_seq()}, {"records", std::move(records)}}};
}

ApiResponse Api::get_intents() {
    auto state = engine_.published();
    json list = json::array();
    for (const auto& intent : state->intents) {
        json item = to_json(intent);
        json children = json::array();
        if (state->loaded && intent.active) {
            for (const auto& c : decompose_intent(intent, state->network)) children.push_back(to_json(c));
        }
        item["children"] = std::move(children);
        list.push_back(std::move(item));
    }
    return {200, {{"intents", std::move(list)}}};
}

} // namespace secstate
