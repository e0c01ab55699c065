#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "secstate/errors.hpp"
#include "secstate/simulator.hpp"

namespace secstate {

// Reader-side copy of the run log. Appends come from the engine's writer;
// any number of readers may query or wait concurrently.
class LogStore {
public:
    void append(const json& record);
    // Replaces the contents (scenario reload or replay start).
    void reset(std::vector<json> records = {});

    std::uint64_t last_seq() const;
    std::size_t size() const;
    // Increments on every reset so clients can detect a new run.
    std::uint64_t run() const;

    // Records with seq > `after` whose type is in `types` (all when empty).
    std::vector<json> since(std::uint64_t after, const std::vector<std::string>& types = {}) const;
    // Like since(), but blocks up to `timeout` while nothing matches.
    std::vector<json> wait(std::uint64_t after, const std::vector<std::string>& types,
                           std::chrono::milliseconds timeout) const;
    // Wakes all waiters, e.g. on shutdown.
    void interrupt();

    std::optional<json> load_record() const;
    // Latest snapshot record for `scope` with time <= t (highest seq wins).
    std::optional<json> snapshot_at(const std::string& scope, SimTime t) const;
    // {nf_id, current, history} rebuilt from transition records with time <= t.
    json fsm_at(const NfId& nf_id, SimTime t) const;
    std::string to_jsonl() const;

private:
    mutable std::mutex mu_;
    mutable std::condition_variable cv_;
    std::vector<json> records_;
    std::uint64_t run_ = 0;
    std::uint64_t interrupts_ = 0;
};

// Immutable view handed to readers. Rebuilt by the writer after each command.
struct PublishedState {
    bool loaded = false;
    bool replay = false;
    SimTime now = 0.0;
    Network network;
    SimConfig config;
    HierarchySnapshot hierarchy;
    std::map<NfId, json> fsm;  // {nf_id, current, history}
    std::vector<Intent> intents;
    std::vector<ViolationReport> reports;
    std::uint64_t last_seq = 0;
};

// FNV-1a over the canonical JSON of a published state, hex encoded.
std::string state_hash(const PublishedState& state);

struct EngineOptions {
    // Overrides applied on top of every loaded scenario's config.
    std::optional<ScoreWeights> weights;
    std::optional<double> scan_period;
    std::optional<double> tau_eff;
    // When set, the run log is mirrored to this file, one line per record.
    std::string log_path;
};

// Owns the simulator. Mutations are queued and executed one at a time on a
// dedicated writer thread; readers only touch published state and the log.
class Engine {
public:
    explicit Engine(EngineOptions options = {});
    ~Engine();
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    // Commands. Each blocks until the writer has executed it and rethrows
    // any secstate::Error it raised.
    json load_scenario(Scenario scenario);
    json load_replay(RunLog log);
    json step();
    json run_until(SimTime until);
    json inject(Event ev);
    json create_intent(Intent intent);
    json update_intent(Intent intent);
    json deactivate_intent(std::string id);

    std::shared_ptr<const PublishedState> published() const;
    const LogStore& log() const { return log_; }
    LogStore& log() { return log_; }

private:
    json submit(std::function<json()> command);
    void writer_loop();
    void publish();
    Simulator& live();
    void on_record(const json& record);

    EngineOptions options_;
    LogStore log_;
    std::ofstream log_file_;

    // Writer-owned.
    std::unique_ptr<Simulator> sim_;
    bool replay_ = false;

    mutable std::mutex published_mu_;
    std::shared_ptr<const PublishedState> published_;

    std::mutex queue_mu_;
    std::condition_variable queue_cv_;
    std::deque<std::packaged_task<json()>> queue_;
    bool stopping_ = false;
    std::thread writer_;
};

struct ApiResponse {
    int status = 200;
    json body;
};

// Transport-independent request router. The HTTP server is a thin adapter.
class Api {
public:
    explicit Api(Engine& engine) : engine_(engine) {}

    ApiResponse handle(const std::string& method, const std::string& path,
                       const std::map<std::string, std::string>& query, const std::string& body);

    static int status_for(ErrorCode code);

private:
    ApiResponse get_state(const std::string& scope, const std::map<std::string, std::string>& query);
    ApiResponse get_fsm(const std::string& nf, const std::map<std::string, std::string>& query);
    ApiResponse get_reports(const std::map<std::string, std::string>& query);
    ApiResponse get_intents();

    Engine& engine_;
};

// Blocking HTTP/JSON server over an Api.
class HttpServer {
public:
    explicit HttpServer(Api& api);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds to `port` (0 picks a free port) and returns the bound port.
    int bind(const std::string& host, int port);
    // Serves until stop() is called.
    void serve();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace secstate
