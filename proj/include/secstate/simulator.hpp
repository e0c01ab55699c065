#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "secstate/aggregation.hpp"
#include "secstate/event.hpp"
#include "secstate/fsm.hpp"
#include "secstate/intent.hpp"
#include "secstate/model.hpp"
#include "secstate/vuln.hpp"

namespace secstate {

struct SimConfig {
    ScanConfig scan;
    ScoreWeights weights;
    double tau_eff = 0.7;

    void validate() const;
    bool operator==(const SimConfig& o) const {
        return scan.scan_period == o.scan.scan_period &&
               scan.time_to_patch_limit == o.scan.time_to_patch_limit && weights == o.weights &&
               tau_eff == o.tau_eff;
    }
};

json to_json(const SimConfig& cfg);
// Missing keys keep their defaults.
SimConfig sim_config_from_json(const json& j, SimConfig base = {});

struct Scenario {
    Network network;
    std::vector<Event> events;  // sorted by (time, id)
    SimConfig config;
    std::vector<Intent> intents;
    std::uint64_t seed = 0;
};

// Scenario document: topology keys plus `events`, `intents`, `config`, `seed`.
Scenario load_scenario(const json& document);
Scenario load_scenario_text(std::string_view text);
Scenario load_scenario_file(const std::string& path);
json serialize(const Scenario& scenario);

// Structural check plus a dry run of every event against the evolving model.
// Returns one diagnostic per violation; empty when the scenario is valid.
std::vector<std::string> validate_scenario_text(std::string_view text);

// Deterministic model mutation for one event. Throws UnknownTarget,
// CapacityExceeded or ValidationError; the input is left untouched on error.
Network apply_event(Network net, const Event& ev, const ScanConfig& cfg = {});
void apply_event_in_place(Network& net, const Event& ev, const ScanConfig& cfg = {});

// Append-only JSON-lines log. Every record carries a monotonically increasing
// `seq`, a `type` (load, intent, event, rejected, transition, snapshot,
// report) and the simulated `time`.
class RunLog {
public:
    using Observer = std::function<void(const json& record)>;

    std::uint64_t append(json record);
    const std::vector<json>& records() const { return records_; }
    std::uint64_t last_seq() const { return records_.empty() ? 0 : records_.back().at("seq").get<std::uint64_t>(); }

    std::string to_jsonl() const;
    void write(const std::string& path) const;
    static RunLog from_jsonl(std::string_view text);
    static RunLog read(const std::string& path);

    void set_observer(Observer observer) { observer_ = std::move(observer); }

private:
    std::vector<json> records_;
    Observer observer_;
};

std::string record_line(const json& record);

struct StepResult {
    Event event;
    std::optional<TransitionEntry> transition;
    std::vector<ViolationReport> reports;
    // Set when the event failed to apply; the model is unchanged.
    std::optional<std::string> rejected;
};

class Simulator {
public:
    explicit Simulator(Scenario scenario, RunLog::Observer observer = {});

    SimTime now() const { return now_; }
    const Network& network() const { return network_; }
    const SimConfig& config() const { return config_; }
    const HierarchySnapshot& hierarchy() const { return hierarchy_; }
    const std::map<NfId, SecurityStateRecord>& fsm() const { return fsm_; }
    const SecurityStateRecord& fsm(std::string_view nf_id) const;
    const RunLog& log() const { return log_; }
    const IntentRegistry& intents() const { return intents_; }
    const std::vector<ViolationReport>& last_reports() const { return last_reports_; }
    std::uint64_t seed() const { return seed_; }

    // Events (scenario, injected, or scan ticks) at or before `horizon` exist.
    bool has_pending(SimTime horizon) const;
    // Processes the earliest pending item; ScanTicks are generated every scan
    // period. An event that fails to apply is logged as `rejected` and
    // reported in the result. Throws ExhaustedScenario when nothing is due at or before the
    // horizon set by run_until (unbounded otherwise).
    StepResult step();
    void run_until(SimTime until);

    // Queues an event at the current simulation time and returns its id.
    EventId inject(Event ev);

    void create_intent(Intent intent);
    void update_intent(const Intent& intent);
    void deactivate_intent(std::string_view intent_id);

private:
    struct QueueKey {
        SimTime time;
        EventId id;
        auto operator<=>(const QueueKey&) const = default;
    };

    SimTime tick_time(std::uint64_t cycle) const;
    void expand_ticks_if_due();
    void log_snapshots(const NfId& target);
    void log_intent(std::string_view action, const Intent& intent);

    Network network_;
    SimConfig config_;
    IntentRegistry intents_;
    std::uint64_t seed_ = 0;

    std::map<QueueKey, Event> queue_;
    EventId next_id_ = 1;
    std::uint64_t next_cycle_ = 1;
    std::size_t ticks_outstanding_ = 0;
    std::optional<SimTime> horizon_;
    SimTime now_ = 0.0;

    HierarchySnapshot hierarchy_;
    std::map<std::string, MetricSnapshot> last_logged_;
    std::map<NfId, SecurityStateRecord> fsm_;
    std::vector<ViolationReport> last_reports_;
    RunLog log_;
};

// Replays `scenario` up to `until` and returns the complete log.
RunLog run(Scenario scenario, SimTime until);

} // namespace secstate
