#include "secstate/fsm.hpp"

#include "secstate/errors.hpp"

namespace secstate {

namespace {

struct Edge {
    SecurityState from;
    Trigger trigger;
    SecurityState to;
};

using S = SecurityState;
using T = Trigger;

constexpr std::array<Edge, 8> kEdges{{
    {S::Secure, T::ChangeDetected, S::AttackSurfaceExpanded},
    {S::AttackSurfaceExpanded, T::ExposureAssessedClean, S::Secure},
    {S::AttackSurfaceExpanded, T::VulnerabilityReachable, S::VulnerabilityExposed},
    {S::VulnerabilityExposed, T::Exploited, S::Compromised},
    {S::VulnerabilityExposed, T::MitigationApplied, S::Protected},
    {S::Compromised, T::MitigationApplied, S::Protected},
    {S::Protected, T::ControlsVerifiedEffective, S::Secure},
    {S::Protected, T::ControlsVerifiedIneffective, S::VulnerabilityExposed},
}};

constexpr std::array<std::string_view, 5> kStateNames{
    "Secure", "AttackSurfaceExpanded", "VulnerabilityExposed", "Compromised", "Protected"};

constexpr std::array<std::string_view, 8> kTriggerNames{
    "ChangeDetected",    "ExposureAssessedClean",     "VulnerabilityReachable",      "Exploited",
    "MitigationApplied", "ControlsVerifiedEffective", "ControlsVerifiedIneffective", "NoOp"};

} // namespace

std::string_view to_string(SecurityState s) { return kStateNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(Trigger t) { return kTriggerNames[static_cast<std::size_t>(t)]; }

SecurityState parse_security_state(std::string_view text) {
    for (std::size_t i = 0; i < kStateNames.size(); ++i) {
        if (kStateNames[i] == text) return static_cast<SecurityState>(i);
    }
    throw Error(ErrorCode::ValidationError, "unknown security state '" + std::string(text) + "'");
}

Trigger parse_trigger(std::string_view text) {
    for (std::size_t i = 0; i < kTriggerNames.size(); ++i) {
        if (kTriggerNames[i] == text) return static_cast<Trigger>(i);
    }
    throw Error(ErrorCode::ValidationError, "unknown trigger '" + std::string(text) + "'");
}

SecurityState transition(SecurityState state, Trigger trigger) {
    for (const auto& e : kEdges) {
        if (e.from == state && e.trigger == trigger) return e.to;
    }
    return state;
}

json transition_table_json() {
    json states = json::array();
    for (auto s : kAllStates) states.push_back(to_string(s));
    json triggers = json::array();
    for (auto t : kAllTriggers) triggers.push_back(to_string(t));
    json edges = json::array();
    for (const auto& e : kEdges) {
        edges.push_back({{"from", to_string(e.from)}, {"trigger", to_string(e.trigger)}, {"to", to_string(e.to)}});
    }
    return {{"states", std::move(states)},
            {"triggers", std::move(triggers)},
            {"initial", to_string(SecurityState::Secure)},
            {"edges", std::move(edges)},
            {"unlisted", "self-loop"}};
}

Trigger classify_event(const Event& event, const MetricSnapshot& snapshot, SecurityState current,
                       double baseline_as_e, const ClassifierConfig& cfg) {
    switch (event.kind) {
        case EventKind::ConfigChanged:
        case EventKind::TopologyChanged:
        case EventKind::UEAttached:
        case EventKind::UEDetached:
        case EventKind::CellAdded:
        case EventKind::CellRemoved:
        case EventKind::FeatureAdded:
            return Trigger::ChangeDetected;
        case EventKind::VulnerabilityDetected: {
            const auto* v = std::get_if<VulnerabilityReport>(&event.payload);
            return v != nullptr && v->exploitable ? Trigger::Exploited : Trigger::VulnerabilityReachable;
        }
        case EventKind::AttackDetected:
            return snapshot.scope == Scope::local(event.target.nf) ? Trigger::Exploited : Trigger::NoOp;
        case EventKind::ControlApplied:
            return Trigger::MitigationApplied;
        case EventKind::ScanTick:
            if (current == SecurityState::Protected) {
                return snapshot.sce >= cfg.tau_eff ? Trigger::ControlsVerifiedEffective
                                                   : Trigger::ControlsVerifiedIneffective;
            }
            return snapshot.as_e <= baseline_as_e ? Trigger::ExposureAssessedClean : Trigger::NoOp;
    }
    throw Error(ErrorCode::UnknownEventKind, "event kind " + std::to_string(static_cast<int>(event.kind)));
}

json to_json(const TransitionEntry& e) {
    return {{"time", e.time},
            {"from", to_string(e.from)},
            {"trigger", to_string(e.trigger)},
            {"to", to_string(e.to)},
            {"event_id", e.event_id}};
}

TransitionEntry transition_entry_from_json(const json& j) {
    return {j.at("time").get<double>(), parse_security_state(j.at("from").get<std::string>()),
            parse_trigger(j.at("trigger").get<std::string>()), parse_security_state(j.at("to").get<std::string>()),
            j.at("event_id").get<EventId>()};
}

TransitionEntry SecurityStateRecord::apply(SimTime time, Trigger trigger, EventId event_id, double as_e,
                                           bool record) {
    TransitionEntry entry{time, current_, trigger, transition(current_, trigger), event_id};
    if (entry.to == SecurityState::Secure && entry.from != SecurityState::Secure) baseline_as_e_ = as_e;
    current_ = entry.to;
    if (record || entry.from != entry.to) history_.push_back(entry);
    return entry;
}

bool SecurityStateRecord::history_consistent() const {
    SecurityState expected = SecurityState::Secure;
    SimTime last = 0.0;
    for (const auto& e : history_) {
        if (e.from != expected || e.time < last || e.to != transition(e.from, e.trigger)) return false;
        expected = e.to;
        last = e.time;
    }
    return expected == current_;
}

json to_json(const SecurityStateRecord& r) {
    json history = json::array();
    for (const auto& e : r.history()) history.push_back(to_json(e));
    return {{"nf_id", r.nf_id()},
            {"current", to_string(r.current())},
            {"baseline_as_e", r.baseline_as_e()},
            {"history", std::move(history)}};
}

} // namespace secstate
