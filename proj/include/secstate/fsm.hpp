#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "secstate/aggregation.hpp"
#include "secstate/event.hpp"

namespace secstate {

enum class SecurityState { Secure, AttackSurfaceExpanded, VulnerabilityExposed, Compromised, Protected };

enum class Trigger {
    ChangeDetected,
    ExposureAssessedClean,
    VulnerabilityReachable,
    Exploited,
    MitigationApplied,
    ControlsVerifiedEffective,
    ControlsVerifiedIneffective,
    NoOp,
};

inline constexpr std::array<SecurityState, 5> kAllStates{
    SecurityState::Secure, SecurityState::AttackSurfaceExpanded, SecurityState::VulnerabilityExposed,
    SecurityState::Compromised, SecurityState::Protected};

inline constexpr std::array<Trigger, 8> kAllTriggers{
    Trigger::ChangeDetected,          Trigger::ExposureAssessedClean,     Trigger::VulnerabilityReachable,
    Trigger::Exploited,               Trigger::MitigationApplied,         Trigger::ControlsVerifiedEffective,
    Trigger::ControlsVerifiedIneffective, Trigger::NoOp};

std::string_view to_string(SecurityState s);
std::string_view to_string(Trigger t);
SecurityState parse_security_state(std::string_view text);
Trigger parse_trigger(std::string_view text);

// Total transition function; pairs outside the table are self-loops.
SecurityState transition(SecurityState state, Trigger trigger);

// Machine-readable rendering of the transition table (listed edges only).
json transition_table_json();

struct ClassifierConfig {
    double tau_eff = 0.7;
};

// Maps an event to a trigger for the NF `snapshot` describes. `snapshot` is the
// post-event local snapshot; `baseline_as_e` is the NF's AS_E when it last
// entered Secure.
Trigger classify_event(const Event& event, const MetricSnapshot& snapshot, SecurityState current,
                       double baseline_as_e, const ClassifierConfig& cfg = {});

struct TransitionEntry {
    SimTime time = 0.0;
    SecurityState from = SecurityState::Secure;
    Trigger trigger = Trigger::NoOp;
    SecurityState to = SecurityState::Secure;
    EventId event_id = 0;
    bool operator==(const TransitionEntry&) const = default;
};

json to_json(const TransitionEntry& e);
TransitionEntry transition_entry_from_json(const json& j);

class SecurityStateRecord {
public:
    SecurityStateRecord() = default;
    SecurityStateRecord(NfId nf_id, double baseline_as_e)
        : nf_id_(std::move(nf_id)), baseline_as_e_(baseline_as_e) {}

    const NfId& nf_id() const { return nf_id_; }
    SecurityState current() const { return current_; }
    const std::vector<TransitionEntry>& history() const { return history_; }
    double baseline_as_e() const { return baseline_as_e_; }

    // Advances the state. State changes are always recorded; self-loops only
    // when `record` is set.
    // Re-entering Secure resets the AS_E baseline to `as_e`.
    TransitionEntry apply(SimTime time, Trigger trigger, EventId event_id, double as_e, bool record);

    // Time-ordered and chained (entry[i].to == entry[i+1].from).
    bool history_consistent() const;

    bool operator==(const SecurityStateRecord&) const = default;

private:
    NfId nf_id_;
    SecurityState current_ = SecurityState::Secure;
    std::vector<TransitionEntry> history_;
    double baseline_as_e_ = 0.0;
};

json to_json(const SecurityStateRecord& r);

} // namespace secstate
