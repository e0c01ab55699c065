#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "secstate/aggregation.hpp"
#include "secstate/model.hpp"

namespace secstate {

using EventId = std::uint64_t;

enum class EventKind {
    UEAttached,
    UEDetached,
    CellAdded,
    CellRemoved,
    ConfigChanged,
    FeatureAdded,
    TopologyChanged,
    VulnerabilityDetected,
    AttackDetected,
    ControlApplied,
    ScanTick,
};

std::string_view to_string(EventKind kind);
// Throws UnknownEventKind.
EventKind parse_event_kind(std::string_view text);

struct EventTarget {
    NfId nf;
    std::string entry_point;  // empty unless the event addresses one entry point
    bool operator==(const EventTarget&) const = default;
};

// UEAttached / UEDetached. Attackers count towards both counters.
struct UeChange {
    std::int64_t count = 1;
    bool potential_attacker = false;
    bool operator==(const UeChange&) const = default;
};

// CellAdded: a new entry point; CellRemoved uses the target entry point.
struct EntryPointAdded {
    EntryPoint entry_point;
    bool operator==(const EntryPointAdded&) const = default;
};

struct ConfigChange {
    std::string rule_id;
    int noncompliant_attributes = 0;
    bool operator==(const ConfigChange&) const = default;
};

// FeatureAdded: exposes more data items on the target entry point and/or
// brings up a new entry point.
struct FeatureChange {
    std::optional<std::int64_t> data_items_exposed;
    std::optional<EntryPoint> new_entry_point;
    bool operator==(const FeatureChange&) const = default;
};

struct LinkChange {
    std::vector<std::pair<NfId, NfId>> add;
    std::vector<std::pair<NfId, NfId>> remove;
    bool operator==(const LinkChange&) const = default;
};

struct VulnerabilityReport {
    std::string vuln_id;
    VulnerabilityCategory category = VulnerabilityCategory::Configuration;
    bool exploitable = false;
    std::optional<std::int64_t> data_items_exposed;  // on the target entry point
    bool operator==(const VulnerabilityReport&) const = default;
};

struct AttackReport {
    std::optional<std::int64_t> potential_attackers;  // on the target entry point
    bool operator==(const AttackReport&) const = default;
};

// ControlApplied: either updates one control slot or patches one rule.
struct ControlChange {
    std::string requirement_id;
    std::string control;
    bool implemented = true;
    std::optional<double> correctness;
    std::optional<bool> null_scheme_preferred;
    std::string patch_rule;
    bool operator==(const ControlChange&) const = default;
};

using EventPayload = std::variant<std::monostate, UeChange, EntryPointAdded, ConfigChange, FeatureChange,
                                  LinkChange, VulnerabilityReport, AttackReport, ControlChange>;

struct Event {
    EventId id = 0;
    SimTime time = 0.0;
    EventKind kind = EventKind::ScanTick;
    EventTarget target;
    EventPayload payload;
    bool operator==(const Event&) const = default;
};

json to_json(const Event& ev);
// `path` prefixes diagnostics. The id is read when present, else left 0.
Event event_from_json(const json& j, const std::string& path = "/event");

} // namespace secstate
