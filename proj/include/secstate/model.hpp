#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace secstate {

using json = nlohmann::json;
using NfId = std::string;
using DomainId = std::string;

enum class NfKind { Gnb, CuCp, CuUp, Du, CoreNf, Other };

enum class EntryPointCategory { Radio3gpp, Network3gpp, Oran, Oam, Platform };
inline constexpr std::size_t kEntryPointCategoryCount = 5;

std::string_view to_string(NfKind kind);
std::string_view to_string(EntryPointCategory category);
NfKind parse_nf_kind(std::string_view text);
EntryPointCategory parse_entry_point_category(std::string_view text);

// Order-of-magnitude contexts. Radio: potential attacking UEs over connected
// UEs on a cell. Ratio: e.g. non-compliant IPsec tunnels over configured ones.
struct RadioMagnitude {
    std::int64_t ue_potential_attackers = 0;
    std::int64_t ue_connected = 0;
    bool operator==(const RadioMagnitude&) const = default;
};

struct RatioMagnitude {
    std::int64_t noncompliant_units = 0;
    std::int64_t total_units = 0;
    bool operator==(const RatioMagnitude&) const = default;
};

struct FixedMagnitude {
    double value = 0.0;
    bool operator==(const FixedMagnitude&) const = default;
};

using OrderOfMagnitudeContext = std::variant<RadioMagnitude, RatioMagnitude, FixedMagnitude>;

struct ComplianceRule {
    std::string rule_id;
    int total_attributes = 1;
    int noncompliant_attributes = 0;
    bool compliant = true;
    double nc_timer = 0.0;
    bool operator==(const ComplianceRule&) const = default;
};

// Context for the null-scheme correctness penalty. `cell` optionally binds the
// UE counter to an entry point so UE attach/detach events keep it current.
struct PenaltyContext {
    std::int64_t ue_connected = 0;
    std::int64_t ue_capacity = 1;
    bool null_scheme_preferred = false;
    std::string cell;
    bool operator==(const PenaltyContext&) const = default;
};

struct ControlSlot {
    std::string name;
    bool implemented = false;
    double correctness = 1.0;
    std::optional<PenaltyContext> context;
    bool operator==(const ControlSlot&) const = default;
};

struct ControlRequirement {
    std::string requirement_id;
    std::vector<ControlSlot> controls;
    bool operator==(const ControlRequirement&) const = default;
};

struct EntryPoint {
    std::string ep_id;
    EntryPointCategory category = EntryPointCategory::Radio3gpp;
    std::vector<std::string> channels;
    std::int64_t data_items_total = 1;
    std::int64_t data_items_exposed = 0;
    OrderOfMagnitudeContext om_context = FixedMagnitude{0.0};
    bool operator==(const EntryPoint&) const = default;
};

struct CriticalityFlag {
    std::string name;
    bool raised = false;
    bool operator==(const CriticalityFlag&) const = default;
};

struct CriticalityProfile {
    std::vector<CriticalityFlag> flags;
    bool operator==(const CriticalityProfile&) const = default;
};

enum class VulnerabilityCategory { Software, Protocol, Configuration };
std::string_view to_string(VulnerabilityCategory category);
VulnerabilityCategory parse_vulnerability_category(std::string_view text);

// Tag for a reported vulnerability. Only configuration vulnerabilities feed a
// computed metric; the other categories are carried as data.
struct VulnerabilityTag {
    std::string vuln_id;
    VulnerabilityCategory category = VulnerabilityCategory::Configuration;
    bool exploitable = false;
    bool operator==(const VulnerabilityTag&) const = default;
};

struct NetworkFunction {
    NfId id;
    NfKind kind = NfKind::Other;
    DomainId domain_id;
    int ep_max = 1;
    CriticalityProfile criticality;
    std::vector<ComplianceRule> rules;
    std::vector<ControlRequirement> control_sets;
    std::vector<EntryPoint> entry_points;
    // R_OM source for the vulnerability impact measure.
    std::optional<OrderOfMagnitudeContext> impact_context;
    std::set<NfId> neighbor_ids;
    std::vector<VulnerabilityTag> vulnerabilities;

    const ComplianceRule* find_rule(std::string_view rule_id) const;
    ComplianceRule* find_rule(std::string_view rule_id);
    const EntryPoint* find_entry_point(std::string_view ep_id) const;
    EntryPoint* find_entry_point(std::string_view ep_id);

    bool operator==(const NetworkFunction&) const = default;
};

struct Domain {
    DomainId id;
    std::string name;
    std::vector<NfId> member_nf_ids;  // sorted
    bool operator==(const Domain&) const = default;
};

// Topology plus all attributes the metric engines read. Value type: the
// simulator owns the only mutable instance and hands out copies.
class Network {
public:
    Network() = default;
    Network(std::vector<Domain> domains, std::vector<NetworkFunction> functions);

    const std::vector<Domain>& domains() const { return domains_; }
    const std::vector<NetworkFunction>& functions() const { return functions_; }

    bool has_nf(std::string_view id) const;
    bool has_domain(std::string_view id) const;
    const NetworkFunction& nf(std::string_view id) const;
    NetworkFunction& nf(std::string_view id);
    const Domain& domain(std::string_view id) const;

    void add_link(std::string_view a, std::string_view b);
    void remove_link(std::string_view a, std::string_view b);

    // Throws ValidationError on the first broken invariant.
    void validate() const;

    bool operator==(const Network& other) const {
        return domains_ == other.domains_ && functions_ == other.functions_;
    }

private:
    void rebuild_index();

    std::vector<Domain> domains_;
    std::vector<NetworkFunction> functions_;
    std::map<std::string, std::size_t, std::less<>> nf_index_;
    std::map<std::string, std::size_t, std::less<>> domain_index_;
};

// Neighbors of `nf_id`, ordered by id. Throws UnknownId.
std::vector<const NetworkFunction*> neighbors(const Network& net, std::string_view nf_id);

// Parses the `domains`, `network_functions` and `links` keys of a topology or
// scenario document. Other keys are ignored.
Network load_topology(const json& document);
Network load_topology_text(std::string_view text);
json serialize(const Network& net);

// Field-level helpers shared with the event codec.
json to_json(const EntryPoint& ep);
EntryPoint entry_point_from_json(const json& j, const std::string& path);
json to_json(const OrderOfMagnitudeContext& ctx);
OrderOfMagnitudeContext magnitude_from_json(const json& j, const std::string& path);

// Validates the value-level invariants of an entry point.
void validate_entry_point(const EntryPoint& ep, const std::string& where);

} // namespace secstate
