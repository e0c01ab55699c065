#pragma once

#include <array>
#include <string>
#include <vector>

#include "secstate/attack_surface.hpp"
#include "secstate/model.hpp"
#include "secstate/vuln.hpp"

namespace secstate {

using SimTime = double;  // simulated days

// Weights of the composite score. Must lie on the probability simplex.
struct ScoreWeights {
    double sce = 1.0 / 3.0;
    double vulmet = 1.0 / 3.0;
    double as_e = 1.0 / 3.0;

    void validate() const;
    bool operator==(const ScoreWeights&) const = default;
};

json to_json(const ScoreWeights& w);
ScoreWeights weights_from_json(const json& j);
// Parses "w_sce,w_vul,w_as".
ScoreWeights parse_weights(std::string_view text);

enum class ScopeLevel { Local, Domain, Network };

struct Scope {
    ScopeLevel level = ScopeLevel::Network;
    std::string id;  // empty for network scope

    static Scope network() { return {ScopeLevel::Network, {}}; }
    static Scope domain(std::string id) { return {ScopeLevel::Domain, std::move(id)}; }
    static Scope local(std::string id) { return {ScopeLevel::Local, std::move(id)}; }

    // "network", "domain:<id>", "nf:<id>"
    std::string to_string() const;
    static Scope parse(std::string_view text);

    // True when every NF in `inner` also lies in this scope.
    bool contains(const Scope& inner, const Network& net) const;

    auto operator<=>(const Scope&) const = default;
};

json to_json(const Scope& s);
Scope scope_from_json(const json& j);

struct MetricSnapshot {
    Scope scope;
    SimTime time = 0.0;
    double sce = 0.0;
    double vulmet = 0.0;
    double as_e = 0.0;
    // For domain and network scopes each measure is the mean over members.
    VulnMeasures measures;
    std::array<double, kEntryPointCategoryCount> as_e_by_category{};
    double composite = 0.0;

    // Equality of all metric values (scope and time excluded).
    bool same_values(const MetricSnapshot& other) const;
};

json to_json(const MetricSnapshot& s);
MetricSnapshot snapshot_from_json(const json& j);

// S = w_sce * sce + w_vul * (1 - vulmet) + w_as * (1 - as_e)
double composite_score(double sce, double vulmet, double as_e, const ScoreWeights& w);

MetricSnapshot local_score(const Network& net, std::string_view nf_id, const ScoreWeights& w,
                           const LocalStates& locals);
MetricSnapshot domain_score(const Network& net, std::string_view domain_id, const ScoreWeights& w,
                            const ScanConfig& cfg);
MetricSnapshot network_score(const Network& net, const ScoreWeights& w, const ScanConfig& cfg);

// All three levels computed in one pass. Locals are ordered by NF id, domains
// in document order; empty domains are omitted.
struct HierarchySnapshot {
    std::vector<MetricSnapshot> locals;
    std::vector<MetricSnapshot> domains;
    MetricSnapshot network;

    const MetricSnapshot* find(const Scope& scope) const;
    std::vector<const MetricSnapshot*> all() const;
};

HierarchySnapshot compute_hierarchy(const Network& net, const ScoreWeights& w, const ScanConfig& cfg,
                                    SimTime time = 0.0);

} // namespace secstate
