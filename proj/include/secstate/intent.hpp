#pragma once

#include <map>
#include <string>
#include <vector>

#include "secstate/aggregation.hpp"

namespace secstate {

struct Intent {
    std::string intent_id;
    Scope scope;
    double target_score = 0.0;
    ScoreWeights weights;
    bool active = true;
    std::string parent_id;  // set on intents produced by decomposition

    bool operator==(const Intent&) const = default;
};

json to_json(const Intent& intent);
Intent intent_from_json(const json& j);

enum class MetricKind { ScE, VulMet, AsE };
std::string_view to_string(MetricKind m);

struct Contribution {
    MetricKind metric = MetricKind::ScE;
    double contribution = 0.0;
    bool operator==(const Contribution&) const = default;
};

struct ViolationReport {
    std::string intent_id;
    Scope scope;
    SimTime time = 0.0;
    double measured = 0.0;
    double target = 0.0;
    double shortfall = 0.0;
    // Descending; ties resolve in the order ScE, VulMet, AS_E.
    std::vector<Contribution> ranked_contributions;
    bool compliant = true;

    MetricKind top_contributor() const { return ranked_contributions.front().metric; }
    bool operator==(const ViolationReport&) const = default;
};

json to_json(const ViolationReport& r);
ViolationReport report_from_json(const json& j);

// Network intents fan out to one child per non-empty domain; domain and NF
// intents decompose to themselves. Throws UnknownScope / NoDomains.
std::vector<Intent> decompose_intent(const Intent& intent, const Network& net);

// Throws ScopeMismatch when the snapshot is for another scope. The measured
// score is recomputed under the intent's own weights.
ViolationReport evaluate_intent(const Intent& intent, const MetricSnapshot& snapshot);

// One report per active decomposed intent, in registration order.
std::vector<ViolationReport> report_cycle(const std::vector<Intent>& intents, const Network& net,
                                          const HierarchySnapshot& hierarchy);

// Intents in registration order. Ids are unique.
class IntentRegistry {
public:
    // Throws ValidationError on a duplicate id or a bad target.
    void create(Intent intent);
    void update(const Intent& intent);
    void deactivate(std::string_view intent_id);

    const std::vector<Intent>& intents() const { return intents_; }
    const Intent* find(std::string_view intent_id) const;

private:
    std::vector<Intent> intents_;
};

} // namespace secstate
