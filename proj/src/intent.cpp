#include "secstate/intent.hpp"

#include <algorithm>

#include "secstate/errors.hpp"

namespace secstate {

namespace {

void validate_intent(const Intent& intent) {
    if (intent.intent_id.empty()) throw Error(ErrorCode::ValidationError, "intent id must not be empty");
    if (!(intent.target_score >= 0.0 && intent.target_score <= 1.0)) {
        throw Error(ErrorCode::ValidationError, "intent target must lie in [0,1]");
    }
    intent.weights.validate();
}

void require_scope(const Scope& scope, const Network& net) {
    const bool ok = scope.level == ScopeLevel::Network ||
                    (scope.level == ScopeLevel::Domain && net.has_domain(scope.id)) ||
                    (scope.level == ScopeLevel::Local && net.has_nf(scope.id));
    if (!ok) throw Error(ErrorCode::UnknownScope, "scope '" + scope.to_string() + "' does not resolve");
}

} // namespace

std::string_view to_string(MetricKind m) {
    switch (m) {
        case MetricKind::ScE: return "ScE";
        case MetricKind::VulMet: return "VulMet";
        case MetricKind::AsE: return "AS_E";
    }
    return "?";
}

json to_json(const Intent& intent) {
    json j = {{"id", intent.intent_id},
              {"scope", intent.scope.to_string()},
              {"target", intent.target_score},
              {"weights", to_json(intent.weights)},
              {"active", intent.active}};
    if (!intent.parent_id.empty()) j["parent"] = intent.parent_id;
    return j;
}

Intent intent_from_json(const json& j) {
    Intent intent;
    try {
        intent.intent_id = j.at("id").get<std::string>();
        intent.scope = Scope::parse(j.value("scope", std::string("network")));
        intent.target_score = j.at("target").get<double>();
        if (j.contains("weights")) intent.weights = weights_from_json(j.at("weights"));
        intent.active = j.value("active", true);
        intent.parent_id = j.value("parent", std::string());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ValidationError, std::string("intent: ") + e.what());
    }
    validate_intent(intent);
    return intent;
}

json to_json(const ViolationReport& r) {
    json ranked = json::array();
    for (const auto& c : r.ranked_contributions) {
        ranked.push_back({{"metric", to_string(c.metric)}, {"contribution", c.contribution}});
    }
    return {{"intent_id", r.intent_id}, {"scope", r.scope.to_string()},  {"time", r.time},
            {"measured", r.measured},   {"target", r.target},            {"shortfall", r.shortfall},
            {"compliant", r.compliant}, {"ranked_contributions", ranked}};
}

ViolationReport report_from_json(const json& j) {
    ViolationReport r;
    r.intent_id = j.at("intent_id").get<std::string>();
    r.scope = Scope::parse(j.at("scope").get<std::string>());
    r.time = j.at("time").get<double>();
    r.measured = j.at("measured").get<double>();
    r.target = j.at("target").get<double>();
    r.shortfall = j.at("shortfall").get<double>();
    r.compliant = j.at("compliant").get<bool>();
    for (const auto& c : j.at("ranked_contributions")) {
        const auto name = c.at("metric").get<std::string>();
        MetricKind m = name == "ScE" ? MetricKind::ScE : name == "VulMet" ? MetricKind::VulMet : MetricKind::AsE;
        r.ranked_contributions.push_back({m, c.at("contribution").get<double>()});
    }
    return r;
}

std::vector<Intent> decompose_intent(const Intent& intent, const Network& net) {
    require_scope(intent.scope, net);
    if (intent.scope.level != ScopeLevel::Network) return {intent};
    std::vector<Intent> children;
    for (const auto& d : net.domains()) {
        if (d.member_nf_ids.empty()) continue;
        Intent child = intent;
        child.intent_id = intent.intent_id + "/" + d.id;
        child.scope = Scope::domain(d.id);
        child.parent_id = intent.intent_id;
        children.push_back(std::move(child));
    }
    if (children.empty()) throw Error(ErrorCode::NoDomains, "network has no non-empty domain");
    return children;
}

ViolationReport evaluate_intent(const Intent& intent, const MetricSnapshot& snapshot) {
    if (!(intent.scope == snapshot.scope)) {
        throw Error(ErrorCode::ScopeMismatch, "intent scope '" + intent.scope.to_string() +
                                                  "' vs snapshot scope '" + snapshot.scope.to_string() + "'");
    }
    const auto& w = intent.weights;
    ViolationReport r;
    r.intent_id = intent.intent_id;
    r.scope = snapshot.scope;
    r.time = snapshot.time;
    r.measured = composite_score(snapshot.sce, snapshot.vulmet, snapshot.as_e, w);
    r.target = intent.target_score;
    r.compliant = r.measured >= r.target;
    r.shortfall = std::max(0.0, r.target - r.measured);
    r.ranked_contributions = {{MetricKind::ScE, w.sce * (1.0 - snapshot.sce)},
                              {MetricKind::VulMet, w.vulmet * snapshot.vulmet},
                              {MetricKind::AsE, w.as_e * snapshot.as_e}};
    // Stable sort keeps the declaration order for ties.
    std::stable_sort(r.ranked_contributions.begin(), r.ranked_contributions.end(),
                     [](const Contribution& a, const Contribution& b) { return a.contribution > b.contribution; });
    return r;
}

std::vector<ViolationReport> report_cycle(const std::vector<Intent>& intents, const Network& net,
                                          const HierarchySnapshot& hierarchy) {
    std::vector<ViolationReport> reports;
    for (const auto& intent : intents) {
        if (!intent.active) continue;
        for (const auto& child : decompose_intent(intent, net)) {
            const auto* snap = hierarchy.find(child.scope);
            if (snap == nullptr) {
                throw Error(ErrorCode::UnknownScope, "no snapshot for '" + child.scope.to_string() + "'");
            }
            reports.push_back(evaluate_intent(child, *snap));
        }
    }
    return reports;
}

void IntentRegistry::create(Intent intent) {
    validate_intent(intent);
    if (find(intent.intent_id) != nullptr) {
        throw Error(ErrorCode::ValidationError, "intent '" + intent.intent_id + "' already exists");
    }
    intents_.push_back(std::move(intent));
}

void IntentRegistry::update(const Intent& intent) {
    validate_intent(intent);
    auto it = std::find_if(intents_.begin(), intents_.end(),
                           [&](const Intent& i) { return i.intent_id == intent.intent_id; });
    if (it == intents_.end()) throw Error(ErrorCode::UnknownId, "no intent '" + intent.intent_id + "'");
    *it = intent;
}

void IntentRegistry::deactivate(std::string_view intent_id) {
    auto it = std::find_if(intents_.begin(), intents_.end(),
                           [&](const Intent& i) { return i.intent_id == intent_id; });
    if (it == intents_.end()) throw Error(ErrorCode::UnknownId, "no intent '" + std::string(intent_id) + "'");
    it->active = false;
}

const Intent* IntentRegistry::find(std::string_view intent_id) const {
    auto it = std::find_if(intents_.begin(), intents_.end(),
                           [&](const Intent& i) { return i.intent_id == intent_id; });
    return it == intents_.end() ? nullptr : &*it;
}

} // namespace secstate
