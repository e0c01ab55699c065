#include "secstate/event.hpp"

#include <array>

#include "secstate/errors.hpp"

namespace secstate {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 11> kKindNames{{
    {EventKind::UEAttached, "UEAttached"},
    {EventKind::UEDetached, "UEDetached"},
    {EventKind::CellAdded, "CellAdded"},
    {EventKind::CellRemoved, "CellRemoved"},
    {EventKind::ConfigChanged, "ConfigChanged"},
    {EventKind::FeatureAdded, "FeatureAdded"},
    {EventKind::TopologyChanged, "TopologyChanged"},
    {EventKind::VulnerabilityDetected, "VulnerabilityDetected"},
    {EventKind::AttackDetected, "AttackDetected"},
    {EventKind::ControlApplied, "ControlApplied"},
    {EventKind::ScanTick, "ScanTick"},
}};

[[noreturn]] void invalid(const std::string& message) {
    throw Error(ErrorCode::ValidationError, message);
}

template <typename T>
std::optional<T> opt(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        invalid(path + "/" + key + ": wrong type");
    }
}

template <typename T>
T req(const json& j, const char* key, const std::string& path) {
    auto v = opt<T>(j, key, path);
    if (!v) invalid(path + "/" + key + ": missing field");
    return *v;
}

std::vector<std::pair<NfId, NfId>> links_from(const json& j, const char* key, const std::string& path) {
    std::vector<std::pair<NfId, NfId>> out;
    auto raw = opt<std::vector<std::vector<std::string>>>(j, key, path).value_or(
        std::vector<std::vector<std::string>>{});
    for (const auto& pair : raw) {
        if (pair.size() != 2) invalid(path + "/" + key + ": a link names exactly two network functions");
        out.emplace_back(pair[0], pair[1]);
    }
    return out;
}

json links_to(const std::vector<std::pair<NfId, NfId>>& links) {
    json out = json::array();
    for (const auto& [a, b] : links) out.push_back({a, b});
    return out;
}

EventPayload payload_from_json(EventKind kind, const json& p, const std::string& path) {
    switch (kind) {
        case EventKind::UEAttached:
        case EventKind::UEDetached: {
            UeChange c;
            c.count = opt<std::int64_t>(p, "count", path).value_or(1);
            c.potential_attacker = opt<bool>(p, "potential_attacker", path).value_or(false);
            if (c.count <= 0) invalid(path + "/count: must be positive");
            return c;
        }
        case EventKind::CellAdded: {
            auto it = p.find("entry_point");
            if (it == p.end()) invalid(path + "/entry_point: missing field");
            return EntryPointAdded{entry_point_from_json(*it, path + "/entry_point")};
        }
        case EventKind::ConfigChanged:
            return ConfigChange{req<std::string>(p, "rule_id", path),
                                req<int>(p, "noncompliant_attributes", path)};
        case EventKind::FeatureAdded: {
            FeatureChange c;
            c.data_items_exposed = opt<std::int64_t>(p, "data_items_exposed", path);
            if (auto it = p.find("entry_point"); it != p.end()) {
                c.new_entry_point = entry_point_from_json(*it, path + "/entry_point");
            }
            return c;
        }
        case EventKind::TopologyChanged:
            return LinkChange{links_from(p, "add_links", path), links_from(p, "remove_links", path)};
        case EventKind::VulnerabilityDetected: {
            VulnerabilityReport r;
            r.vuln_id = opt<std::string>(p, "vuln_id", path).value_or("");
            r.category = parse_vulnerability_category(
                opt<std::string>(p, "category", path).value_or("configuration"));
            r.exploitable = opt<bool>(p, "exploitable", path).value_or(false);
            r.data_items_exposed = opt<std::int64_t>(p, "data_items_exposed", path);
            return r;
        }
        case EventKind::AttackDetected:
            return AttackReport{opt<std::int64_t>(p, "potential_attackers", path)};
        case EventKind::ControlApplied: {
            ControlChange c;
            c.requirement_id = opt<std::string>(p, "requirement_id", path).value_or("");
            c.control = opt<std::string>(p, "control", path).value_or("");
            c.implemented = opt<bool>(p, "implemented", path).value_or(true);
            c.correctness = opt<double>(p, "correctness", path);
            c.null_scheme_preferred = opt<bool>(p, "null_scheme_preferred", path);
            c.patch_rule = opt<std::string>(p, "patch_rule", path).value_or("");
            if (c.patch_rule.empty() && (c.requirement_id.empty() || c.control.empty())) {
                invalid(path + ": ControlApplied needs patch_rule or requirement_id + control");
            }
            return c;
        }
        case EventKind::CellRemoved:
        case EventKind::ScanTick: return std::monostate{};
    }
    return std::monostate{};
}

json payload_to_json(const EventPayload& payload) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return json::object();
            } else if constexpr (std::is_same_v<T, UeChange>) {
                return {{"count", p.count}, {"potential_attacker", p.potential_attacker}};
            } else if constexpr (std::is_same_v<T, EntryPointAdded>) {
                return {{"entry_point", to_json(p.entry_point)}};
            } else if constexpr (std::is_same_v<T, ConfigChange>) {
                return {{"rule_id", p.rule_id}, {"noncompliant_attributes", p.noncompliant_attributes}};
            } else if constexpr (std::is_same_v<T, FeatureChange>) {
                json j = json::object();
                if (p.data_items_exposed) j["data_items_exposed"] = *p.data_items_exposed;
                if (p.new_entry_point) j["entry_point"] = to_json(*p.new_entry_point);
                return j;
            } else if constexpr (std::is_same_v<T, LinkChange>) {
                return {{"add_links", links_to(p.add)}, {"remove_links", links_to(p.remove)}};
            } else if constexpr (std::is_same_v<T, VulnerabilityReport>) {
                json j = {{"vuln_id", p.vuln_id},
                          {"category", to_string(p.category)},
                          {"exploitable", p.exploitable}};
                if (p.data_items_exposed) j["data_items_exposed"] = *p.data_items_exposed;
                return j;
            } else if constexpr (std::is_same_v<T, AttackReport>) {
                json j = json::object();
                if (p.potential_attackers) j["potential_attackers"] = *p.potential_attackers;
                return j;
            } else {
                json j = json::object();
                if (!p.patch_rule.empty()) j["patch_rule"] = p.patch_rule;
                if (!p.requirement_id.empty()) {
                    j["requirement_id"] = p.requirement_id;
                    j["control"] = p.control;
                    j["implemented"] = p.implemented;
                }
                if (p.correctness) j["correctness"] = *p.correctness;
                if (p.null_scheme_preferred) j["null_scheme_preferred"] = *p.null_scheme_preferred;
                return j;
            }
        },
        payload);
}

} // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "?";
}

EventKind parse_event_kind(std::string_view text) {
    for (const auto& [k, name] : kKindNames) {
        if (name == text) return k;
    }
    throw Error(ErrorCode::UnknownEventKind, "unknown event kind '" + std::string(text) + "'");
}

json to_json(const Event& ev) {
    json target = {{"nf", ev.target.nf}};
    if (!ev.target.entry_point.empty()) target["entry_point"] = ev.target.entry_point;
    return {{"id", ev.id},
            {"time", ev.time},
            {"kind", to_string(ev.kind)},
            {"target", std::move(target)},
            {"payload", payload_to_json(ev.payload)}};
}

Event event_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) invalid(path + ": expected an object");
    Event ev;
    ev.id = opt<EventId>(j, "id", path).value_or(0);
    ev.time = opt<double>(j, "time", path).value_or(0.0);
    if (!(ev.time >= 0.0)) invalid(path + "/time: must be nonnegative");
    ev.kind = parse_event_kind(req<std::string>(j, "kind", path));
    auto t = j.find("target");
    if (t == j.end()) invalid(path + "/target: missing field");
    if (t->is_string()) {
        ev.target.nf = t->get<std::string>();
    } else {
        ev.target.nf = req<std::string>(*t, "nf", path + "/target");
        ev.target.entry_point = opt<std::string>(*t, "entry_point", path + "/target").value_or("");
    }
    static const json kEmpty = json::object();
    auto p = j.find("payload");
    ev.payload = payload_from_json(ev.kind, p == j.end() ? kEmpty : *p, path + "/payload");
    return ev;
}

} // namespace secstate
