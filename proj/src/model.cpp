#include "secstate/model.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "secstate/errors.hpp"

namespace secstate {

namespace {

constexpr std::array<std::pair<NfKind, std::string_view>, 6> kNfKindNames{{
    {NfKind::Gnb, "gNB"},
    {NfKind::CuCp, "CU-CP"},
    {NfKind::CuUp, "CU-UP"},
    {NfKind::Du, "DU"},
    {NfKind::CoreNf, "core-NF"},
    {NfKind::Other, "other"},
}};

constexpr std::array<std::pair<EntryPointCategory, std::string_view>, kEntryPointCategoryCount>
    kCategoryNames{{
        {EntryPointCategory::Radio3gpp, "3GPP-Radio"},
        {EntryPointCategory::Network3gpp, "3GPP-Network"},
        {EntryPointCategory::Oran, "O-RAN"},
        {EntryPointCategory::Oam, "OAM"},
        {EntryPointCategory::Platform, "Platform"},
    }};

constexpr std::array<std::pair<VulnerabilityCategory, std::string_view>, 3> kVulnCategoryNames{{
    {VulnerabilityCategory::Software, "software"},
    {VulnerabilityCategory::Protocol, "protocol"},
    {VulnerabilityCategory::Configuration, "configuration"},
}};

template <typename Table, typename Enum>
std::string_view name_of(const Table& table, Enum value) {
    for (const auto& [e, name] : table) {
        if (e == value) return name;
    }
    return "?";
}

template <typename Table>
auto value_of(const Table& table, std::string_view text, std::string_view what) {
    for (const auto& [e, name] : table) {
        if (name == text) return e;
    }
    throw Error(ErrorCode::ValidationError,
                "unknown " + std::string(what) + " '" + std::string(text) + "'");
}

[[noreturn]] void invalid(const std::string& message) {
    throw Error(ErrorCode::ValidationError, message);
}

// Typed field access with a JSON-pointer style path in every diagnostic.
const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) invalid(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) invalid(path + "/" + key + ": missing field");
    return *it;
}

template <typename T>
T get_as(const json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        invalid(path + ": wrong type");
    }
}

template <typename T>
T field(const json& j, const char* key, const std::string& path) {
    return get_as<T>(require(j, key, path), path + "/" + key);
}

template <typename T>
T field_or(const json& j, const char* key, T fallback, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    return get_as<T>(*it, path + "/" + key);
}

const json& array_field(const json& j, const char* key, const std::string& path) {
    static const json kEmpty = json::array();
    auto it = j.find(key);
    if (it == j.end()) return kEmpty;
    if (!it->is_array()) invalid(path + "/" + key + ": expected an array");
    return *it;
}

ComplianceRule rule_from_json(const json& j, const std::string& path) {
    ComplianceRule r;
    r.rule_id = field<std::string>(j, "id", path);
    r.total_attributes = field<int>(j, "total_attributes", path);
    r.noncompliant_attributes = field_or<int>(j, "noncompliant_attributes", 0, path);
    r.compliant = field_or<bool>(j, "compliant", r.noncompliant_attributes == 0, path);
    r.nc_timer = field_or<double>(j, "nc_timer", 0.0, path);
    return r;
}

json to_json(const ComplianceRule& r) {
    return {{"id", r.rule_id},
            {"total_attributes", r.total_attributes},
            {"noncompliant_attributes", r.noncompliant_attributes},
            {"compliant", r.compliant},
            {"nc_timer", r.nc_timer}};
}

PenaltyContext penalty_from_json(const json& j, const std::string& path) {
    PenaltyContext p;
    p.ue_connected = field<std::int64_t>(j, "ue_connected", path);
    p.ue_capacity = field<std::int64_t>(j, "ue_capacity", path);
    p.null_scheme_preferred = field_or<bool>(j, "null_scheme_preferred", false, path);
    p.cell = field_or<std::string>(j, "cell", "", path);
    return p;
}

json to_json(const PenaltyContext& p) {
    json j = {{"ue_connected", p.ue_connected},
              {"ue_capacity", p.ue_capacity},
              {"null_scheme_preferred", p.null_scheme_preferred}};
    if (!p.cell.empty()) j["cell"] = p.cell;
    return j;
}

ControlRequirement requirement_from_json(const json& j, const std::string& path) {
    ControlRequirement req;
    req.requirement_id = field<std::string>(j, "id", path);
    const auto& controls = array_field(j, "controls", path);
    for (std::size_t i = 0; i < controls.size(); ++i) {
        const std::string p = path + "/controls/" + std::to_string(i);
        ControlSlot slot;
        slot.name = field<std::string>(controls[i], "name", p);
        slot.implemented = field_or<bool>(controls[i], "implemented", false, p);
        slot.correctness = field_or<double>(controls[i], "correctness", 1.0, p);
        if (auto it = controls[i].find("penalty"); it != controls[i].end()) {
            slot.context = penalty_from_json(*it, p + "/penalty");
        }
        req.controls.push_back(std::move(slot));
    }
    return req;
}

json to_json(const ControlRequirement& req) {
    json controls = json::array();
    for (const auto& slot : req.controls) {
        json s = {{"name", slot.name},
                  {"implemented", slot.implemented},
                  {"correctness", slot.correctness}};
        if (slot.context) s["penalty"] = to_json(*slot.context);
        controls.push_back(std::move(s));
    }
    return {{"id", req.requirement_id}, {"controls", std::move(controls)}};
}

NetworkFunction nf_from_json(const json& j, const std::string& path) {
    NetworkFunction nf;
    nf.id = field<std::string>(j, "id", path);
    nf.kind = parse_nf_kind(field_or<std::string>(j, "kind", "other", path));
    nf.domain_id = field<std::string>(j, "domain", path);
    nf.ep_max = field<int>(j, "ep_max", path);

    const auto& flags = array_field(j, "criticality", path);
    for (std::size_t i = 0; i < flags.size(); ++i) {
        const std::string p = path + "/criticality/" + std::to_string(i);
        CriticalityFlag flag;
        flag.name = field<std::string>(flags[i], "name", p);
        const json& raised = require(flags[i], "raised", p);
        if (raised.is_boolean()) {
            flag.raised = raised.get<bool>();
        } else if (raised.is_number_integer() && (raised == 0 || raised == 1)) {
            flag.raised = raised.get<int>() == 1;
        } else {
            invalid(p + "/raised: expected 0, 1 or a boolean");
        }
        nf.criticality.flags.push_back(std::move(flag));
    }

    const auto& rules = array_field(j, "rules", path);
    for (std::size_t i = 0; i < rules.size(); ++i) {
        nf.rules.push_back(rule_from_json(rules[i], path + "/rules/" + std::to_string(i)));
    }
    const auto& controls = array_field(j, "control_sets", path);
    for (std::size_t i = 0; i < controls.size(); ++i) {
        nf.control_sets.push_back(
            requirement_from_json(controls[i], path + "/control_sets/" + std::to_string(i)));
    }
    const auto& eps = array_field(j, "entry_points", path);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        nf.entry_points.push_back(
            entry_point_from_json(eps[i], path + "/entry_points/" + std::to_string(i)));
    }
    if (auto it = j.find("impact_context"); it != j.end()) {
        nf.impact_context = magnitude_from_json(*it, path + "/impact_context");
    }
    const auto& nbrs = array_field(j, "neighbors", path);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        nf.neighbor_ids.insert(get_as<std::string>(nbrs[i], path + "/neighbors/" + std::to_string(i)));
    }
    const auto& vulns = array_field(j, "vulnerabilities", path);
    for (std::size_t i = 0; i < vulns.size(); ++i) {
        const std::string p = path + "/vulnerabilities/" + std::to_string(i);
        VulnerabilityTag tag;
        tag.vuln_id = field<std::string>(vulns[i], "id", p);
        tag.category = parse_vulnerability_category(field<std::string>(vulns[i], "category", p));
        tag.exploitable = field_or<bool>(vulns[i], "exploitable", false, p);
        nf.vulnerabilities.push_back(std::move(tag));
    }
    return nf;
}

json to_json(const NetworkFunction& nf) {
    json flags = json::array();
    for (const auto& f : nf.criticality.flags) flags.push_back({{"name", f.name}, {"raised", f.raised}});
    json rules = json::array();
    for (const auto& r : nf.rules) rules.push_back(to_json(r));
    json controls = json::array();
    for (const auto& c : nf.control_sets) controls.push_back(to_json(c));
    json eps = json::array();
    for (const auto& ep : nf.entry_points) eps.push_back(to_json(ep));
    json j = {{"id", nf.id},
              {"kind", to_string(nf.kind)},
              {"domain", nf.domain_id},
              {"ep_max", nf.ep_max},
              {"criticality", std::move(flags)},
              {"rules", std::move(rules)},
              {"control_sets", std::move(controls)},
              {"entry_points", std::move(eps)}};
    if (nf.impact_context) j["impact_context"] = to_json(*nf.impact_context);
    if (!nf.vulnerabilities.empty()) {
        json vulns = json::array();
        for (const auto& v : nf.vulnerabilities) {
            vulns.push_back({{"id", v.vuln_id},
                             {"category", to_string(v.category)},
                             {"exploitable", v.exploitable}});
        }
        j["vulnerabilities"] = std::move(vulns);
    }
    return j;
}

void validate_magnitude(const OrderOfMagnitudeContext& ctx, const std::string& where) {
    if (const auto* r = std::get_if<RadioMagnitude>(&ctx)) {
        if (r->ue_potential_attackers < 0 || r->ue_connected < 0 ||
            r->ue_potential_attackers > r->ue_connected) {
            invalid(where + ": radio context needs 0 <= ue_potential_attackers <= ue_connected");
        }
    } else if (const auto* q = std::get_if<RatioMagnitude>(&ctx)) {
        if (q->noncompliant_units < 0 || q->total_units < 0 ||
            q->noncompliant_units > q->total_units) {
            invalid(where + ": ratio context needs 0 <= noncompliant_units <= total_units");
        }
    } else {
        const double v = std::get<FixedMagnitude>(ctx).value;
        if (!(v >= 0.0 && v <= 1.0)) invalid(where + ": fixed magnitude outside [0,1]");
    }
}

} // namespace

std::string_view to_string(NfKind kind) { return name_of(kNfKindNames, kind); }
std::string_view to_string(EntryPointCategory category) { return name_of(kCategoryNames, category); }
std::string_view to_string(VulnerabilityCategory category) { return name_of(kVulnCategoryNames, category); }

NfKind parse_nf_kind(std::string_view text) { return value_of(kNfKindNames, text, "NF kind"); }

EntryPointCategory parse_entry_point_category(std::string_view text) {
    return value_of(kCategoryNames, text, "entry point category");
}

VulnerabilityCategory parse_vulnerability_category(std::string_view text) {
    return value_of(kVulnCategoryNames, text, "vulnerability category");
}

const ComplianceRule* NetworkFunction::find_rule(std::string_view rule_id) const {
    auto it = std::find_if(rules.begin(), rules.end(),
                           [&](const ComplianceRule& r) { return r.rule_id == rule_id; });
    return it == rules.end() ? nullptr : &*it;
}

ComplianceRule* NetworkFunction::find_rule(std::string_view rule_id) {
    return const_cast<ComplianceRule*>(std::as_const(*this).find_rule(rule_id));
}

const EntryPoint* NetworkFunction::find_entry_point(std::string_view ep_id) const {
    auto it = std::find_if(entry_points.begin(), entry_points.end(),
                           [&](const EntryPoint& ep) { return ep.ep_id == ep_id; });
    return it == entry_points.end() ? nullptr : &*it;
}

EntryPoint* NetworkFunction::find_entry_point(std::string_view ep_id) {
    return const_cast<EntryPoint*>(std::as_const(*this).find_entry_point(ep_id));
}

Network::Network(std::vector<Domain> domains, std::vector<NetworkFunction> functions)
    : domains_(std::move(domains)), functions_(std::move(functions)) {
    std::sort(functions_.begin(), functions_.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    rebuild_index();
}

void Network::rebuild_index() {
    nf_index_.clear();
    domain_index_.clear();
    for (std::size_t i = 0; i < domains_.size(); ++i) {
        if (!domain_index_.emplace(domains_[i].id, i).second) {
            invalid("duplicate domain id '" + domains_[i].id + "'");
        }
        domains_[i].member_nf_ids.clear();
    }
    for (std::size_t i = 0; i < functions_.size(); ++i) {
        const auto& f = functions_[i];
        if (!nf_index_.emplace(f.id, i).second) invalid("duplicate network function id '" + f.id + "'");
        auto d = domain_index_.find(f.domain_id);
        if (d == domain_index_.end()) {
            invalid("network function '" + f.id + "' references missing domain '" + f.domain_id + "'");
        }
        domains_[d->second].member_nf_ids.push_back(f.id);
    }
}

bool Network::has_nf(std::string_view id) const { return nf_index_.find(id) != nf_index_.end(); }
bool Network::has_domain(std::string_view id) const {
    return domain_index_.find(id) != domain_index_.end();
}

const NetworkFunction& Network::nf(std::string_view id) const {
    auto it = nf_index_.find(id);
    if (it == nf_index_.end()) {
        throw Error(ErrorCode::UnknownId, "no network function '" + std::string(id) + "'");
    }
    return functions_[it->second];
}

NetworkFunction& Network::nf(std::string_view id) {
    return const_cast<NetworkFunction&>(std::as_const(*this).nf(id));
}

const Domain& Network::domain(std::string_view id) const {
    auto it = domain_index_.find(id);
    if (it == domain_index_.end()) {
        throw Error(ErrorCode::UnknownId, "no domain '" + std::string(id) + "'");
    }
    return domains_[it->second];
}

void Network::add_link(std::string_view a, std::string_view b) {
    if (a == b) invalid("self-link on '" + std::string(a) + "'");
    auto& na = nf(a);
    auto& nb = nf(b);
    na.neighbor_ids.insert(nb.id);
    nb.neighbor_ids.insert(na.id);
}

void Network::remove_link(std::string_view a, std::string_view b) {
    auto& na = nf(a);
    auto& nb = nf(b);
    na.neighbor_ids.erase(nb.id);
    nb.neighbor_ids.erase(na.id);
}

void validate_entry_point(const EntryPoint& ep, const std::string& where) {
    if (ep.data_items_total <= 0) invalid(where + ": data_items_total must be positive");
    if (ep.data_items_exposed < 0 || ep.data_items_exposed > ep.data_items_total) {
        invalid(where + ": data_items_exposed " + std::to_string(ep.data_items_exposed) +
                " outside [0, " + std::to_string(ep.data_items_total) + "]");
    }
    validate_magnitude(ep.om_context, where + "/order_of_magnitude");
}

void Network::validate() const {
    std::size_t flag_count = 0;
    bool flag_count_set = false;
    for (const auto& f : functions_) {
        const std::string where = "network function '" + f.id + "'";
        if (!has_domain(f.domain_id)) invalid(where + ": missing domain '" + f.domain_id + "'");
        if (f.ep_max <= 0) invalid(where + ": ep_max must be positive");
        if (static_cast<std::int64_t>(f.entry_points.size()) > f.ep_max) {
            invalid(where + ": " + std::to_string(f.entry_points.size()) +
                    " entry points exceed ep_max " + std::to_string(f.ep_max));
        }
        if (!f.criticality.flags.empty()) {
            if (flag_count_set && f.criticality.flags.size() != flag_count) {
                invalid(where + ": criticality flag count differs from the rest of the deployment");
            }
            flag_count = f.criticality.flags.size();
            flag_count_set = true;
        }
        std::set<std::string> seen;
        for (const auto& r : f.rules) {
            const std::string rw = where + " rule '" + r.rule_id + "'";
            if (!seen.insert("rule:" + r.rule_id).second) invalid(rw + ": duplicate id");
            if (r.total_attributes <= 0) invalid(rw + ": total_attributes must be positive");
            if (r.noncompliant_attributes < 0 || r.noncompliant_attributes > r.total_attributes) {
                invalid(rw + ": noncompliant_attributes outside [0, total_attributes]");
            }
            if (r.compliant != (r.noncompliant_attributes == 0)) {
                invalid(rw + ": compliant flag disagrees with noncompliant_attributes");
            }
            if (!(r.nc_timer >= 0.0 && r.nc_timer <= 1.0)) invalid(rw + ": nc_timer outside [0,1]");
            if (r.compliant && r.nc_timer != 0.0) invalid(rw + ": compliant rule with a running timer");
        }
        for (const auto& req : f.control_sets) {
            const std::string cw = where + " requirement '" + req.requirement_id + "'";
            if (req.controls.empty()) invalid(cw + ": empty control list");
            for (const auto& slot : req.controls) {
                if (!(slot.correctness >= 0.0 && slot.correctness <= 1.0)) {
                    invalid(cw + " control '" + slot.name + "': correctness outside [0,1]");
                }
                if (slot.context) {
                    const auto& c = *slot.context;
                    if (c.ue_capacity <= 0) invalid(cw + ": penalty ue_capacity must be positive");
                    if (c.ue_connected < 0 || c.ue_connected > c.ue_capacity) {
                        invalid(cw + ": penalty ue_connected outside [0, ue_capacity]");
                    }
                    if (!c.cell.empty() && f.find_entry_point(c.cell) == nullptr) {
                        invalid(cw + ": penalty bound to unknown entry point '" + c.cell + "'");
                    }
                }
            }
        }
        for (const auto& ep : f.entry_points) {
            if (!seen.insert("ep:" + ep.ep_id).second) {
                invalid(where + ": duplicate entry point '" + ep.ep_id + "'");
            }
            validate_entry_point(ep, where + " entry point '" + ep.ep_id + "'");
        }
        if (f.impact_context) {
            validate_magnitude(*f.impact_context, where + " impact_context");
        } else if (std::any_of(f.rules.begin(), f.rules.end(), [](const auto& r) { return !r.compliant; })) {
            invalid(where + ": non-compliant rules need an impact_context");
        }
        for (const auto& n : f.neighbor_ids) {
            if (n == f.id) invalid(where + ": lists itself as a neighbor");
            if (!has_nf(n)) invalid(where + ": neighbor '" + n + "' does not exist");
            if (!nf(n).neighbor_ids.contains(f.id)) {
                invalid(where + ": asymmetric neighbor relation with '" + n + "'");
            }
        }
    }
}

std::vector<const NetworkFunction*> neighbors(const Network& net, std::string_view nf_id) {
    const auto& f = net.nf(nf_id);
    std::vector<const NetworkFunction*> out;
    out.reserve(f.neighbor_ids.size());
    for (const auto& n : f.neighbor_ids) {
        if (n != f.id) out.push_back(&net.nf(n));
    }
    return out;
}

json to_json(const OrderOfMagnitudeContext& ctx) {
    return std::visit(
        [](const auto& c) -> json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, RadioMagnitude>) {
                return {{"radio",
                         {{"ue_potential_attackers", c.ue_potential_attackers},
                          {"ue_connected", c.ue_connected}}}};
            } else if constexpr (std::is_same_v<T, RatioMagnitude>) {
                return {{"ratio",
                         {{"noncompliant_units", c.noncompliant_units},
                          {"total_units", c.total_units}}}};
            } else {
                return {{"fixed", c.value}};
            }
        },
        ctx);
}

OrderOfMagnitudeContext magnitude_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || j.size() != 1) {
        invalid(path + ": expected exactly one of radio, ratio, fixed");
    }
    if (auto it = j.find("radio"); it != j.end()) {
        return RadioMagnitude{field<std::int64_t>(*it, "ue_potential_attackers", path + "/radio"),
                              field<std::int64_t>(*it, "ue_connected", path + "/radio")};
    }
    if (auto it = j.find("ratio"); it != j.end()) {
        return RatioMagnitude{field<std::int64_t>(*it, "noncompliant_units", path + "/ratio"),
                              field<std::int64_t>(*it, "total_units", path + "/ratio")};
    }
    if (auto it = j.find("fixed"); it != j.end()) {
        return FixedMagnitude{get_as<double>(*it, path + "/fixed")};
    }
    invalid(path + ": expected exactly one of radio, ratio, fixed");
}

json to_json(const EntryPoint& ep) {
    return {{"id", ep.ep_id},
            {"category", to_string(ep.category)},
            {"channels", ep.channels},
            {"data_items_total", ep.data_items_total},
            {"data_items_exposed", ep.data_items_exposed},
            {"order_of_magnitude", to_json(ep.om_context)}};
}

EntryPoint entry_point_from_json(const json& j, const std::string& path) {
    EntryPoint ep;
    ep.ep_id = field<std::string>(j, "id", path);
    ep.category = parse_entry_point_category(field<std::string>(j, "category", path));
    ep.channels = field_or<std::vector<std::string>>(j, "channels", {}, path);
    ep.data_items_total = field<std::int64_t>(j, "data_items_total", path);
    ep.data_items_exposed = field_or<std::int64_t>(j, "data_items_exposed", 0, path);
    ep.om_context = magnitude_from_json(require(j, "order_of_magnitude", path),
                                        path + "/order_of_magnitude");
    validate_entry_point(ep, path);
    return ep;
}

Network load_topology(const json& document) {
    if (!document.is_object()) invalid("document root must be an object");
    require(document, "domains", "");
    require(document, "network_functions", "");
    std::vector<Domain> domains;
    const auto& ds = array_field(document, "domains", "");
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string p = "/domains/" + std::to_string(i);
        Domain d;
        d.id = field<std::string>(ds[i], "id", p);
        d.name = field_or<std::string>(ds[i], "name", d.id, p);
        domains.push_back(std::move(d));
    }
    std::vector<NetworkFunction> nfs;
    const auto& fs = array_field(document, "network_functions", "");
    for (std::size_t i = 0; i < fs.size(); ++i) {
        nfs.push_back(nf_from_json(fs[i], "/network_functions/" + std::to_string(i)));
    }

    // Per-NF neighbor lists must already be symmetric; validate before merging links.
    Network net(std::move(domains), std::move(nfs));
    net.validate();

    const auto& links = array_field(document, "links", "");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string p = "/links/" + std::to_string(i);
        auto pair = get_as<std::vector<std::string>>(links[i], p);
        if (pair.size() != 2) invalid(p + ": a link names exactly two network functions");
        for (const auto& end : pair) {
            if (!net.has_nf(end)) invalid(p + ": unknown network function '" + end + "'");
        }
        net.add_link(pair[0], pair[1]);
    }
    net.validate();
    return net;
}

Network load_topology_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return load_topology(doc);
}

json serialize(const Network& net) {
    json domains = json::array();
    for (const auto& d : net.domains()) domains.push_back({{"id", d.id}, {"name", d.name}});
    json nfs = json::array();
    json links = json::array();
    for (const auto& f : net.functions()) {
        nfs.push_back(to_json(f));
        for (const auto& n : f.neighbor_ids) {
            if (f.id < n) links.push_back({f.id, n});
        }
    }
    return {{"domains", std::move(domains)},
            {"network_functions", std::move(nfs)},
            {"links", std::move(links)}};
}

} // namespace secstate
