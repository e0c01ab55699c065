#include "secstate/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "secstate/errors.hpp"
#include "secstate/sce.hpp"

namespace secstate {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

json measures_json(const VulnMeasures& m) {
    return {{"r_nc", m.r_nc}, {"v_imp", m.v_imp},     {"d_nc", m.d_nc},
            {"a_cr", m.a_cr}, {"env_imp", m.env_imp}, {"vulmet_local", m.vulmet_local}};
}

VulnMeasures measures_from_json(const json& j) {
    return {j.at("r_nc").get<double>(),    j.at("v_imp").get<double>(),
            j.at("d_nc").get<double>(),    j.at("a_cr").get<double>(),
            j.at("env_imp").get<double>(), j.at("vulmet_local").get<double>()};
}

// Mean of components over a non-empty set of child snapshots; vulmet is left
// for the caller since its domain form is not a plain mean.
MetricSnapshot mean_of(const std::vector<const MetricSnapshot*>& parts) {
    MetricSnapshot out;
    const double n = static_cast<double>(parts.size());
    for (const auto* p : parts) {
        out.sce += p->sce;
        out.vulmet += p->vulmet;
        out.as_e += p->as_e;
        out.measures.r_nc += p->measures.r_nc;
        out.measures.v_imp += p->measures.v_imp;
        out.measures.d_nc += p->measures.d_nc;
        out.measures.a_cr += p->measures.a_cr;
        out.measures.env_imp += p->measures.env_imp;
        out.measures.vulmet_local += p->measures.vulmet_local;
        for (std::size_t c = 0; c < kEntryPointCategoryCount; ++c) {
            out.as_e_by_category[c] += p->as_e_by_category[c];
        }
    }
    out.sce /= n;
    out.vulmet /= n;
    out.as_e /= n;
    out.measures.r_nc /= n;
    out.measures.v_imp /= n;
    out.measures.d_nc /= n;
    out.measures.a_cr /= n;
    out.measures.env_imp /= n;
    out.measures.vulmet_local /= n;
    for (auto& c : out.as_e_by_category) c /= n;
    return out;
}

MetricSnapshot domain_from_locals(const Domain& d, const ScoreWeights& w,
                                  const std::vector<MetricSnapshot>& locals) {
    if (d.member_nf_ids.empty()) {
        throw Error(ErrorCode::EmptyDomain, "domain '" + d.id + "' has no network functions");
    }
    std::vector<const MetricSnapshot*> members;
    double five_sum = 0.0;
    for (const auto& id : d.member_nf_ids) {
        auto it = std::find_if(locals.begin(), locals.end(),
                               [&](const MetricSnapshot& s) { return s.scope.id == id; });
        members.push_back(&*it);
        five_sum += it->measures.five_measure_mean();
    }
    MetricSnapshot out = mean_of(members);
    out.scope = Scope::domain(d.id);
    out.vulmet = clamp01(five_sum / static_cast<double>(members.size()));
    out.sce = clamp01(out.sce);
    out.as_e = clamp01(out.as_e);
    out.composite = composite_score(out.sce, out.vulmet, out.as_e, w);
    return out;
}

MetricSnapshot network_from_domains(const std::vector<MetricSnapshot>& domains, const ScoreWeights& w) {
    if (domains.empty()) throw Error(ErrorCode::NoDomains, "network has no non-empty domain");
    std::vector<const MetricSnapshot*> parts;
    for (const auto& d : domains) parts.push_back(&d);
    MetricSnapshot out = mean_of(parts);
    out.scope = Scope::network();
    out.sce = clamp01(out.sce);
    out.vulmet = clamp01(out.vulmet);
    out.as_e = clamp01(out.as_e);
    out.composite = composite_score(out.sce, out.vulmet, out.as_e, w);
    return out;
}

std::vector<MetricSnapshot> all_locals(const Network& net, const ScoreWeights& w, const ScanConfig& cfg) {
    const auto states = local_vulmets(net, cfg);
    std::vector<MetricSnapshot> out;
    out.reserve(net.functions().size());
    for (const auto& f : net.functions()) out.push_back(local_score(net, f.id, w, states));
    return out;
}

} // namespace

void ScoreWeights::validate() const {
    if (!(sce >= 0.0 && vulmet >= 0.0 && as_e >= 0.0) || std::abs(sce + vulmet + as_e - 1.0) > 1e-9) {
        throw Error(ErrorCode::WeightsNotNormalized, "weights must be nonnegative and sum to 1");
    }
}

json to_json(const ScoreWeights& w) { return {{"sce", w.sce}, {"vulmet", w.vulmet}, {"as_e", w.as_e}}; }

ScoreWeights weights_from_json(const json& j) {
    ScoreWeights w;
    try {
        w.sce = j.at("sce").get<double>();
        w.vulmet = j.at("vulmet").get<double>();
        w.as_e = j.at("as_e").get<double>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ValidationError, std::string("weights: ") + e.what());
    }
    w.validate();
    return w;
}

ScoreWeights parse_weights(std::string_view text) {
    std::vector<double> parts;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::UsageError, "bad weight '" + item + "'");
        }
    }
    if (parts.size() != 3) throw Error(ErrorCode::UsageError, "expected three comma-separated weights");
    ScoreWeights w{parts[0], parts[1], parts[2]};
    w.validate();
    return w;
}

std::string Scope::to_string() const {
    switch (level) {
        case ScopeLevel::Local: return "nf:" + id;
        case ScopeLevel::Domain: return "domain:" + id;
        case ScopeLevel::Network: break;
    }
    return "network";
}

Scope Scope::parse(std::string_view text) {
    if (text == "network") return network();
    if (text.starts_with("domain:") && text.size() > 7) return domain(std::string(text.substr(7)));
    if (text.starts_with("nf:") && text.size() > 3) return local(std::string(text.substr(3)));
    throw Error(ErrorCode::UnknownScope, "cannot parse scope '" + std::string(text) + "'");
}

bool Scope::contains(const Scope& inner, const Network& net) const {
    switch (level) {
        case ScopeLevel::Network: return true;
        case ScopeLevel::Domain:
            if (inner.level == ScopeLevel::Domain) return inner.id == id;
            if (inner.level == ScopeLevel::Local) return net.has_nf(inner.id) && net.nf(inner.id).domain_id == id;
            return false;
        case ScopeLevel::Local: return inner == *this;
    }
    return false;
}

json to_json(const Scope& s) { return s.to_string(); }
Scope scope_from_json(const json& j) { return Scope::parse(j.get<std::string>()); }

bool MetricSnapshot::same_values(const MetricSnapshot& o) const {
    return sce == o.sce && vulmet == o.vulmet && as_e == o.as_e && composite == o.composite &&
           measures.r_nc == o.measures.r_nc && measures.v_imp == o.measures.v_imp &&
           measures.d_nc == o.measures.d_nc && measures.a_cr == o.measures.a_cr &&
           measures.env_imp == o.measures.env_imp && measures.vulmet_local == o.measures.vulmet_local &&
           as_e_by_category == o.as_e_by_category;
}

json to_json(const MetricSnapshot& s) {
    json cats = json::object();
    for (std::size_t c = 0; c < kEntryPointCategoryCount; ++c) {
        cats[std::string(to_string(static_cast<EntryPointCategory>(c)))] = s.as_e_by_category[c];
    }
    return {{"scope", s.scope.to_string()},
            {"time", s.time},
            {"sce", s.sce},
            {"vulmet", s.vulmet},
            {"as_e", s.as_e},
            {"composite", s.composite},
            {"measures", measures_json(s.measures)},
            {"as_e_by_category", std::move(cats)}};
}

MetricSnapshot snapshot_from_json(const json& j) {
    MetricSnapshot s;
    s.scope = Scope::parse(j.at("scope").get<std::string>());
    s.time = j.at("time").get<double>();
    s.sce = j.at("sce").get<double>();
    s.vulmet = j.at("vulmet").get<double>();
    s.as_e = j.at("as_e").get<double>();
    s.composite = j.at("composite").get<double>();
    s.measures = measures_from_json(j.at("measures"));
    const auto& cats = j.at("as_e_by_category");
    for (std::size_t c = 0; c < kEntryPointCategoryCount; ++c) {
        s.as_e_by_category[c] = cats.at(std::string(to_string(static_cast<EntryPointCategory>(c)))).get<double>();
    }
    return s;
}

double composite_score(double sce, double vulmet, double as_e, const ScoreWeights& w) {
    w.validate();
    if (!in_unit(sce) || !in_unit(vulmet) || !in_unit(as_e)) {
        throw Error(ErrorCode::OutOfRange, "composite inputs must lie in [0,1]");
    }
    return clamp01(w.sce * sce + w.vulmet * (1.0 - vulmet) + w.as_e * (1.0 - as_e));
}

MetricSnapshot local_score(const Network& net, std::string_view nf_id, const ScoreWeights& w,
                           const LocalStates& locals) {
    const auto& f = net.nf(nf_id);
    MetricSnapshot s;
    s.scope = Scope::local(f.id);
    s.sce = nf_effectiveness(f);
    s.measures = vuln_measures(net, nf_id, locals);
    s.vulmet = s.measures.vulmet_local;
    const auto exposure = attack_surface_exposure(describe_attack_surface(f));
    s.as_e = exposure.total;
    s.as_e_by_category = exposure.by_category;
    s.composite = composite_score(s.sce, s.vulmet, s.as_e, w);
    return s;
}

MetricSnapshot domain_score(const Network& net, std::string_view domain_id, const ScoreWeights& w,
                            const ScanConfig& cfg) {
    const auto& d = net.domain(domain_id);
    if (d.member_nf_ids.empty()) {
        throw Error(ErrorCode::EmptyDomain, "domain '" + d.id + "' has no network functions");
    }
    return domain_from_locals(d, w, all_locals(net, w, cfg));
}

MetricSnapshot network_score(const Network& net, const ScoreWeights& w, const ScanConfig& cfg) {
    return compute_hierarchy(net, w, cfg).network;
}

const MetricSnapshot* HierarchySnapshot::find(const Scope& scope) const {
    if (scope.level == ScopeLevel::Network) return &network;
    const auto& pool = scope.level == ScopeLevel::Local ? locals : domains;
    auto it = std::find_if(pool.begin(), pool.end(), [&](const MetricSnapshot& s) { return s.scope == scope; });
    return it == pool.end() ? nullptr : &*it;
}

std::vector<const MetricSnapshot*> HierarchySnapshot::all() const {
    std::vector<const MetricSnapshot*> out;
    for (const auto& s : locals) out.push_back(&s);
    for (const auto& s : domains) out.push_back(&s);
    out.push_back(&network);
    return out;
}

HierarchySnapshot compute_hierarchy(const Network& net, const ScoreWeights& w, const ScanConfig& cfg,
                                    SimTime time) {
    w.validate();
    HierarchySnapshot h;
    h.locals = all_locals(net, w, cfg);
    for (const auto& d : net.domains()) {
        if (d.member_nf_ids.empty()) continue;
        h.domains.push_back(domain_from_locals(d, w, h.locals));
    }
    h.network = network_from_domains(h.domains, w);
    h.network.time = time;
    for (auto& s : h.locals) s.time = time;
    for (auto& s : h.domains) s.time = time;
    return h;
}

} // namespace secstate
