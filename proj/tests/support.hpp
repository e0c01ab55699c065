#pragma once

// Shared fixtures for the test binaries: fixed-seed generators for random
// models and brute-force oracles that recompute every metric straight from
// the definitions, without calling the library's metric code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "secstate/model.hpp"

namespace testsupport {

using namespace secstate;

#ifndef SECSTATE_SOURCE_DIR
#define SECSTATE_SOURCE_DIR "."
#endif

inline std::string source_path(const std::string& rel) { return std::string(SECSTATE_SOURCE_DIR) + "/" + rel; }

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen_);
    }
    bool coin(double p = 0.5) { return uniform() < p; }
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(v.size()) - 1))];
    }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

inline OrderOfMagnitudeContext random_magnitude(Rng& r) {
    switch (r.integer(0, 2)) {
        case 0: {
            RadioMagnitude m;
            m.ue_connected = r.integer(0, 500);
            m.ue_potential_attackers = r.integer(0, m.ue_connected);
            return m;
        }
        case 1: {
            RatioMagnitude m;
            m.total_units = r.integer(0, 20);
            m.noncompliant_units = r.integer(0, m.total_units);
            return m;
        }
        default:
            return FixedMagnitude{r.uniform()};
    }
}

inline EntryPoint random_entry_point(Rng& r, const std::string& id) {
    EntryPoint ep;
    ep.ep_id = id;
    ep.category = static_cast<EntryPointCategory>(r.integer(0, kEntryPointCategoryCount - 1));
    ep.channels = {"ch" + std::to_string(r.integer(0, 9))};
    ep.data_items_total = r.integer(1, 60);
    ep.data_items_exposed = r.integer(0, ep.data_items_total);
    ep.om_context = random_magnitude(r);
    return ep;
}

inline ComplianceRule random_rule(Rng& r, const std::string& id) {
    ComplianceRule rule;
    rule.rule_id = id;
    rule.total_attributes = static_cast<int>(r.integer(1, 12));
    rule.noncompliant_attributes = r.coin(0.5) ? 0 : static_cast<int>(r.integer(1, rule.total_attributes));
    rule.compliant = rule.noncompliant_attributes == 0;
    rule.nc_timer = rule.compliant ? 0.0 : r.uniform();
    return rule;
}

inline ControlRequirement random_requirement(Rng& r, const std::string& id) {
    ControlRequirement req;
    req.requirement_id = id;
    const auto n = r.integer(1, 4);
    for (std::int64_t i = 0; i < n; ++i) {
        ControlSlot slot;
        slot.name = "c" + std::to_string(i);
        slot.implemented = r.coin();
        slot.correctness = r.uniform();
        if (r.coin(0.3)) {
            PenaltyContext ctx;
            ctx.ue_capacity = r.integer(1, 400);
            ctx.ue_connected = r.integer(0, ctx.ue_capacity);
            ctx.null_scheme_preferred = r.coin();
            slot.context = ctx;
        }
        req.controls.push_back(std::move(slot));
    }
    return req;
}

inline NetworkFunction random_nf(Rng& r, const std::string& id, const std::string& domain) {
    static const std::vector<NfKind> kinds{NfKind::Gnb, NfKind::CuCp, NfKind::CuUp,
                                           NfKind::Du,  NfKind::CoreNf, NfKind::Other};
    NetworkFunction nf;
    nf.id = id;
    nf.kind = r.pick(kinds);
    nf.domain_id = domain;
    nf.ep_max = static_cast<int>(r.integer(1, 8));
    for (const char* flag : {"data_sensitivity", "availability", "location"}) {
        nf.criticality.flags.push_back({flag, r.coin()});
    }
    const auto n_rules = r.integer(0, 5);
    for (std::int64_t i = 0; i < n_rules; ++i) nf.rules.push_back(random_rule(r, id + "-r" + std::to_string(i)));
    const auto n_req = r.integer(0, 3);
    for (std::int64_t i = 0; i < n_req; ++i) {
        nf.control_sets.push_back(random_requirement(r, id + "-q" + std::to_string(i)));
    }
    const auto n_ep = r.integer(0, nf.ep_max);
    for (std::int64_t i = 0; i < n_ep; ++i) {
        nf.entry_points.push_back(random_entry_point(r, id + "-e" + std::to_string(i)));
    }
    nf.impact_context = random_magnitude(r);
    return nf;
}

// Up to `max_domains` domains (at least one non-empty) and 1..`max_nfs` NFs
// with random undirected links.
inline Network random_network(Rng& r, int max_domains = 3, int max_nfs = 10) {
    const auto n_domains = r.integer(1, max_domains);
    std::vector<Domain> domains;
    for (std::int64_t d = 0; d < n_domains; ++d) {
        domains.push_back({"d" + std::to_string(d), "Domain " + std::to_string(d), {}});
    }
    const auto n_nfs = r.integer(1, max_nfs);
    std::vector<NetworkFunction> nfs;
    for (std::int64_t i = 0; i < n_nfs; ++i) {
        const auto& dom = domains[static_cast<std::size_t>(r.integer(0, n_domains - 1))].id;
        nfs.push_back(random_nf(r, "nf" + std::to_string(i), dom));
    }
    for (std::size_t i = 0; i < nfs.size(); ++i) {
        for (std::size_t j = i + 1; j < nfs.size(); ++j) {
            if (r.coin(0.3)) {
                nfs[i].neighbor_ids.insert(nfs[j].id);
                nfs[j].neighbor_ids.insert(nfs[i].id);
            }
        }
    }
    return Network(std::move(domains), std::move(nfs));
}

// ----------------------------------------------------------------- oracles

namespace oracle {

inline double om(const OrderOfMagnitudeContext& ctx) {
    if (const auto* radio = std::get_if<RadioMagnitude>(&ctx)) {
        if (radio->ue_connected == 0) return 0.0;
        return double(radio->ue_potential_attackers) / double(radio->ue_connected);
    }
    if (const auto* ratio = std::get_if<RatioMagnitude>(&ctx)) {
        if (ratio->total_units == 0) return 0.0;
        return double(ratio->noncompliant_units) / double(ratio->total_units);
    }
    return std::get<FixedMagnitude>(ctx).value;
}

inline double requirement_sce(const ControlRequirement& req) {
    double sum = 0.0;
    for (const auto& c : req.controls) {
        double cr = c.correctness;
        if (c.context && c.context->null_scheme_preferred) {
            const double pn = double(c.context->ue_connected) / double(c.context->ue_capacity);
            cr = cr - cr * pn;
        }
        sum += (c.implemented ? 1.0 : 0.0) * cr;
    }
    return sum / double(req.controls.size());
}

inline double nf_sce(const NetworkFunction& nf) {
    if (nf.control_sets.empty()) return 1.0;
    double sum = 0.0;
    for (const auto& req : nf.control_sets) sum += requirement_sce(req);
    return sum / double(nf.control_sets.size());
}

inline double scale(double x) { return x <= 0.25 ? x * 2.0 : 0.5 + (x - 0.25) * (0.5 / 0.75); }

struct Local {
    double r_nc = 0, v_imp = 0, d_nc = 0, a_cr = 0, env_imp = 0, vulmet_l = 0;
    double five() const { return (r_nc + v_imp + d_nc + a_cr + env_imp) / 5.0; }
};

inline Local local_without_env(const NetworkFunction& nf) {
    Local l;
    int nc = 0;
    double nca_sum = 0.0, timer_sum = 0.0;
    for (const auto& rule : nf.rules) {
        if (rule.noncompliant_attributes > 0) {
            ++nc;
            nca_sum += double(rule.noncompliant_attributes) / double(rule.total_attributes);
            timer_sum += rule.nc_timer;
        }
    }
    if (!nf.rules.empty()) l.r_nc = double(nc) / double(nf.rules.size());
    if (nc > 0) {
        l.v_imp = scale((nca_sum / nc) * om(*nf.impact_context));
        l.d_nc = timer_sum / nc;
    }
    int raised = 0;
    for (const auto& f : nf.criticality.flags) raised += f.raised ? 1 : 0;
    const auto m = nf.criticality.flags.size();
    if (m > 0) {
        l.a_cr = double(raised) / double(m);
        if (m == 3) l.a_cr = std::round(l.a_cr * 100.0) / 100.0;
    }
    l.vulmet_l = nf.rules.empty() ? 0.0 : (l.r_nc + l.v_imp + l.d_nc) / 3.0;
    return l;
}

inline std::map<std::string, Local> locals(const Network& net) {
    std::map<std::string, Local> out;
    for (const auto& nf : net.functions()) out[nf.id] = local_without_env(nf);
    for (const auto& nf : net.functions()) {
        double sum = 0.0;
        for (const auto& nb : nf.neighbor_ids) sum += out.at(nb).vulmet_l;
        out[nf.id].env_imp = nf.neighbor_ids.empty() ? 0.0 : sum / double(nf.neighbor_ids.size());
    }
    return out;
}

inline double as_e(const NetworkFunction& nf) {
    double sum = 0.0;
    for (const auto& ep : nf.entry_points) {
        sum += double(ep.data_items_exposed) / double(ep.data_items_total) * om(ep.om_context);
    }
    return sum / double(std::max<std::size_t>(nf.ep_max, nf.entry_points.size()));
}

inline double composite(double sce, double vul, double ase, double ws = 1.0 / 3, double wv = 1.0 / 3,
                        double wa = 1.0 / 3) {
    return ws * sce + wv * (1.0 - vul) + wa * (1.0 - ase);
}

struct Triple {
    double sce = 0, vulmet = 0, as_e = 0;
};

inline Triple domain(const Network& net, const std::string& id) {
    const auto l = locals(net);
    Triple t;
    int n = 0;
    for (const auto& nf : net.functions()) {
        if (nf.domain_id != id) continue;
        ++n;
        t.sce += nf_sce(nf);
        t.as_e += as_e(nf);
        t.vulmet += l.at(nf.id).five();
    }
    t.sce /= n;
    t.as_e /= n;
    t.vulmet /= n;
    return t;
}

inline Triple network(const Network& net) {
    Triple t;
    int n = 0;
    for (const auto& d : net.domains()) {
        bool empty = true;
        for (const auto& nf : net.functions()) empty = empty && nf.domain_id != d.id;
        if (empty) continue;
        const auto dt = domain(net, d.id);
        t.sce += dt.sce;
        t.vulmet += dt.vulmet;
        t.as_e += dt.as_e;
        ++n;
    }
    t.sce /= n;
    t.vulmet /= n;
    t.as_e /= n;
    return t;
}

} // namespace oracle

} // namespace testsupport
