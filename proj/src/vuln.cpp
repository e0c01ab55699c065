#include "secstate/vuln.hpp"

#include <algorithm>
#include <cmath>

#include "secstate/attack_surface.hpp"
#include "secstate/errors.hpp"

namespace secstate {

namespace {

// Accumulated increments that land within this distance of 1 count as saturated.
constexpr double kTimerSnap = 1e-12;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::size_t noncompliant_count(const NetworkFunction& nf) {
    return static_cast<std::size_t>(std::count_if(
        nf.rules.begin(), nf.rules.end(), [](const ComplianceRule& r) { return !r.compliant; }));
}

} // namespace

void ScanConfig::validate() const {
    if (!(scan_period > 0.0) || !(time_to_patch_limit > 0.0)) {
        throw Error(ErrorCode::ValidationError, "scan period and time-to-patch limit must be positive");
    }
    if (scan_period > time_to_patch_limit) {
        throw Error(ErrorCode::ValidationError, "scan period exceeds the time-to-patch limit");
    }
}

double ratio_noncompliant(const NetworkFunction& nf) {
    if (nf.rules.empty()) {
        throw Error(ErrorCode::NoRulesDefined, "network function '" + nf.id + "' has no rules");
    }
    return static_cast<double>(noncompliant_count(nf)) / static_cast<double>(nf.rules.size());
}

double ratio_noncompliant_attributes(const NetworkFunction& nf) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : nf.rules) {
        if (r.compliant) continue;
        if (r.total_attributes <= 0) {
            throw Error(ErrorCode::ValidationError,
                        "rule '" + r.rule_id + "' has no attributes");
        }
        sum += clamp01(static_cast<double>(r.noncompliant_attributes) /
                       static_cast<double>(r.total_attributes));
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double raw_impact(const NetworkFunction& nf) {
    if (noncompliant_count(nf) == 0) return 0.0;
    if (!nf.impact_context) {
        throw Error(ErrorCode::MissingContext,
                    "network function '" + nf.id + "' has non-compliant rules but no impact context");
    }
    return clamp01(ratio_noncompliant_attributes(nf) * order_of_magnitude(*nf.impact_context));
}

double scale_impact(double raw) {
    if (!(raw >= 0.0 && raw <= 1.0)) {
        throw Error(ErrorCode::OutOfRange, "raw impact " + std::to_string(raw) + " outside [0,1]");
    }
    if (raw <= 0.25) return raw / 0.25 * 0.5;
    return (raw - 0.25) / 0.75 * 0.5 + 0.5;
}

void update_nc_timers_in_place(NetworkFunction& nf, const ScanConfig& cfg) {
    const double step = cfg.timer_increment();
    for (auto& r : nf.rules) {
        if (r.compliant) {
            r.nc_timer = 0.0;
            continue;
        }
        const double next = r.nc_timer + step;
        r.nc_timer = next >= 1.0 - kTimerSnap ? 1.0 : next;
    }
}

NetworkFunction update_nc_timers(NetworkFunction nf, const ScanConfig& cfg) {
    update_nc_timers_in_place(nf, cfg);
    return nf;
}

double duration_noncompliance(const NetworkFunction& nf) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : nf.rules) {
        if (r.compliant) continue;
        sum += r.nc_timer;
        ++count;
    }
    return count == 0 ? 0.0 : clamp01(sum / static_cast<double>(count));
}

double asset_criticality(const CriticalityProfile& profile) {
    const auto m = profile.flags.size();
    if (m == 0) return 0.0;
    const auto k = std::count_if(profile.flags.begin(), profile.flags.end(),
                                 [](const CriticalityFlag& f) { return f.raised; });
    const double score = static_cast<double>(k) / static_cast<double>(m);
    if (m == 3) return std::round(score * 100.0) / 100.0;
    return score;
}

double environment_impact(const Network& net, std::string_view nf_id, const LocalStates& locals) {
    const auto nbrs = neighbors(net, nf_id);
    if (nbrs.empty()) return 0.0;
    double sum = 0.0;
    for (const auto* n : nbrs) {
        auto it = locals.find(n->id);
        if (it == locals.end()) {
            throw Error(ErrorCode::MissingLocalState, "no local state for neighbor '" + n->id + "'");
        }
        sum += it->second;
    }
    return clamp01(sum / static_cast<double>(nbrs.size()));
}

double vulmet_local(const NetworkFunction& nf, const ScanConfig& cfg) {
    cfg.validate();
    if (nf.rules.empty()) return 0.0;
    const double r_nc = ratio_noncompliant(nf);
    const double v_imp = scale_impact(raw_impact(nf));
    const double d_nc = duration_noncompliance(nf);
    return clamp01((r_nc + v_imp + d_nc) / 3.0);
}

LocalStates local_vulmets(const Network& net, const ScanConfig& cfg) {
    LocalStates out;
    for (const auto& f : net.functions()) out.emplace(f.id, vulmet_local(f, cfg));
    return out;
}

VulnMeasures vuln_measures(const Network& net, std::string_view nf_id, const LocalStates& locals) {
    const auto& f = net.nf(nf_id);
    VulnMeasures m;
    if (!f.rules.empty()) {
        m.r_nc = ratio_noncompliant(f);
        m.v_imp = scale_impact(raw_impact(f));
        m.d_nc = duration_noncompliance(f);
    }
    m.a_cr = asset_criticality(f.criticality);
    m.env_imp = environment_impact(net, nf_id, locals);
    m.vulmet_local = clamp01((m.r_nc + m.v_imp + m.d_nc) / 3.0);
    return m;
}

double vulmet_domain(const Network& net, std::string_view domain_id, const ScanConfig& cfg) {
    const auto& d = net.domain(domain_id);
    if (d.member_nf_ids.empty()) {
        throw Error(ErrorCode::EmptyDomain, "domain '" + d.id + "' has no network functions");
    }
    const auto locals = local_vulmets(net, cfg);
    double sum = 0.0;
    for (const auto& id : d.member_nf_ids) sum += vuln_measures(net, id, locals).five_measure_mean();
    return clamp01(sum / static_cast<double>(d.member_nf_ids.size()));
}

} // namespace secstate
