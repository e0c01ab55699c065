#pragma once

#include <map>
#include <string>

#include "secstate/model.hpp"

namespace secstate {

// Durations are in simulated days.
struct ScanConfig {
    double scan_period = 1.0;
    double time_to_patch_limit = 90.0;

    void validate() const;
    double timer_increment() const { return scan_period / time_to_patch_limit; }
};

// Mis-configuration vulnerability measures of one network function.
struct VulnMeasures {
    double r_nc = 0.0;
    double v_imp = 0.0;
    double d_nc = 0.0;
    double a_cr = 0.0;
    double env_imp = 0.0;
    double vulmet_local = 0.0;

    // Five-measure mean used by the domain rollup.
    double five_measure_mean() const { return (r_nc + v_imp + d_nc + a_cr + env_imp) / 5.0; }
};

using LocalStates = std::map<NfId, double, std::less<>>;

double ratio_noncompliant(const NetworkFunction& nf);

// Mean N_NCA / N_TA over the non-compliant rules; 0 when every rule complies.
double ratio_noncompliant_attributes(const NetworkFunction& nf);

// R_NCA x R_OM before scaling. Throws MissingContext when a non-compliant rule
// exists but the NF has no impact context.
double raw_impact(const NetworkFunction& nf);

// Piecewise-linear map sending [0, 0.25] onto [0, 0.5] and [0.25, 1] onto [0.5, 1].
double scale_impact(double raw);

// One scan: running timers advance by scan_period / time_to_patch_limit
// (capped at 1) and compliant rules reset to 0.
NetworkFunction update_nc_timers(NetworkFunction nf, const ScanConfig& cfg);
void update_nc_timers_in_place(NetworkFunction& nf, const ScanConfig& cfg);

double duration_noncompliance(const NetworkFunction& nf);

// k/m over the criticality flags. For m = 3 the value is rounded to two
// decimals (0, 0.33, 0.67, 1).
double asset_criticality(const CriticalityProfile& profile);

// Mean of the neighbors' local VulMet; 0 for an isolated NF.
double environment_impact(const Network& net, std::string_view nf_id, const LocalStates& locals);

// (R_NC + V_Imp + D_NC) / 3. An NF without rules has no mis-configuration
// surface and scores 0.
double vulmet_local(const NetworkFunction& nf, const ScanConfig& cfg);

// VulMet_L for every NF in the network.
LocalStates local_vulmets(const Network& net, const ScanConfig& cfg);

// All five measures plus VulMet_L for one NF.
VulnMeasures vuln_measures(const Network& net, std::string_view nf_id, const LocalStates& locals);

// Mean over the domain's NFs of the five-measure mean.
double vulmet_domain(const Network& net, std::string_view domain_id, const ScanConfig& cfg);

} // namespace secstate
