#pragma once

#include <vector>

#include "secstate/model.hpp"

namespace secstate {

/// Security control effectiveness for one requirement, with its sub-measures.
struct SceResult {
    double coverage_score = 0.0;
    std::vector<double> per_control_correctness;
    /// Largest null-scheme penalty factor applied to any control of the requirement.
    double penalty = 0.0;
    double effectiveness = 0.0;
};

/// Fraction of the requirement's controls that are implemented.
double coverage_score(const ControlRequirement& req);

/// Null-scheme penalty factor: connected UEs over cell capacity when the null
/// scheme is the preferred choice, otherwise 0.
double penalty(const PenaltyContext& ctx);

/// Correctness after the context penalty: cr - cr * P_N, never below 0.
double correctness(const ControlSlot& slot);

/// ScE as the mean of per-control coverage x correctness products.
SceResult effectiveness(const ControlRequirement& req);

/// Mean ScE over an NF's requirements; 1 when the NF carries no requirement.
double nf_effectiveness(const NetworkFunction& nf);

} // namespace secstate
