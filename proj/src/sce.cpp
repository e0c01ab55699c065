#include "secstate/sce.hpp"

#include <algorithm>

#include "secstate/errors.hpp"

namespace secstate {

namespace {

void require_controls(const ControlRequirement& req) {
    if (req.controls.empty()) {
        throw Error(ErrorCode::EmptyControlList,
                    "requirement '" + req.requirement_id + "' has no controls");
    }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

double coverage_score(const ControlRequirement& req) {
    require_controls(req);
    const auto implemented = std::count_if(req.controls.begin(), req.controls.end(),
                                           [](const ControlSlot& s) { return s.implemented; });
    return static_cast<double>(implemented) / static_cast<double>(req.controls.size());
}

double penalty(const PenaltyContext& ctx) {
    if (ctx.ue_capacity <= 0) throw Error(ErrorCode::ZeroCapacity, "cell capacity must be positive");
    if (!ctx.null_scheme_preferred) return 0.0;
    return clamp01(static_cast<double>(ctx.ue_connected) / static_cast<double>(ctx.ue_capacity));
}

double correctness(const ControlSlot& slot) {
    const double base = clamp01(slot.correctness);
    if (!slot.context) return base;
    const double deduction = base * penalty(*slot.context);
    return std::max(0.0, base - deduction);
}

SceResult effectiveness(const ControlRequirement& req) {
    require_controls(req);
    SceResult result;
    result.coverage_score = coverage_score(req);
    result.per_control_correctness.reserve(req.controls.size());
    double sum = 0.0;
    for (const auto& slot : req.controls) {
        const double cr = correctness(slot);
        result.per_control_correctness.push_back(cr);
        if (slot.context) result.penalty = std::max(result.penalty, penalty(*slot.context));
        if (slot.implemented) sum += cr;
    }
    result.effectiveness = clamp01(sum / static_cast<double>(req.controls.size()));
    return result;
}

double nf_effectiveness(const NetworkFunction& nf) {
    if (nf.control_sets.empty()) return 1.0;
    double sum = 0.0;
    for (const auto& req : nf.control_sets) sum += effectiveness(req).effectiveness;
    return sum / static_cast<double>(nf.control_sets.size());
}

} // namespace secstate
