#include "secstate/attack_surface.hpp"

#include <algorithm>

#include "secstate/errors.hpp"

namespace secstate {

namespace {

double guarded_ratio(std::int64_t num, std::int64_t den) {
    if (den <= 0) return 0.0;
    return std::clamp(static_cast<double>(num) / static_cast<double>(den), 0.0, 1.0);
}

} // namespace

AttackSurfaceDescriptor describe_attack_surface(const NetworkFunction& nf) {
    return AttackSurfaceDescriptor{nf.entry_points, nf.ep_max};
}

double order_of_magnitude(const OrderOfMagnitudeContext& ctx) {
    if (const auto* r = std::get_if<RadioMagnitude>(&ctx)) {
        return guarded_ratio(r->ue_potential_attackers, r->ue_connected);
    }
    if (const auto* q = std::get_if<RatioMagnitude>(&ctx)) {
        return guarded_ratio(q->noncompliant_units, q->total_units);
    }
    return std::clamp(std::get<FixedMagnitude>(ctx).value, 0.0, 1.0);
}

double entry_point_exposure(const EntryPoint& ep) {
    if (ep.data_items_total <= 0) {
        throw Error(ErrorCode::ZeroDataItems, "entry point '" + ep.ep_id + "' has no data items");
    }
    const double exposed = guarded_ratio(ep.data_items_exposed, ep.data_items_total);
    return exposed * order_of_magnitude(ep.om_context);
}

ExposureResult attack_surface_exposure(const AttackSurfaceDescriptor& asd) {
    ExposureResult result;
    if (asd.entry_points.empty()) return result;
    if (asd.ep_max <= 0) throw Error(ErrorCode::ZeroCapacity, "ep_max must be positive");
    const double cap = static_cast<double>(std::max<std::size_t>(asd.ep_max, asd.ep_configured()));
    for (const auto& ep : asd.entry_points) {
        const double share = entry_point_exposure(ep) / cap;
        result.by_category[static_cast<std::size_t>(ep.category)] += share;
    }
    for (double v : result.by_category) result.total += v;
    result.total = std::min(result.total, 1.0);
    return result;
}

} // namespace secstate
