#pragma once

#include <array>
#include <span>

#include "secstate/model.hpp"

namespace secstate {

// AS = <E, C, D> for one network function: its configured entry points (each
// carrying channels and data items) and the entry-point capacity.
struct AttackSurfaceDescriptor {
    std::span<const EntryPoint> entry_points;
    int ep_max = 1;

    std::size_t ep_configured() const { return entry_points.size(); }
};

AttackSurfaceDescriptor describe_attack_surface(const NetworkFunction& nf);

struct ExposureResult {
    double total = 0.0;
    // Indexed by EntryPointCategory; sums to `total`.
    std::array<double, kEntryPointCategoryCount> by_category{};
};

double order_of_magnitude(const OrderOfMagnitudeContext& ctx);

// Exposed data-item fraction times the entry point's order of magnitude.
double entry_point_exposure(const EntryPoint& ep);

// AS_E = sum of entry-point exposures / ep_max, which equals the mean exposure
// over configured entry points scaled by EP_C / EP_Max.
ExposureResult attack_surface_exposure(const AttackSurfaceDescriptor& asd);

} // namespace secstate
