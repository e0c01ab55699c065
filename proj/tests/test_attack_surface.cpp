#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "secstate/attack_surface.hpp"
#include "secstate/errors.hpp"
#include "support.hpp"

using namespace secstate;
using doctest::Approx;
using testsupport::Rng;

namespace {

EntryPoint ep(std::int64_t exposed, std::int64_t total, OrderOfMagnitudeContext om,
              EntryPointCategory cat = EntryPointCategory::Radio3gpp) {
    EntryPoint e;
    e.ep_id = "ep";
    e.category = cat;
    e.data_items_total = total;
    e.data_items_exposed = exposed;
    e.om_context = om;
    return e;
}

double sum_categories(const ExposureResult& r) {
    return std::accumulate(r.by_category.begin(), r.by_category.end(), 0.0);
}

} // namespace

TEST_CASE("order of magnitude") {
    CHECK(order_of_magnitude(RadioMagnitude{5, 50}) == Approx(0.1).epsilon(1e-15));
    CHECK(order_of_magnitude(RadioMagnitude{0, 0}) == 0.0);
    CHECK(order_of_magnitude(RatioMagnitude{1, 4}) == 0.25);
    CHECK(order_of_magnitude(RatioMagnitude{0, 0}) == 0.0);
    CHECK(order_of_magnitude(FixedMagnitude{0.7}) == 0.7);
}

TEST_CASE("entry point exposure") {
    CHECK(entry_point_exposure(ep(10, 40, FixedMagnitude{0.1})) == Approx(0.025).epsilon(1e-15));
    CHECK(entry_point_exposure(ep(0, 40, FixedMagnitude{0.9})) == 0.0);
    CHECK(entry_point_exposure(ep(40, 40, FixedMagnitude{1.0})) == 1.0);
    try {
        entry_point_exposure(ep(0, 0, FixedMagnitude{0.5}));
        FAIL("zero data items accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroDataItems);
    }
}

TEST_CASE("attack surface exposure") {
    std::vector<EntryPoint> none;
    CHECK(attack_surface_exposure({none, 4}).total == 0.0);

    std::vector<EntryPoint> one{ep(10, 40, FixedMagnitude{0.1})};
    CHECK(attack_surface_exposure({one, 10}).total == Approx(0.0025).epsilon(1e-15));

    std::vector<EntryPoint> full(3, ep(5, 5, FixedMagnitude{1.0}));
    CHECK(attack_surface_exposure({full, 3}).total == 1.0);

    std::vector<EntryPoint> idle(3, ep(0, 5, FixedMagnitude{1.0}));
    CHECK(attack_surface_exposure({idle, 3}).total == 0.0);
}

TEST_CASE("category breakdown") {
    std::vector<EntryPoint> eps{ep(1, 2, FixedMagnitude{0.4}, EntryPointCategory::Radio3gpp),
                                ep(1, 4, FixedMagnitude{1.0}, EntryPointCategory::Oam),
                                ep(3, 3, FixedMagnitude{0.2}, EntryPointCategory::Oam)};
    const auto r = attack_surface_exposure({eps, 5});
    CHECK(r.by_category[static_cast<std::size_t>(EntryPointCategory::Radio3gpp)] == Approx(0.04));
    CHECK(r.by_category[static_cast<std::size_t>(EntryPointCategory::Oam)] == Approx(0.09));
    CHECK(r.by_category[static_cast<std::size_t>(EntryPointCategory::Oran)] == 0.0);
    CHECK(std::abs(sum_categories(r) - r.total) < 1e-12);
}

TEST_CASE("property: AS_E in [0,1], categories sum to total, matches the oracle") {
    Rng rng(0x5eed0301);
    for (int i = 0; i < 5000; ++i) {
        const auto nf = testsupport::random_nf(rng, "nf", "d");
        const auto r = attack_surface_exposure(describe_attack_surface(nf));
        REQUIRE(r.total >= 0.0);
        REQUIRE(r.total <= 1.0);
        CHECK(std::abs(sum_categories(r) - r.total) < 1e-12);
        CHECK(r.total == Approx(testsupport::oracle::as_e(nf)).epsilon(1e-12));
    }
}

TEST_CASE("property: more exposure, more entry points, or larger magnitude never lower AS_E") {
    Rng rng(0x5eed0302);
    for (int i = 0; i < 5000; ++i) {
        auto nf = testsupport::random_nf(rng, "nf", "d");
        const double base = attack_surface_exposure(describe_attack_surface(nf)).total;
        if (!nf.entry_points.empty()) {
            auto more = nf;
            auto& e = more.entry_points[static_cast<std::size_t>(
                rng.integer(0, static_cast<std::int64_t>(more.entry_points.size()) - 1))];
            e.data_items_exposed = rng.integer(e.data_items_exposed, e.data_items_total);
            CHECK(attack_surface_exposure(describe_attack_surface(more)).total >= base);

            auto louder = nf;
            auto& l = louder.entry_points.front();
            if (auto* f = std::get_if<FixedMagnitude>(&l.om_context)) f->value = rng.uniform(f->value, 1.0);
            if (auto* r = std::get_if<RatioMagnitude>(&l.om_context)) {
                r->noncompliant_units = rng.integer(r->noncompliant_units, r->total_units);
            }
            if (auto* r = std::get_if<RadioMagnitude>(&l.om_context)) {
                r->ue_potential_attackers = rng.integer(r->ue_potential_attackers, r->ue_connected);
            }
            CHECK(attack_surface_exposure(describe_attack_surface(louder)).total >= base);
        }
        if (static_cast<int>(nf.entry_points.size()) < nf.ep_max) {
            auto added = nf;
            added.entry_points.push_back(testsupport::random_entry_point(rng, "extra"));
            CHECK(attack_surface_exposure(describe_attack_surface(added)).total >= base);
        }
    }
}
