#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "secstate/errors.hpp"
#include "secstate/model.hpp"
#include "secstate/simulator.hpp"
#include "support.hpp"

using namespace secstate;
using testsupport::Rng;

namespace {

json small_topology() {
    return json::parse(R"({
      "domains": [{"id": "ran", "name": "RAN"}, {"id": "core", "name": "Core"}],
      "network_functions": [
        {"id": "a", "kind": "gNB", "domain": "ran", "ep_max": 2,
         "entry_points": [{"id": "cell", "category": "3GPP-Radio", "channels": ["RRC"],
                           "data_items_total": 3, "data_items_exposed": 1,
                           "order_of_magnitude": {"radio": {"ue_potential_attackers": 1, "ue_connected": 10}}}]},
        {"id": "b", "kind": "CU-CP", "domain": "ran", "ep_max": 1},
        {"id": "c", "kind": "core-NF", "domain": "core", "ep_max": 1}
      ],
      "links": [["a", "b"], ["b", "c"]]
    })");
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected secstate::Error");
    return ErrorCode::UsageError;
}

} // namespace

TEST_CASE("well-formed topology loads with symmetric links") {
    const Network net = load_topology(small_topology());
    CHECK(net.domains().size() == 2);
    CHECK(net.functions().size() == 3);
    CHECK(net.domain("ran").member_nf_ids == std::vector<NfId>{"a", "b"});
    CHECK(net.nf("b").neighbor_ids == std::set<NfId>{"a", "c"});
    CHECK(net.nf("a").neighbor_ids == std::set<NfId>{"b"});
}

TEST_CASE("NF referencing a missing domain is rejected") {
    auto doc = small_topology();
    doc["network_functions"][2]["domain"] = "transport";
    CHECK(code_of([&] { load_topology(doc); }) == ErrorCode::ValidationError);
}

TEST_CASE("exposed data items above the total are rejected") {
    auto doc = small_topology();
    doc["network_functions"][0]["entry_points"][0]["data_items_exposed"] = 5;
    try {
        load_topology(doc);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationError);
        // Diagnostics name the offending field by JSON pointer.
        CHECK(std::string(e.what()).find("/network_functions/0/entry_points/0") != std::string::npos);
    }
}

TEST_CASE("other invariant violations") {
    SUBCASE("more entry points than ep_max") {
        auto doc = small_topology();
        doc["network_functions"][0]["ep_max"] = 0;
        CHECK(code_of([&] { load_topology(doc); }) == ErrorCode::ValidationError);
    }
    SUBCASE("radio attackers above connected") {
        auto doc = small_topology();
        doc["network_functions"][0]["entry_points"][0]["order_of_magnitude"]["radio"]["ue_potential_attackers"] = 11;
        CHECK(code_of([&] { load_topology(doc); }) == ErrorCode::ValidationError);
    }
    SUBCASE("asymmetric neighbor list") {
        auto doc = small_topology();
        doc["network_functions"][0]["neighbors"] = json::array({"c"});
        CHECK(code_of([&] { load_topology(doc); }) == ErrorCode::ValidationError);
    }
    SUBCASE("link to unknown NF") {
        auto doc = small_topology();
        doc["links"].push_back(json::array({"a", "zz"}));
        CHECK(code_of([&] { load_topology(doc); }) == ErrorCode::ValidationError);
    }
    SUBCASE("unknown category") {
        auto doc = small_topology();
        doc["network_functions"][0]["entry_points"][0]["category"] = "Satellite";
        CHECK(code_of([&] { load_topology(doc); }) == ErrorCode::ValidationError);
    }
    SUBCASE("malformed text reports a parse error") {
        CHECK(code_of([&] { load_topology_text("{\"domains\": ["); }) == ErrorCode::ParseError);
    }
}

TEST_CASE("neighbors") {
    const Network net = load_topology(small_topology());
    SUBCASE("chain a-b-c, query b") {
        auto nb = neighbors(net, "b");
        REQUIRE(nb.size() == 2);
        CHECK(nb[0]->id == "a");
        CHECK(nb[1]->id == "c");
    }
    SUBCASE("isolated NF") {
        auto doc = small_topology();
        doc["links"] = json::array();
        CHECK(neighbors(load_topology(doc), "b").empty());
    }
    SUBCASE("unknown id") { CHECK(code_of([&] { neighbors(net, "zz"); }) == ErrorCode::UnknownId); }
}

TEST_CASE("property: serialize then load round-trips random networks") {
    Rng rng(0x5eed0001);
    for (int i = 0; i < 200; ++i) {
        const Network net = testsupport::random_network(rng);
        net.validate();
        const Network back = load_topology(serialize(net));
        CHECK(back == net);
        CHECK(serialize(back) == serialize(net));
    }
}

TEST_CASE("property: neighbor symmetry survives random link mutations") {
    Rng rng(0x5eed0002);
    for (int round = 0; round < 100; ++round) {
        Network net = testsupport::random_network(rng, 3, 8);
        std::vector<NfId> ids;
        for (const auto& f : net.functions()) ids.push_back(f.id);
        if (ids.size() < 2) continue;
        for (int k = 0; k < 30; ++k) {
            const auto& a = rng.pick(ids);
            const auto& b = rng.pick(ids);
            if (a == b) continue;
            Event ev;
            ev.kind = EventKind::TopologyChanged;
            ev.target.nf = a;
            LinkChange change;
            (rng.coin() ? change.add : change.remove).emplace_back(a, b);
            ev.payload = change;
            apply_event_in_place(net, ev);
            for (const auto& f : net.functions()) {
                for (const auto& n : f.neighbor_ids) CHECK(net.nf(n).neighbor_ids.count(f.id) == 1);
            }
        }
        CHECK_NOTHROW(net.validate());
    }
}

TEST_CASE("top-level arrays are required") {
    CHECK(code_of([] { load_topology(json::object()); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { load_topology(json{{"domains", json::array()}}); }) == ErrorCode::ValidationError);
    CHECK(load_topology(json{{"domains", json::array()}, {"network_functions", json::array()}}).functions().empty());
}
