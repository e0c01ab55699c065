#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "secstate/errors.hpp"
#include "secstate/intent.hpp"
#include "support.hpp"

using namespace secstate;
using doctest::Approx;
using testsupport::Rng;

namespace {

Network three_domains() {
    std::vector<Domain> doms{{"ran", "RAN", {}}, {"transport", "Transport", {}}, {"core", "Core", {}}};
    std::vector<NetworkFunction> nfs;
    for (const char* d : {"ran", "transport", "core"}) {
        NetworkFunction nf;
        nf.id = std::string(d) + "-nf";
        nf.domain_id = d;
        nfs.push_back(nf);
    }
    return Network(doms, nfs);
}

Intent intent(const std::string& id, Scope scope, double target) {
    Intent i;
    i.intent_id = id;
    i.scope = std::move(scope);
    i.target_score = target;
    return i;
}

MetricSnapshot snap(Scope scope, double sce, double vulmet, double as_e) {
    MetricSnapshot s;
    s.scope = std::move(scope);
    s.sce = sce;
    s.vulmet = vulmet;
    s.as_e = as_e;
    s.composite = composite_score(sce, vulmet, as_e, {});
    return s;
}

} // namespace

TEST_CASE("decomposition") {
    const Network net = three_domains();
    SUBCASE("network intent fans out to every domain") {
        const auto kids = decompose_intent(intent("g", Scope::network(), 0.7), net);
        REQUIRE(kids.size() == 3);
        CHECK(kids[0].scope == Scope::domain("ran"));
        CHECK(kids[1].scope == Scope::domain("transport"));
        CHECK(kids[2].scope == Scope::domain("core"));
        for (const auto& k : kids) {
            CHECK(k.target_score == 0.7);
            CHECK(k.parent_id == "g");
            CHECK(Scope::network().contains(k.scope, net));
        }
    }
    SUBCASE("domain intent is its own decomposition") {
        const auto i = intent("r", Scope::domain("ran"), 0.6);
        const auto kids = decompose_intent(i, net);
        REQUIRE(kids.size() == 1);
        CHECK(kids[0] == i);
    }
    SUBCASE("no domains") {
        try {
            decompose_intent(intent("g", Scope::network(), 0.7), Network{});
            FAIL("decomposed over nothing");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NoDomains);
        }
    }
    SUBCASE("unknown domain") {
        try {
            decompose_intent(intent("x", Scope::domain("edge"), 0.7), net);
            FAIL("unknown scope accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnknownScope);
        }
    }
}

TEST_CASE("evaluation") {
    const auto dom = Scope::domain("ran");
    SUBCASE("composite above target") {
        // (0.91 + 0.7 + 0.55) / 3 = 0.72
        const auto r = evaluate_intent(intent("i", dom, 0.7), snap(dom, 0.91, 0.3, 0.45));
        CHECK(r.measured == Approx(0.72).epsilon(1e-12));
        CHECK(r.compliant);
        CHECK(r.shortfall == 0.0);
    }
    SUBCASE("ScE drags the score below target") {
        const auto r = evaluate_intent(intent("i", dom, 0.7), snap(dom, 0.3, 0.1, 0.2));
        CHECK(r.measured == Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK_FALSE(r.compliant);
        CHECK(r.shortfall == Approx(0.7 - 2.0 / 3.0).epsilon(1e-12));
        CHECK(r.top_contributor() == MetricKind::ScE);
        CHECK(r.ranked_contributions[0].contribution == Approx(0.7 / 3.0).epsilon(1e-12));
    }
    SUBCASE("vacuous target") {
        CHECK(evaluate_intent(intent("i", dom, 0.0), snap(dom, 0, 1, 1)).compliant);
    }
    SUBCASE("scope mismatch") {
        try {
            evaluate_intent(intent("i", dom, 0.5), snap(Scope::domain("core"), 1, 0, 0));
            FAIL("mismatch accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ScopeMismatch);
        }
    }
    SUBCASE("ties resolve ScE, VulMet, AS_E") {
        // Weights and values chosen so all three contributions are exactly 0.125.
        auto tied = intent("i", dom, 1.0);
        tied.weights = {0.25, 0.25, 0.5};
        const auto r = evaluate_intent(tied, snap(dom, 0.5, 0.5, 0.25));
        CHECK(r.ranked_contributions[0].contribution == r.ranked_contributions[2].contribution);
        REQUIRE(r.ranked_contributions.size() == 3);
        CHECK(r.ranked_contributions[0].metric == MetricKind::ScE);
        CHECK(r.ranked_contributions[1].metric == MetricKind::VulMet);
        CHECK(r.ranked_contributions[2].metric == MetricKind::AsE);
        const auto q = evaluate_intent(tied, snap(dom, 1.0, 0.5, 0.25));
        CHECK(q.ranked_contributions[0].metric == MetricKind::VulMet);
        CHECK(q.ranked_contributions[1].metric == MetricKind::AsE);
    }
}

TEST_CASE("report cycle") {
    const Network net = three_domains();
    HierarchySnapshot h = compute_hierarchy(net, {}, {});
    CHECK(report_cycle({}, net, h).empty());
    auto a = intent("a", Scope::domain("ran"), 0.5);
    auto b = intent("b", Scope::domain("ran"), 0.9);
    const auto reports = report_cycle({a, b}, net, h);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].intent_id == "a");
    CHECK(reports[1].intent_id == "b");
    auto off = intent("off", Scope::network(), 0.5);
    off.active = false;
    CHECK(report_cycle({off}, net, h).empty());
}

TEST_CASE("registry") {
    IntentRegistry reg;
    reg.create(intent("a", Scope::network(), 0.7));
    CHECK_THROWS_AS(reg.create(intent("a", Scope::network(), 0.7)), Error);
    CHECK_THROWS_AS(reg.create(intent("b", Scope::network(), 1.2)), Error);
    auto upd = intent("a", Scope::network(), 0.8);
    reg.update(upd);
    CHECK(reg.find("a")->target_score == 0.8);
    reg.deactivate("a");
    CHECK_FALSE(reg.find("a")->active);
    CHECK_THROWS_AS(reg.update(intent("zz", Scope::network(), 0.1)), Error);
}

TEST_CASE("property: contributions partition the gap and rankings are sorted") {
    Rng rng(0x5eed0601);
    const auto dom = Scope::domain("ran");
    for (int i = 0; i < 10000; ++i) {
        const double w1 = rng.uniform(), w2 = rng.uniform() * (1 - w1);
        auto in = intent("i", dom, rng.uniform());
        in.weights = {w1, w2, 1.0 - w1 - w2};
        const auto s = snap(dom, rng.uniform(), rng.uniform(), rng.uniform());
        const auto r = evaluate_intent(in, s);
        double total = r.measured;
        for (const auto& c : r.ranked_contributions) total += c.contribution;
        CHECK(std::abs(total - 1.0) < 1e-12);
        for (std::size_t k = 1; k < r.ranked_contributions.size(); ++k) {
            CHECK(r.ranked_contributions[k - 1].contribution >= r.ranked_contributions[k].contribution);
        }
        CHECK(r.shortfall == std::max(0.0, r.target - r.measured));
        if (r.compliant) {
            auto better = s;
            better.sce = rng.uniform(s.sce, 1.0);
            better.vulmet = rng.uniform(0.0, s.vulmet);
            CHECK(evaluate_intent(in, better).compliant);
        }
    }
}

TEST_CASE("JSON codecs") {
    auto i = intent("g", Scope::network(), 0.7);
    i.weights = {0.5, 0.25, 0.25};
    CHECK(intent_from_json(to_json(i)) == i);
    const auto r = evaluate_intent(intent("i", Scope::domain("ran"), 0.9), snap(Scope::domain("ran"), 0.5, 0.1, 0.3));
    CHECK(report_from_json(to_json(r)) == r);
}
