#include <catch2/catch_amalgamated.hpp>

#include "segtrust/json_io.hpp"
#include "segtrust/seg.hpp"
#include "segtrust/synthetic.hpp"
#include "support/oracles.hpp"

using namespace segtrust;

namespace {

InterestProfile prof(const std::string& bits) { return InterestProfile::from_string(bits); }

VehicleState state(const VehicleId& id, double x, double y, double v) {
    VehicleState s;
    s.id = id;
    s.x = x;
    s.y = y;
    s.v = v;
    return s;
}

// Snapshot with the given established (undirected) pairs, everything in range.
SegSnapshot linked_snapshot(const std::vector<VehicleId>& ids,
                            const std::vector<std::pair<VehicleId, VehicleId>>& links) {
    SegSnapshot snap;
    for (const auto& id : ids) {
        VehicleNode n;
        n.id = id;
        n.profile = prof("1111");
        n.state = state(id, 0.0, 0.0, 20.0);
        snap.nodes.emplace(id, std::move(n));
    }
    for (const auto& [a, b] : links) {
        snap.comm_edges.push_back(a < b ? EdgeKey{a, b} : EdgeKey{b, a});
        for (const auto& [from, to] : {EdgeKey{a, b}, EdgeKey{b, a}}) {
            SocialEdge e;
            e.from = from;
            e.to = to;
            e.et = LinkDuration::finite(30.0);
            e.shp = 1.0;
            e.tst = 0.8;
            e.established = true;
            snap.social_edges.emplace(EdgeKey{from, to}, e);
        }
    }
    std::sort(snap.comm_edges.begin(), snap.comm_edges.end());
    return snap;
}

} // namespace

TEST_CASE("homophily of binary interest profiles") {
    CHECK(homophily(prof("110"), prof("110")) == 1.0);
    CHECK(homophily(prof("110"), prof("001")) == 0.0);
    CHECK(homophily(prof("110"), prof("101")) == Catch::Approx(0.5));
    CHECK(homophily(prof("000"), prof("111")) == 0.0); // all-zero profile
    CHECK_THROWS_AS(homophily(prof("110"), prof("1100")), ProfileError);
}

TEST_CASE("homophily is symmetric and bounded") {
    SmallRng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint8_t> a(12), b(12);
        for (auto& bit : a) bit = rng.chance(0.5);
        for (auto& bit : b) bit = rng.chance(0.5);
        const double ab = homophily(InterestProfile(a), InterestProfile(b));
        const double ba = homophily(InterestProfile(b), InterestProfile(a));
        REQUIRE(ab == ba);
        REQUIRE(ab >= 0.0);
        REQUIRE(ab <= 1.0 + 1e-12);
    }
}

TEST_CASE("degree centrality") {
    const std::vector<VehicleId> ids{"a", "b", "c", "d", "e"};

    SECTION("linked to everyone") {
        auto snap = linked_snapshot(ids, {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"a", "e"}});
        CHECK(degree_centrality(snap, "a").value == 1.0);
        CHECK(degree_centrality(snap, "a").defined);
    }
    SECTION("isolated vehicle") {
        auto snap = linked_snapshot(ids, {{"b", "c"}});
        CHECK(degree_centrality(snap, "a").value == 0.0);
    }
    SECTION("two of four possible links") {
        auto snap = linked_snapshot(ids, {{"a", "b"}, {"a", "c"}});
        CHECK(degree_centrality(snap, "a").value == Catch::Approx(0.5));
    }
    SECTION("single-node snapshot is undefined") {
        auto snap = linked_snapshot({"a"}, {});
        const Centrality c = degree_centrality(snap, "a");
        CHECK_FALSE(c.defined);
        CHECK(c.value == 0.0);
    }
    SECTION("communication-link basis counts raw links") {
        auto snap = linked_snapshot(ids, {{"a", "b"}});
        snap.comm_edges.push_back({"a", "c"}); // comm only, no social edge
        std::sort(snap.comm_edges.begin(), snap.comm_edges.end());
        CHECK(degree_centrality(snap, "a", CentralityBasis::CommLinks).value ==
              Catch::Approx(0.5));
        CHECK(degree_centrality(snap, "a").value == Catch::Approx(0.25));
    }
    SECTION("unknown vehicle") {
        auto snap = linked_snapshot(ids, {});
        CHECK_THROWS_AS(degree_centrality(snap, "zz"), LookupError);
    }
}

TEST_CASE("expected link duration follows the four motion cases") {
    SECTION("same position, moving away at 30 and 20") {
        const auto et = expected_link_duration(state("i", 0, 0, 30), state("j", 0, 0, -20), 300);
        REQUIRE_FALSE(et.is_unbounded());
        CHECK(et.seconds() == Catch::Approx(6.0));
    }
    SECTION("identical velocities never separate") {
        const auto et =
            expected_link_duration(state("i", 100, 0, 25), state("j", 180, 0, 25), 300);
        CHECK(et.is_unbounded());
    }
    SECTION("front vehicle pulling away") {
        // i 100 m ahead at 30, j behind at 20: gap grows at 10 m/s.
        const auto et = expected_link_duration(state("i", 200, 0, 30), state("j", 100, 0, 20), 300);
        REQUIRE_FALSE(et.is_unbounded());
        CHECK(et.seconds() == Catch::Approx(20.0));
        CHECK(classify_motion(state("i", 200, 0, 30), state("j", 100, 0, 20)) ==
              MotionCase::MovingForwardInFront);
    }
    SECTION("overtaking consumes the gap plus the range") {
        // j behind and faster: exits when j is h ahead.
        const auto et = expected_link_duration(state("i", 200, 0, 20), state("j", 100, 0, 30), 300);
        REQUIRE_FALSE(et.is_unbounded());
        CHECK(et.seconds() == Catch::Approx(40.0));
    }
    SECTION("out of range is an error") {
        CHECK_THROWS_AS(expected_link_duration(state("i", 0, 0, 10), state("j", 500, 0, 10), 300),
                        NotInRangeError);
    }
}

TEST_CASE("expected link duration matches a stepped kinematic oracle") {
    SmallRng rng(777);
    for (int trial = 0; trial < 60; ++trial) {
        // Away-moving same-lane pair with a healthy relative speed.
        const double gap = rng.uniform(0.0, 250.0);
        const double vi = rng.uniform(5.0, 35.0);
        const double vj = -rng.uniform(5.0, 35.0);
        const auto i = state("i", 100.0 + gap, 0, vi);
        const auto j = state("j", 100.0, 0, vj);
        REQUIRE(classify_motion(i, j) == MotionCase::AwayFromEachOther);
        const auto et = expected_link_duration(i, j, 300.0);
        REQUIRE_FALSE(et.is_unbounded());
        const double exit = oracles::stepped_range_exit(i, j, 300.0);
        REQUIRE(exit >= 0.0);
        REQUIRE(std::abs(et.seconds() - exit) <= 0.02);
    }
}

TEST_CASE("direct trust estimate") {
    TrustWeights w;
    SECTION("product of centrality and homophily terms") {
        w.delta_t = 0.0;
        CHECK(direct_trust(0.5, 0.8, std::nullopt, w) == Catch::Approx(0.4));
    }
    SECTION("all-zero inputs give complete distrust") {
        CHECK(direct_trust(0.0, 0.0, std::nullopt, w) == 0.0);
    }
    SECTION("negative weight on the prior gives negative trust") {
        w.delta_t = -1.0;
        CHECK(direct_trust(0.0, 0.0, 0.6, w) == Catch::Approx(-0.6));
    }
    SECTION("result is clamped") {
        w.delta_t = -1.0;
        CHECK(direct_trust(0.0, 0.0, 0.6, w) >= -1.0);
        w.delta_t = 0.1;
        CHECK(direct_trust(1.0, 1.0, 1.0, w) <= 1.0);
    }
}

TEST_CASE("establishment predicate uses strict inequalities") {
    Thresholds th{.psi_h = 0.6, .psi_l = 12.0, .psi_t = 0.5};
    CHECK_FALSE(can_establish(0.23, LinkDuration::finite(100.0), 0.9, th));
    CHECK(can_establish(0.7, LinkDuration::unbounded(), 0.6, th));
    CHECK_FALSE(can_establish(0.6, LinkDuration::unbounded(), 0.6, th)); // shp == psi_h
    CHECK_FALSE(can_establish(0.7, LinkDuration::finite(12.0), 0.6, th)); // et == psi_l
    CHECK_FALSE(can_establish(0.7, LinkDuration::finite(13.0), 0.5, th)); // tst == psi_t
}

TEST_CASE("snapshot construction") {
    SegParams params;
    params.thresholds = Thresholds{.psi_h = 0.6, .psi_l = 12.0, .psi_t = 0.5};
    params.h = 300.0;

    SECTION("out-of-range pair gets no edges") {
        std::vector<VehicleState> states{state("a", 0, 0, 20), state("b", 400, 0, 20)};
        std::map<VehicleId, SocialAttrs> attrs{{"a", {prof("11"), {}}}, {"b", {prof("11"), {}}}};
        const SegSnapshot snap = build_snapshot(states, attrs, nullptr, 0.0, params);
        CHECK(snap.comm_edges.empty());
        CHECK(snap.social_edges.empty());
    }

    SECTION("low homophily blocks establishment at strict thresholds") {
        std::vector<VehicleState> states{state("a", 0, 0, 20), state("d", 100, 0, 20)};
        // 3 shared interests of 13 each: SHP = 3/13 ~ 0.23 < 0.6.
        std::map<VehicleId, SocialAttrs> attrs{
            {"a", {prof("111111111111100000000000"), {}}},
            {"d", {prof("000000000011111111111110"), {}}}};
        TrustSeeds seeds{{{"a", "d"}, 0.9}, {{"d", "a"}, 0.9}};
        const SegSnapshot snap = build_snapshot(states, attrs, nullptr, 0.0, params, seeds);
        const SocialEdge* e = snap.social("a", "d");
        REQUIRE(e != nullptr);
        CHECK(e->shp == Catch::Approx(3.0 / 13.0));
        CHECK(e->tst == Catch::Approx(0.9)); // seeded trust is present
        CHECK_FALSE(e->established);         // but homophily fails
    }

    SECTION("trust strictly increases on persisting links with a positive prior weight") {
        params.centrality_basis = CentralityBasis::CommLinks;
        params.weights = TrustWeights{.delta_d = 0.5, .delta_h = 1.0, .delta_t = 0.05,
                                      .delta_f = 1.0};
        std::vector<VehicleState> states{state("a", 0, 0, 20), state("b", 50, 0, 20)};
        std::map<VehicleId, SocialAttrs> attrs{{"a", {prof("1111"), {}}},
                                               {"b", {prof("1111"), {}}}};
        const SegSnapshot s0 = build_snapshot(states, attrs, nullptr, 0.0, params);
        const SegSnapshot s1 = build_snapshot(states, attrs, &s0, 1.0, params);
        const SegSnapshot s2 = build_snapshot(states, attrs, &s1, 2.0, params);
        // Hand trace: TST0 = 0 (no prior snapshot), TST1 = 0.5*1*1 = 0.5,
        // TST2 = 0.5 + 0.05*0.5 = 0.525.
        CHECK(s0.social("a", "b")->tst == 0.0);
        CHECK(s1.social("a", "b")->tst == Catch::Approx(0.5));
        CHECK(s2.social("a", "b")->tst == Catch::Approx(0.525));
        CHECK(s1.social("a", "b")->tst > s0.social("a", "b")->tst);
        CHECK(s2.social("a", "b")->tst > s1.social("a", "b")->tst);
    }

    SECTION("per-vehicle homophily thresholds take the stricter value") {
        std::vector<VehicleState> states{state("a", 0, 0, 20), state("b", 50, 0, 20)};
        // SHP = 2/3: passes the global 0.6 but not a's advertised 0.9.
        std::map<VehicleId, SocialAttrs> attrs{{"a", {prof("1110"), 0.9}},
                                               {"b", {prof("1101"), {}}}};
        TrustSeeds seeds{{{"a", "b"}, 0.9}, {{"b", "a"}, 0.9}};
        const SegSnapshot snap = build_snapshot(states, attrs, nullptr, 0.0, params, seeds);
        CHECK(snap.social("a", "b")->shp == Catch::Approx(2.0 / 3.0));
        CHECK_FALSE(snap.social("a", "b")->established);

        std::map<VehicleId, SocialAttrs> relaxed{{"a", {prof("1110"), {}}},
                                                 {"b", {prof("1101"), {}}}};
        const SegSnapshot snap2 = build_snapshot(states, relaxed, nullptr, 0.0, params, seeds);
        CHECK(snap2.social("a", "b")->established);
    }
}

TEST_CASE("established flags equal brute-force evaluation on random snapshots") {
    SmallRng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        RandomScenario sc = random_scenario(rng, 3 + rng.below(25));
        const SegSnapshot snap =
            build_snapshot(sc.states, sc.attrs, nullptr, 0.0, sc.params, sc.seeds);
        for (const auto& [key, e] : snap.social_edges) {
            const double psi_h = std::max(snap.nodes.at(e.from).psi_h, snap.nodes.at(e.to).psi_h);
            const bool expected = e.shp > psi_h && e.et.exceeds(sc.params.thresholds.psi_l) &&
                                  e.tst > sc.params.thresholds.psi_t;
            REQUIRE(e.established == expected);
            REQUIRE(e.tst >= -1.0);
            REQUIRE(e.tst <= 1.0);
        }
        for (const auto& [id, node] : snap.nodes) {
            const Centrality c = degree_centrality(snap, id);
            REQUIRE(c.value >= 0.0);
            REQUIRE(c.value <= 1.0);
        }
    }
}

TEST_CASE("trust asymmetry survives a serialization round trip") {
    SegParams params;
    params.thresholds.psi_h = 0.1;
    params.thresholds.psi_t = 0.0;
    std::vector<VehicleState> states{state("a", 0, 0, 20), state("b", 60, 0, 21)};
    std::map<VehicleId, SocialAttrs> attrs{{"a", {prof("1111"), {}}}, {"b", {prof("1111"), {}}}};
    TrustSeeds seeds{{{"a", "b"}, 0.9}, {{"b", "a"}, 0.4}};
    const SegSnapshot snap = build_snapshot(states, attrs, nullptr, 0.0, params, seeds);
    CHECK(snap.social("a", "b")->tst == Catch::Approx(0.9));
    CHECK(snap.social("b", "a")->tst == Catch::Approx(0.4));

    const SegSnapshot back = snapshot_from_json(snapshot_to_json(snap));
    CHECK(back.social("a", "b")->tst == Catch::Approx(0.9));
    CHECK(back.social("b", "a")->tst == Catch::Approx(0.4));
    CHECK(back.social("a", "b")->established == snap.social("a", "b")->established);
    CHECK(back.comm_edges == snap.comm_edges);
}

TEST_CASE("journeys require strictly increasing time labels") {
    SegTimeline timeline;
    auto add = [&](double t, const std::vector<std::pair<VehicleId, VehicleId>>& links) {
        SegSnapshot snap = linked_snapshot({"A", "B", "C", "D", "E", "G"}, links);
        snap.time = t;
        snap.index = timeline.snapshots().size();
        timeline.append(std::move(snap));
    };
    add(1.0, {{"A", "B"}, {"A", "D"}});
    add(2.0, {{"A", "B"}, {"B", "E"}, {"D", "C"}});
    add(3.0, {{"A", "D"}});
    add(4.0, {{"E", "G"}, {"C", "E"}});

    SECTION("increasing labels form a journey") {
        CHECK(is_journey(timeline, {{"A", "B", 1.0}, {"B", "E", 2.0}, {"E", "G", 4.0}}));
    }
    SECTION("an edge that exists only in the past breaks the journey") {
        CHECK_FALSE(is_journey(timeline, {{"A", "D", 3.0}, {"D", "C", 2.0}}));
    }
    SECTION("single edge") {
        CHECK(is_journey(timeline, {{"A", "B", 1.0}}));
    }
    SECTION("unknown edge is a lookup error") {
        CHECK_THROWS_AS(is_journey(timeline, {{"A", "G", 1.0}}), LookupError);
        CHECK_THROWS_AS(is_journey(timeline, {{"A", "B", 9.0}}), LookupError);
    }
}
