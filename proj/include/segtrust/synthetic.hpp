#pragma once

#include <string>
#include <vector>

#include "segtrust/rng.hpp"
#include "segtrust/seg.hpp"

namespace segtrust {

// Builders for randomised snapshots used by benchmarks and property
// tests. Everything is a pure function of the seed.

struct RandomScenario {
    std::vector<VehicleState> states;
    std::map<VehicleId, SocialAttrs> attrs;
    TrustSeeds seeds;
    SegParams params;
};

// Random highway population with random profiles, thresholds and trust
// priors; feed through build_snapshot to exercise establishment logic.
inline RandomScenario random_scenario(SmallRng& rng, std::size_t vehicles,
                                      std::size_t profile_bits = 8) {
    RandomScenario sc;
    sc.params.h = rng.uniform(150.0, 400.0);
    sc.params.thresholds.psi_h = rng.uniform(0.2, 0.8);
    sc.params.thresholds.psi_l = rng.uniform(5.0, 20.0);
    sc.params.thresholds.psi_t = rng.uniform(-0.2, 0.6);
    sc.params.weights.delta_d = rng.uniform(0.0, 1.0);
    sc.params.weights.delta_h = rng.uniform(0.0, 1.0);
    sc.params.weights.delta_t = rng.uniform(-1.0, 0.1);
    sc.params.weights.delta_f = rng.uniform(0.0, 1.0);

    for (std::size_t i = 0; i < vehicles; ++i) {
        VehicleState s;
        s.id = "v" + std::to_string(i);
        s.lane = static_cast<int>(rng.below(3));
        s.y = s.lane * 3.5;
        s.x = rng.uniform(0.0, 1500.0);
        s.v = (rng.chance(0.5) ? 1.0 : -1.0) * rng.uniform(15.0, 35.0);
        sc.states.push_back(s);

        SocialAttrs attrs;
        std::vector<std::uint8_t> bits(profile_bits);
        for (auto& b : bits) b = rng.chance(0.5) ? 1 : 0;
        attrs.profile = InterestProfile(std::move(bits));
        if (rng.chance(0.3)) attrs.psi_h = rng.uniform(0.2, 0.8);
        sc.attrs.emplace(s.id, std::move(attrs));
    }
    for (std::size_t i = 0; i < vehicles; ++i) {
        for (std::size_t k = 0; k < vehicles; ++k) {
            if (i == k || !rng.chance(0.25)) continue;
            sc.seeds[{"v" + std::to_string(i), "v" + std::to_string(k)}] =
                rng.uniform(-1.0, 1.0);
        }
    }
    return sc;
}

// Sparse connected social snapshot laid out along a strip so every linked
// pair really is within range. Node i sits near x = i * spacing; links
// join nodes within the communication range, giving a mean social degree
// around 2 * range / spacing. Nested: the first n nodes are identical for
// every larger size with the same seed.
inline SegSnapshot strip_snapshot(std::uint64_t seed, std::size_t n, double range_h = 300.0,
                                  double mean_degree = 4.0, double psi_l = 12.0) {
    SegSnapshot snap;
    snap.time = 0.0;
    const double spacing = 2.0 * range_h / mean_degree;
    InterestProfile shared = InterestProfile::from_string("11110000");

    std::vector<VehicleState> states(n);
    for (std::size_t i = 0; i < n; ++i) {
        SmallRng jitter(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
        VehicleState s;
        s.id = "n" + std::to_string(i);
        s.x = static_cast<double>(i) * spacing + jitter.uniform(-spacing * 0.2, spacing * 0.2);
        s.y = 0.0;
        s.v = 25.0 + jitter.uniform(-2.0, 2.0);
        states[i] = s;

        VehicleNode node;
        node.id = s.id;
        node.profile = shared;
        node.psi_h = 0.3;
        node.state = s;
        snap.nodes.emplace(node.id, std::move(node));
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            if (std::abs(states[i].x - states[k].x) > range_h) break;
            if (!in_range(states[i], states[k], range_h)) continue;
            EdgeKey fwd{states[i].id, states[k].id};
            EdgeKey rev{states[k].id, states[i].id};
            const EdgeKey canonical = fwd.first < fwd.second ? fwd : rev;
            snap.comm_edges.push_back(canonical);
            SmallRng er(seed ^ (i * 1000003ULL + k));
            const double et = psi_l + 1.0 + er.uniform(0.0, 60.0);
            const double tst = er.uniform(0.55, 0.95);
            for (const auto& [from, to] : {fwd, rev}) {
                SocialEdge e;
                e.from = from;
                e.to = to;
                e.t = 0.0;
                e.et = LinkDuration::finite(et);
                e.shp = 1.0;
                e.tst = tst;
                e.established = true;
                snap.social_edges.emplace(EdgeKey{from, to}, e);
            }
        }
    }
    std::sort(snap.comm_edges.begin(), snap.comm_edges.end());
    return snap;
}

// Small random digraph snapshot for oracle comparisons: random expected
// durations (some below the filter threshold) and a random subset of
// established links. Geometry is not meaningful here.
inline SegSnapshot random_digraph_snapshot(SmallRng& rng, std::size_t n, double edge_prob,
                                           double psi_l) {
    SegSnapshot snap;
    InterestProfile shared = InterestProfile::from_string("1111");
    for (std::size_t i = 0; i < n; ++i) {
        VehicleNode node;
        node.id = std::string(1, static_cast<char>('a' + i));
        node.state.id = node.id;
        node.profile = shared;
        node.psi_h = 0.0;
        snap.nodes.emplace(node.id, std::move(node));
    }
    std::vector<VehicleId> ids;
    for (const auto& [id, _] : snap.nodes) ids.push_back(id);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            if (!rng.chance(edge_prob)) continue;
            snap.comm_edges.emplace_back(ids[i], ids[k]);
            for (const auto& [from, to] :
                 {EdgeKey{ids[i], ids[k]}, EdgeKey{ids[k], ids[i]}}) {
                SocialEdge e;
                e.from = from;
                e.to = to;
                e.et = rng.chance(0.15) ? LinkDuration::unbounded()
                                        : LinkDuration::finite(rng.uniform(0.0, 2.0 * psi_l));
                e.shp = rng.uniform(0.0, 1.0);
                e.tst = rng.uniform(-1.0, 1.0);
                e.established = rng.chance(0.8);
                snap.social_edges.emplace(EdgeKey{from, to}, e);
            }
        }
    }
    std::sort(snap.comm_edges.begin(), snap.comm_edges.end());
    return snap;
}

} // namespace segtrust
