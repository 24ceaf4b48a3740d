#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "segtrust/mobility.hpp"
#include "segtrust/types.hpp"

namespace segtrust {

// Social attributes a vehicle advertises alongside its BSMs: interest
// profile plus an optional personal homophily threshold.
struct SocialAttrs {
    InterestProfile profile;
    std::optional<double> psi_h;
};

struct VehicleNode {
    VehicleId id;
    InterestProfile profile;
    double psi_h = 0.0;
    VehicleState state;
};

// Directed candidate social link with its time-stamped annotation tuple.
// Non-established links keep their annotations so trust can keep evolving
// while the pair stays in communication range.
struct SocialEdge {
    VehicleId from;
    VehicleId to;
    double t = 0.0;
    LinkDuration et = LinkDuration::finite(0.0);
    double shp = 0.0;
    double tst = 0.0;
    bool established = false;
};

using EdgeKey = std::pair<VehicleId, VehicleId>;

struct SegSnapshot {
    std::size_t index = 0;
    double time = 0.0;
    std::map<VehicleId, VehicleNode> nodes;
    std::vector<EdgeKey> comm_edges;            // canonical (first < second), sorted
    std::map<EdgeKey, SocialEdge> social_edges; // directed

    std::size_t vehicle_count() const { return nodes.size(); }

    bool has_comm(const VehicleId& a, const VehicleId& b) const {
        EdgeKey key = a < b ? EdgeKey{a, b} : EdgeKey{b, a};
        return std::binary_search(comm_edges.begin(), comm_edges.end(), key);
    }

    const SocialEdge* social(const VehicleId& from, const VehicleId& to) const {
        auto it = social_edges.find({from, to});
        return it == social_edges.end() ? nullptr : &it->second;
    }

    bool established(const VehicleId& from, const VehicleId& to) const {
        const SocialEdge* e = social(from, to);
        return e != nullptr && e->established;
    }
};

class SegTimeline {
public:
    void append(SegSnapshot snap) {
        if (!snapshots_.empty() && snap.time <= snapshots_.back().time)
            throw DomainError("SegTimeline: snapshot times must strictly increase");
        snapshots_.push_back(std::move(snap));
    }

    const std::vector<SegSnapshot>& snapshots() const { return snapshots_; }
    bool empty() const { return snapshots_.empty(); }
    const SegSnapshot& back() const { return snapshots_.back(); }

    const SegSnapshot* at_time(double t) const {
        for (const auto& s : snapshots_)
            if (s.time == t) return &s;
        return nullptr;
    }

private:
    std::vector<SegSnapshot> snapshots_;
};

// Cosine similarity of two binary interest vectors. An all-zero profile
// shares nothing, so the similarity is defined as 0.
inline double homophily(const InterestProfile& a, const InterestProfile& b) {
    if (a.size() != b.size()) throw ProfileError("homophily: profiles differ in length");
    int dot = 0;
    for (std::size_t k = 0; k < a.bits.size(); ++k) dot += a.bits[k] & b.bits[k];
    const int ca = a.popcount();
    const int cb = b.popcount();
    if (ca == 0 || cb == 0) return 0.0;
    return static_cast<double>(dot) / std::sqrt(static_cast<double>(ca) * static_cast<double>(cb));
}

enum class CentralityBasis {
    SocialEstablished, // default: established social links
    CommLinks,         // raw communication links
};

struct Centrality {
    double value = 0.0;
    bool defined = true; // false when W < 2
};

// Normalised degree: distinct counterparts over W-1. A social counterpart
// counts when either direction of the pair is established.
inline Centrality degree_centrality(const SegSnapshot& snap, const VehicleId& v,
                                    CentralityBasis basis = CentralityBasis::SocialEstablished) {
    if (!snap.nodes.contains(v)) throw LookupError("degree_centrality: unknown vehicle " + v);
    const std::size_t w = snap.vehicle_count();
    if (w < 2) return {0.0, false};

    std::size_t links = 0;
    if (basis == CentralityBasis::CommLinks) {
        for (const auto& [a, b] : snap.comm_edges)
            if (a == v || b == v) ++links;
    } else {
        for (const auto& [id, node] : snap.nodes) {
            if (id == v) continue;
            if (snap.established(v, id) || snap.established(id, v)) ++links;
        }
    }
    return {static_cast<double>(links) / static_cast<double>(w - 1), true};
}

// Expected remaining link duration:
//   ET = (H - theta * dist) / |s_i - vartheta * s_j|
// with speeds as magnitudes and (theta, vartheta) from the motion case.
// Zero relative speed gives an unbounded duration.
inline LinkDuration expected_link_duration(const VehicleState& i, const VehicleState& j,
                                           double h) {
    const double dist = distance(i, j);
    if (dist > h) throw NotInRangeError("expected_link_duration: pair not in communication range");
    const MotionSigns signs = motion_signs(classify_motion(i, j));
    const double si = std::abs(i.v);
    const double sj = std::abs(j.v);
    const double denom = std::abs(si - signs.vartheta * sj);
    if (denom == 0.0) return LinkDuration::unbounded();
    const double num = h - signs.theta * dist;
    return LinkDuration::finite(num / denom);
}

// Direct trust estimate. The prior is the value estimated at an earlier
// time; absent priors count as 0. Result clamped to [-1, 1].
inline double direct_trust(double c_d, double shp, std::optional<double> prior,
                           const TrustWeights& w) {
    const double p = prior.value_or(0.0);
    return clamp_trust((w.delta_d * c_d) * (w.delta_h * shp) + w.delta_t * p);
}

// Establishment predicate; all three inequalities are strict.
inline bool can_establish(double shp, const LinkDuration& et, double tst, const Thresholds& th) {
    return shp > th.psi_h && et.exceeds(th.psi_l) && tst > th.psi_t;
}

struct SegParams {
    Thresholds thresholds;
    TrustWeights weights;
    double h = 300.0;
    CentralityBasis centrality_basis = CentralityBasis::SocialEstablished;
};

// Directed trust priors carried into the simulation window, e.g. from
// interactions that predate it. Used for a pair only while no evolved
// value exists yet in the previous snapshot.
using TrustSeeds = std::map<EdgeKey, double>;

// Build the SEG snapshot for time t from broadcast state. Every in-range
// directed pair gets an annotated candidate edge; the established flag is
// the establishment predicate over that annotation. Target centrality and
// trust priors come from the previous snapshot.
inline SegSnapshot build_snapshot(const std::vector<VehicleState>& states,
                                  const std::map<VehicleId, SocialAttrs>& attrs,
                                  const SegSnapshot* prev, double t, const SegParams& params,
                                  const TrustSeeds& seeds = {}) {
    SegSnapshot snap;
    snap.index = prev ? prev->index + 1 : 0;
    snap.time = t;

    for (const auto& s : states) {
        auto it = attrs.find(s.id);
        if (it == attrs.end()) throw LookupError("build_snapshot: no social attrs for " + s.id);
        VehicleNode node;
        node.id = s.id;
        node.profile = it->second.profile;
        node.psi_h = it->second.psi_h.value_or(params.thresholds.psi_h);
        node.state = s;
        snap.nodes.emplace(s.id, std::move(node));
    }

    for (auto i = snap.nodes.begin(); i != snap.nodes.end(); ++i) {
        for (auto j = std::next(i); j != snap.nodes.end(); ++j) {
            if (in_range(i->second.state, j->second.state, params.h))
                snap.comm_edges.emplace_back(i->first, j->first);
        }
    }

    auto centrality_of = [&](const VehicleId& v) -> double {
        if (prev == nullptr || !prev->nodes.contains(v)) return 0.0;
        return degree_centrality(*prev, v, params.centrality_basis).value;
    };

    for (const auto& [a, b] : snap.comm_edges) {
        const VehicleNode& na = snap.nodes.at(a);
        const VehicleNode& nb = snap.nodes.at(b);
        const double shp = homophily(na.profile, nb.profile);

        Thresholds pair_th = params.thresholds;
        pair_th.psi_h = std::max(na.psi_h, nb.psi_h);

        for (const auto& [from, to] : {EdgeKey{a, b}, EdgeKey{b, a}}) {
            const VehicleNode& nf = snap.nodes.at(from);
            const VehicleNode& nt = snap.nodes.at(to);
            SocialEdge edge;
            edge.from = from;
            edge.to = to;
            edge.t = t;
            edge.shp = shp;
            edge.et = expected_link_duration(nf.state, nt.state, params.h);

            const SocialEdge* prior_edge = prev ? prev->social(from, to) : nullptr;
            if (prior_edge != nullptr) {
                edge.tst = direct_trust(centrality_of(to), shp, prior_edge->tst, params.weights);
            } else if (auto seed = seeds.find({from, to}); seed != seeds.end()) {
                edge.tst = clamp_trust(seed->second);
            } else {
                edge.tst = direct_trust(centrality_of(to), shp, std::nullopt, params.weights);
            }
            edge.established = can_establish(edge.shp, edge.et, edge.tst, pair_th);
            snap.social_edges.emplace(EdgeKey{from, to}, std::move(edge));
        }
    }
    return snap;
}

struct JourneyHop {
    VehicleId from;
    VehicleId to;
    double time = 0.0;
};

// A path through the timeline is a journey when its edges exist in their
// referenced snapshots and the time labels strictly increase.
inline bool is_journey(const SegTimeline& timeline, const std::vector<JourneyHop>& hops) {
    double last = -std::numeric_limits<double>::infinity();
    for (const auto& hop : hops) {
        const SegSnapshot* snap = timeline.at_time(hop.time);
        if (snap == nullptr)
            throw LookupError("is_journey: no snapshot at the referenced time");
        if (!snap->has_comm(hop.from, hop.to))
            throw LookupError("is_journey: edge " + hop.from + "-" + hop.to +
                              " absent from the referenced snapshot");
        if (hop.time <= last) return false;
        last = hop.time;
    }
    return true;
}

} // namespace segtrust
