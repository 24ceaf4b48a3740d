#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "segtrust/seg.hpp"

namespace segtrust {

// Elementary-operation counters for complexity regression tests. Sift
// steps capture the log-factor of the heap, so elementary() scales like
// (|E|+|V|) log|V| on sparse graphs.
struct OperationCounters {
    std::uint64_t heap_extractions = 0;
    std::uint64_t heap_pushes = 0;
    std::uint64_t heap_sift_steps = 0;
    std::uint64_t edge_relaxations = 0;

    std::uint64_t elementary() const {
        return heap_extractions + heap_pushes + heap_sift_steps + edge_relaxations;
    }
};

// Per-node predecessor lists recorded during traversal, bounded so route
// extraction stays cheap. Every recorded predecessor was extracted before
// its successor, so the predecessor relation is acyclic.
struct PredecessorMap {
    std::map<VehicleId, std::vector<VehicleId>> preds;
};

struct RouteSet {
    std::vector<std::vector<VehicleId>> routes; // each starts at s, ends at d

    bool empty() const { return routes.empty(); }
    std::size_t size() const { return routes.size(); }
};

struct DijkstraOptions {
    std::size_t z_max = 4;    // route extraction cap
    std::size_t pred_cap = 4; // predecessors kept per node
};

struct DijkstraResult {
    RouteSet routes;
    OperationCounters ops;
    PredecessorMap preds;
};

namespace detail {

// Binary max-heap over (duration, node) with deterministic ordering:
// longer duration first, ties broken by ascending node index. Instrumented
// so sift work shows up in the elementary-operation counts.
class LongestEtHeap {
public:
    explicit LongestEtHeap(OperationCounters& ops) : ops_(ops) {}

    bool empty() const { return entries_.empty(); }

    void push(LinkDuration key, std::uint32_t node) {
        ++ops_.heap_pushes;
        entries_.push_back({key, node});
        std::size_t i = entries_.size() - 1;
        while (i > 0) {
            std::size_t parent = (i - 1) / 2;
            ++ops_.heap_sift_steps;
            if (!before(entries_[i], entries_[parent])) break;
            std::swap(entries_[i], entries_[parent]);
            i = parent;
        }
    }

    std::uint32_t pop() {
        ++ops_.heap_extractions;
        const std::uint32_t top = entries_.front().node;
        entries_.front() = entries_.back();
        entries_.pop_back();
        std::size_t i = 0;
        while (true) {
            std::size_t best = i;
            for (std::size_t c = 2 * i + 1; c <= 2 * i + 2 && c < entries_.size(); ++c) {
                ++ops_.heap_sift_steps;
                if (before(entries_[c], entries_[best])) best = c;
            }
            if (best == i) break;
            std::swap(entries_[i], entries_[best]);
            i = best;
        }
        return top;
    }

private:
    struct Entry {
        LinkDuration key;
        std::uint32_t node;
    };

    static bool before(const Entry& a, const Entry& b) {
        if (a.key > b.key) return true;
        if (b.key > a.key) return false;
        return a.node < b.node;
    }

    std::vector<Entry> entries_;
    OperationCounters& ops_;
};

} // namespace detail

// SEG-Dijkstra. Step one drops every link whose expected duration fails
// the time threshold; traversal then extracts nodes by longest bottleneck
// ET, recording bounded predecessor lists; routes are recovered by
// backtracking from d. Only established social links are traversed.
inline DijkstraResult seg_dijkstra(const SegSnapshot& snap, const VehicleId& s,
                                   const VehicleId& d, double psi_l,
                                   const DijkstraOptions& opts = {}) {
    if (s == d) throw DegenerateQueryError("seg_dijkstra: source equals destination");
    if (!snap.nodes.contains(s)) throw LookupError("seg_dijkstra: unknown source " + s);
    if (!snap.nodes.contains(d)) throw LookupError("seg_dijkstra: unknown destination " + d);

    DijkstraResult result;

    // Dense index in ascending id order keeps tie-breaks reproducible.
    std::vector<VehicleId> ids;
    ids.reserve(snap.nodes.size());
    std::map<VehicleId, std::uint32_t> index;
    for (const auto& [id, node] : snap.nodes) {
        index.emplace(id, static_cast<std::uint32_t>(ids.size()));
        ids.push_back(id);
    }

    struct Arc {
        std::uint32_t to;
        LinkDuration et;
    };
    std::vector<std::vector<Arc>> adj(ids.size());
    for (const auto& [key, edge] : snap.social_edges) {
        if (!edge.established || !edge.et.exceeds(psi_l)) continue;
        adj[index.at(edge.from)].push_back({index.at(edge.to), edge.et});
    }
    // social_edges iterate in (from, to) order, so each list is already
    // sorted by destination id.

    const std::uint32_t src = index.at(s);
    const std::uint32_t dst = index.at(d);

    std::vector<LinkDuration> best(ids.size(), LinkDuration::finite(-1.0));
    std::vector<bool> reached(ids.size(), false);
    std::vector<bool> closed(ids.size(), false);
    std::vector<std::vector<std::uint32_t>> preds(ids.size());

    detail::LongestEtHeap heap(result.ops);
    best[src] = LinkDuration::unbounded();
    reached[src] = true;
    heap.push(best[src], src);

    while (!heap.empty()) {
        const std::uint32_t x = heap.pop();
        if (closed[x]) continue; // stale entry
        closed[x] = true;
        for (const Arc& arc : adj[x]) {
            ++result.ops.edge_relaxations;
            if (closed[arc.to]) continue;
            auto& plist = preds[arc.to];
            if (plist.size() < opts.pred_cap &&
                std::find(plist.begin(), plist.end(), x) == plist.end())
                plist.push_back(x);
            const LinkDuration candidate = min(best[x], arc.et);
            if (!reached[arc.to] || candidate > best[arc.to]) {
                best[arc.to] = candidate;
                reached[arc.to] = true;
                heap.push(candidate, arc.to);
            }
        }
    }

    for (std::uint32_t i = 0; i < ids.size(); ++i) {
        if (preds[i].empty()) continue;
        auto& list = result.preds.preds[ids[i]];
        for (std::uint32_t p : preds[i]) list.push_back(ids[p]);
    }

    // Backtrack from d. Predecessor links strictly decrease extraction
    // order, so the search space is a DAG; the on-path guard keeps every
    // emitted route simple regardless.
    std::vector<std::uint32_t> path{dst};
    std::vector<bool> on_path(ids.size(), false);
    on_path[dst] = true;
    auto emit = [&]() {
        std::vector<VehicleId> route;
        route.reserve(path.size());
        for (auto it = path.rbegin(); it != path.rend(); ++it) route.push_back(ids[*it]);
        result.routes.routes.push_back(std::move(route));
    };
    auto backtrack = [&](auto&& self, std::uint32_t u) -> void {
        if (result.routes.size() >= opts.z_max) return;
        if (u == src) {
            emit();
            return;
        }
        for (std::uint32_t p : preds[u]) {
            if (on_path[p]) continue;
            path.push_back(p);
            on_path[p] = true;
            self(self, p);
            path.pop_back();
            on_path[p] = false;
            if (result.routes.size() >= opts.z_max) return;
        }
    };
    backtrack(backtrack, dst);
    return result;
}

} // namespace segtrust
