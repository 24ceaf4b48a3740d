#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "segtrust/routing.hpp"
#include "segtrust/simnet.hpp"

namespace segtrust::protocol {

// Per-hop opinion weight: 1 for a direct neighbour of s, decaying
// geometrically with each further step.
inline double hop_weight(int hop, double gamma) {
    if (hop < 1) throw DomainError("hop_weight: hop index starts at 1");
    if (gamma <= 0.0 || gamma > 1.0) throw DomainError("hop_weight: gamma must be in (0, 1]");
    return std::pow(gamma, hop - 1);
}

struct ProtocolParams {
    TrustWeights weights;
    Thresholds thresholds;
    double gamma = 0.8;   // per-hop opinion decay
    unsigned scale = 100; // fixed-point scale
    std::size_t z_max = 4;
    CentralityBasis centrality_basis = CentralityBasis::SocialEstablished;
};

// Plaintext-side record a contributor keeps about its own opinion; test
// oracles compare the decrypted aggregate against the sum of these.
struct OpinionContribution {
    VehicleId contributor;
    double op_v = 0.0; // delta_opv * tst toward the d-ward successor
    mpz_class encoded;
};

struct RouteReply {
    std::vector<VehicleId> route;
    mpz_class op_f_raw;           // decrypted accumulator
    double op_f = 0.0;            // decoded aggregate opinion
    std::size_t contributors = 0; // intermediate nodes, v_d included
    bool flagged = false;         // a contributor had lost its d-ward link
};

struct IndirectTrustResult {
    double tst_sd = 0.0;
    std::vector<RouteReply> per_route;
    RouteSet routes_used;
    std::uint64_t messages_sent = 0;
    double centrality_d = 0.0; // formula inputs recorded for recomputation
    double shp_sd = 0.0;
    bool direct = false; // short-circuited to stored direct trust
};

// One intermediate node folds its weighted opinion into the accumulator
// and passes the request one step back toward s. Handlers only ever see
// the public key, so no opinion can be influenced by the running sum.
inline OpinionRequest handle_request(const VehicleId& node, const OpinionRequest& req,
                                     const SegSnapshot& snap, const ProtocolParams& params,
                                     SeededRng& rng, OpinionContribution* record = nullptr) {
    if (req.cursor == 0 || req.cursor >= req.route.size())
        throw ProtocolError("handle_request: cursor outside the intermediate range");
    if (req.route[req.cursor] != node)
        throw ProtocolError("handle_request: request not addressed to " + node);
    if (node == req.initiator) throw ProtocolError("handle_request: initiator cannot contribute");

    OpinionRequest out = req;
    const VehicleId& successor = req.route[req.cursor + 1];
    const double weight = req.hop_weights.at(req.cursor - 1);

    double opinion = 0.0;
    const SocialEdge* edge = snap.social(node, successor);
    if (edge != nullptr && edge->established) {
        opinion = weight * edge->tst;
    } else {
        out.flagged.push_back(node);
    }

    const mpz_class raw = paillier::encode_signed(opinion, params.scale, req.pk.n);
    const paillier::Ciphertext enc = paillier::encrypt(req.pk, raw, rng);
    out.accumulator = paillier::hom_add(req.pk, req.accumulator, enc);
    out.cursor = req.cursor - 1;

    if (record != nullptr) {
        record->contributor = node;
        record->op_v = opinion;
        record->encoded = raw;
    }
    return out;
}

// Mean of per-route mean opinions. Routes without contributors carry no
// opinion and are skipped.
inline double combine_route_opinions(const std::vector<double>& per_route_op_f,
                                     const std::vector<std::size_t>& contributor_counts) {
    if (per_route_op_f.size() != contributor_counts.size())
        throw DomainError("combine_route_opinions: mismatched inputs");
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < per_route_op_f.size(); ++i) {
        if (contributor_counts[i] == 0) continue;
        sum += per_route_op_f[i] / static_cast<double>(contributor_counts[i]);
        ++used;
    }
    if (used == 0) throw NoOpinionError("finalize: no route produced any opinion");
    return sum / static_cast<double>(used);
}

// TST_sd = (delta_d * C_D(d)) * (delta_h * SHP_sd) + delta_f * mean opinion,
// clamped to [-1, 1].
inline double finalize(const std::vector<double>& per_route_op_f,
                       const std::vector<std::size_t>& contributor_counts, double centrality_d,
                       double shp_sd, const TrustWeights& w) {
    const double opinion = combine_route_opinions(per_route_op_f, contributor_counts);
    return clamp_trust((w.delta_d * centrality_d) * (w.delta_h * shp_sd) + w.delta_f * opinion);
}

// Full indirect-trust query: route discovery, one encrypted opinion
// request per route dispatched to d's route-neighbour, backward
// accumulation, decryption and the final trust estimate at s.
inline IndirectTrustResult initiate(const VehicleId& s, const VehicleId& d,
                                    const SegSnapshot& snap, const ProtocolParams& params,
                                    const paillier::Keypair& keys, net::Network& network,
                                    SeededRng& rng, const std::string& query_id) {
    if (s == d) throw DegenerateQueryError("initiate: source equals destination");
    if (!snap.nodes.contains(s)) throw LookupError("initiate: unknown source " + s);
    if (!snap.nodes.contains(d)) throw LookupError("initiate: unknown destination " + d);

    IndirectTrustResult result;
    result.shp_sd = homophily(snap.nodes.at(s).profile, snap.nodes.at(d).profile);
    result.centrality_d = degree_centrality(snap, d, params.centrality_basis).value;

    // Close proximity: the stored direct trust already answers the query.
    if (const SocialEdge* direct = snap.social(s, d); direct != nullptr && direct->established) {
        result.tst_sd = direct->tst;
        result.direct = true;
        return result;
    }

    DijkstraOptions opts;
    opts.z_max = params.z_max;
    DijkstraResult discovery =
        seg_dijkstra(snap, s, d, params.thresholds.psi_l, opts);
    if (discovery.routes.empty())
        throw UnreachableError("initiate: no trusted route from " + s + " to " + d);
    result.routes_used = discovery.routes;

    const paillier::PublicKey& pk = keys.first;
    const paillier::PrivateKey& sk = keys.second;

    std::vector<OpinionRequest> completed;
    std::set<std::pair<VehicleId, std::string>> seen; // replay guard

    // The handler captures this frame; make sure it never outlives it.
    struct HandlerGuard {
        net::Network& net;
        ~HandlerGuard() { net.set_handler(nullptr); }
    } guard{network};

    network.set_handler([&](net::Network& net, const net::Envelope& env) {
        const OpinionRequest* state = nullptr;
        if (const auto* req = std::get_if<OpinionRequest>(&env.payload)) state = req;
        if (const auto* rep = std::get_if<OpinionReply>(&env.payload)) state = &rep->state;
        if (state == nullptr) return;
        if (!seen.emplace(env.to, state->nonce).second) return; // duplicate nonce
        if (env.to == state->initiator) {
            completed.push_back(*state);
            return;
        }
        OpinionRequest next = handle_request(env.to, *state, snap, params, rng);
        const VehicleId backward = next.route[next.cursor];
        net.send(env.to, backward, OpinionReply{std::move(next)});
    });

    int route_no = 0;
    for (const auto& route : discovery.routes.routes) {
        if (route.size() < 3) continue; // no intermediates; handled by the direct path above
        OpinionRequest req;
        req.initiator = s;
        req.target = d;
        req.route = route;
        for (std::size_t i = 0; i + 2 < route.size(); ++i)
            req.hop_weights.push_back(hop_weight(static_cast<int>(i) + 1, params.gamma));
        req.accumulator = paillier::encrypt(pk, 0, rng);
        req.pk = pk;
        req.cursor = route.size() - 2;
        req.query = query_id;
        req.nonce = query_id + "-r" + std::to_string(route_no++);
        std::vector<VehicleId> forward(route.begin(), route.end() - 1); // s .. v_d
        network.send_routed(forward, std::move(req));
    }
    network.run_until_idle();

    std::vector<double> op_fs;
    std::vector<std::size_t> counts;
    for (const auto& state : completed) {
        RouteReply reply;
        reply.route = state.route;
        reply.op_f_raw = paillier::decrypt(sk, pk, state.accumulator);
        reply.op_f = paillier::decode_signed(reply.op_f_raw, params.scale, pk.n);
        reply.contributors = state.route.size() - 2;
        reply.flagged = !state.flagged.empty();
        op_fs.push_back(reply.op_f);
        counts.push_back(reply.contributors);
        result.per_route.push_back(std::move(reply));
    }
    if (result.per_route.empty())
        throw ProtocolError("initiate: no route reply returned to " + s);

    result.tst_sd =
        finalize(op_fs, counts, result.centrality_d, result.shp_sd, params.weights);
    result.messages_sent = [&] {
        auto it = network.metrics().per_query.find(query_id);
        return it == network.metrics().per_query.end() ? std::uint64_t{0} : it->second;
    }();
    return result;
}

} // namespace segtrust::protocol
