#pragma once

#include <string>
#include <vector>

#include "segtrust/mobility.hpp"
#include "segtrust/paillier.hpp"
#include "segtrust/types.hpp"

namespace segtrust {

// Opinion request travelling along one discovered route. The accumulator
// is a Paillier ciphertext under the initiator's key; intermediate nodes
// fold their weighted opinions in without ever seeing the running sum.
struct OpinionRequest {
    VehicleId initiator;
    VehicleId target;
    std::vector<VehicleId> route;    // full route, s first, d last
    std::vector<double> hop_weights; // weight of route[i+1], starts at 1, non-increasing
    paillier::Ciphertext accumulator;
    paillier::PublicKey pk;
    std::size_t cursor = 0; // index of the node currently holding the request
    std::string query;      // query id shared by all routes of one query
    std::string nonce;      // unique per route; replay guard
    std::vector<VehicleId> flagged; // contributors that had lost their d-ward link
};

// Backward-travelling leg of the same exchange.
struct OpinionReply {
    OpinionRequest state;
};

} // namespace segtrust
