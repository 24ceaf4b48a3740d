#pragma once

#include <json.hpp>

#include "segtrust/seg.hpp"

namespace segtrust {

inline nlohmann::json duration_to_json(const LinkDuration& d) {
    if (d.is_unbounded()) return "unbounded";
    return d.seconds();
}

inline LinkDuration duration_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "unbounded") return LinkDuration::unbounded();
        throw EncodingError("duration: unexpected string " + j.get<std::string>());
    }
    return LinkDuration::finite(j.get<double>());
}

inline nlohmann::json snapshot_to_json(const SegSnapshot& snap) {
    nlohmann::json j;
    j["index"] = snap.index;
    j["time"] = snap.time;
    j["nodes"] = nlohmann::json::array();
    for (const auto& [id, node] : snap.nodes) {
        j["nodes"].push_back({{"id", id},
                              {"x", node.state.x},
                              {"y", node.state.y},
                              {"v", node.state.v},
                              {"lane", node.state.lane},
                              {"profile", node.profile.to_string()},
                              {"psi_h", node.psi_h}});
    }
    j["comm_edges"] = nlohmann::json::array();
    for (const auto& [a, b] : snap.comm_edges) j["comm_edges"].push_back({a, b});
    j["social_edges"] = nlohmann::json::array();
    for (const auto& [key, e] : snap.social_edges) {
        j["social_edges"].push_back({{"from", e.from},
                                     {"to", e.to},
                                     {"t", e.t},
                                     {"et", duration_to_json(e.et)},
                                     {"shp", e.shp},
                                     {"tst", e.tst},
                                     {"established", e.established}});
    }
    return j;
}

inline SegSnapshot snapshot_from_json(const nlohmann::json& j) {
    SegSnapshot snap;
    snap.index = j.at("index").get<std::size_t>();
    snap.time = j.at("time").get<double>();
    for (const auto& n : j.at("nodes")) {
        VehicleNode node;
        node.id = n.at("id").get<VehicleId>();
        node.state.id = node.id;
        node.state.x = n.at("x").get<double>();
        node.state.y = n.at("y").get<double>();
        node.state.v = n.at("v").get<double>();
        node.state.lane = n.at("lane").get<int>();
        node.profile = InterestProfile::from_string(n.at("profile").get<std::string>());
        node.psi_h = n.at("psi_h").get<double>();
        snap.nodes.emplace(node.id, std::move(node));
    }
    for (const auto& e : j.at("comm_edges"))
        snap.comm_edges.emplace_back(e.at(0).get<VehicleId>(), e.at(1).get<VehicleId>());
    for (const auto& e : j.at("social_edges")) {
        SocialEdge edge;
        edge.from = e.at("from").get<VehicleId>();
        edge.to = e.at("to").get<VehicleId>();
        edge.t = e.at("t").get<double>();
        edge.et = duration_from_json(e.at("et"));
        edge.shp = e.at("shp").get<double>();
        edge.tst = e.at("tst").get<double>();
        edge.established = e.at("established").get<bool>();
        snap.social_edges.emplace(EdgeKey{edge.from, edge.to}, std::move(edge));
    }
    return snap;
}

} // namespace segtrust
