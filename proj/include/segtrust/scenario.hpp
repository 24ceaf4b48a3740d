#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "segtrust/seg.hpp"

namespace segtrust {

struct VehicleSpec {
    VehicleId id;
    double entry_time = 0.0;
    int lane = 0;
    double speed = 0.0;            // signed, sign = direction
    std::optional<double> x;       // entry position; default 0 or length by direction
    InterestProfile profile;
    std::optional<double> psi_h;

    bool operator==(const VehicleSpec&) const = default;
};

struct QuerySpec {
    VehicleId s;
    VehicleId d;
    double at = 0.0;

    bool operator==(const QuerySpec&) const = default;
};

struct ScenarioConfig {
    HighwayConfig highway;
    Thresholds thresholds;
    TrustWeights weights;
    double gamma = 0.8;
    unsigned key_bits = 512;
    unsigned long crypto_seed = 1;
    double t_exp_ms = 1.1; // modelled per-exponentiation cost for metric rows
    double duration = 30.0;
    unsigned long sim_seed = 1;
    unsigned fixed_point_scale = 100;
    std::size_t z_max = 4;
    CentralityBasis centrality_basis = CentralityBasis::SocialEstablished;
    std::vector<VehicleSpec> vehicles;
    TrustSeeds initial_trust;
    std::vector<QuerySpec> queries;

    bool operator==(const ScenarioConfig&) const = default;
};

namespace detail {

inline double parse_double(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + v + "'");
    }
}

inline long parse_long(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected an integer, got '" + v + "'");
    }
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

// Deterministic shortest round-trip formatting for doubles.
inline std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace detail

// Text form: named sections of key = value lines; '#' starts a comment.
// Sections: [highway] [thresholds] [weights] [crypto] [sim] [fixed_point]
// and repeatable [vehicle <id>], [trust <from> <to>], [query <s> <d>].
inline ScenarioConfig parse_scenario_text(const std::string& text) {
    ScenarioConfig cfg;
    std::vector<std::string> section; // current header tokens
    VehicleSpec* vehicle = nullptr;
    QuerySpec* query = nullptr;
    EdgeKey trust_key;

    std::istringstream input(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(input, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
            section = detail::split_ws(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno), "empty section header");
            vehicle = nullptr;
            query = nullptr;
            const std::string& kind = section[0];
            if (kind == "vehicle") {
                if (section.size() != 2)
                    throw ConfigError("vehicle", "expected [vehicle <id>]");
                cfg.vehicles.push_back(VehicleSpec{.id = section[1]});
                vehicle = &cfg.vehicles.back();
            } else if (kind == "trust") {
                if (section.size() != 3)
                    throw ConfigError("trust", "expected [trust <from> <to>]");
                trust_key = {section[1], section[2]};
            } else if (kind == "query") {
                if (section.size() != 3)
                    throw ConfigError("query", "expected [query <s> <d>]");
                cfg.queries.push_back(QuerySpec{.s = section[1], .d = section[2]});
                query = &cfg.queries.back();
            } else if (kind != "highway" && kind != "thresholds" && kind != "weights" &&
                       kind != "crypto" && kind != "sim" && kind != "fixed_point") {
                throw ConfigError(kind, "unknown section");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(key, "key outside any section");
        const std::string& kind = section[0];
        const std::string field = kind + (section.size() > 1 ? " " + section[1] : "") + "." + key;

        if (kind == "highway") {
            if (key == "length") cfg.highway.length = detail::parse_double(field, value);
            else if (key == "lanes") cfg.highway.lanes = static_cast<int>(detail::parse_long(field, value));
            else if (key == "lane_width") cfg.highway.lane_width = detail::parse_double(field, value);
            else if (key == "range") cfg.highway.h = detail::parse_double(field, value);
            else if (key == "dt") cfg.highway.dt = detail::parse_double(field, value);
            else throw ConfigError(field, "unknown key");
        } else if (kind == "thresholds") {
            if (key == "psi_h") cfg.thresholds.psi_h = detail::parse_double(field, value);
            else if (key == "psi_l") cfg.thresholds.psi_l = detail::parse_double(field, value);
            else if (key == "psi_t") cfg.thresholds.psi_t = detail::parse_double(field, value);
            else throw ConfigError(field, "unknown key");
        } else if (kind == "weights") {
            if (key == "delta_d") cfg.weights.delta_d = detail::parse_double(field, value);
            else if (key == "delta_h") cfg.weights.delta_h = detail::parse_double(field, value);
            else if (key == "delta_t") cfg.weights.delta_t = detail::parse_double(field, value);
            else if (key == "delta_f") cfg.weights.delta_f = detail::parse_double(field, value);
            else if (key == "gamma") cfg.gamma = detail::parse_double(field, value);
            else throw ConfigError(field, "unknown key");
        } else if (kind == "crypto") {
            if (key == "key_bits") cfg.key_bits = static_cast<unsigned>(detail::parse_long(field, value));
            else if (key == "seed") cfg.crypto_seed = static_cast<unsigned long>(detail::parse_long(field, value));
            else if (key == "t_exp_ms") cfg.t_exp_ms = detail::parse_double(field, value);
            else throw ConfigError(field, "unknown key");
        } else if (kind == "sim") {
            if (key == "duration") cfg.duration = detail::parse_double(field, value);
            else if (key == "seed") cfg.sim_seed = static_cast<unsigned long>(detail::parse_long(field, value));
            else if (key == "z_max") cfg.z_max = static_cast<std::size_t>(detail::parse_long(field, value));
            else if (key == "centrality_basis") {
                if (value == "social") cfg.centrality_basis = CentralityBasis::SocialEstablished;
                else if (value == "comm") cfg.centrality_basis = CentralityBasis::CommLinks;
                else throw ConfigError(field, "expected 'social' or 'comm'");
            } else throw ConfigError(field, "unknown key");
        } else if (kind == "fixed_point") {
            if (key == "scale") cfg.fixed_point_scale = static_cast<unsigned>(detail::parse_long(field, value));
            else throw ConfigError(field, "unknown key");
        } else if (kind == "vehicle") {
            if (vehicle == nullptr) throw ConfigError(field, "vehicle section lost");
            if (key == "entry_time") vehicle->entry_time = detail::parse_double(field, value);
            else if (key == "lane") vehicle->lane = static_cast<int>(detail::parse_long(field, value));
            else if (key == "speed") vehicle->speed = detail::parse_double(field, value);
            else if (key == "x") vehicle->x = detail::parse_double(field, value);
            else if (key == "profile") vehicle->profile = InterestProfile::from_string(value);
            else if (key == "psi_h") vehicle->psi_h = detail::parse_double(field, value);
            else throw ConfigError(field, "unknown key");
        } else if (kind == "trust") {
            if (key == "tst") cfg.initial_trust[trust_key] = detail::parse_double(field, value);
            else throw ConfigError(field, "unknown key");
        } else if (kind == "query") {
            if (query == nullptr) throw ConfigError(field, "query section lost");
            if (key == "at") query->at = detail::parse_double(field, value);
            else throw ConfigError(field, "unknown key");
        }
    }
    return cfg;
}

inline std::string serialize_scenario(const ScenarioConfig& cfg) {
    using detail::fmt_double;
    std::ostringstream out;
    out << "[highway]\n";
    out << "length = " << fmt_double(cfg.highway.length) << "\n";
    out << "lanes = " << cfg.highway.lanes << "\n";
    out << "lane_width = " << fmt_double(cfg.highway.lane_width) << "\n";
    out << "range = " << fmt_double(cfg.highway.h) << "\n";
    out << "dt = " << fmt_double(cfg.highway.dt) << "\n\n";
    out << "[thresholds]\n";
    out << "psi_h = " << fmt_double(cfg.thresholds.psi_h) << "\n";
    out << "psi_l = " << fmt_double(cfg.thresholds.psi_l) << "\n";
    out << "psi_t = " << fmt_double(cfg.thresholds.psi_t) << "\n\n";
    out << "[weights]\n";
    out << "delta_d = " << fmt_double(cfg.weights.delta_d) << "\n";
    out << "delta_h = " << fmt_double(cfg.weights.delta_h) << "\n";
    out << "delta_t = " << fmt_double(cfg.weights.delta_t) << "\n";
    out << "delta_f = " << fmt_double(cfg.weights.delta_f) << "\n";
    out << "gamma = " << fmt_double(cfg.gamma) << "\n\n";
    out << "[crypto]\n";
    out << "key_bits = " << cfg.key_bits << "\n";
    out << "seed = " << cfg.crypto_seed << "\n";
    out << "t_exp_ms = " << fmt_double(cfg.t_exp_ms) << "\n\n";
    out << "[sim]\n";
    out << "duration = " << fmt_double(cfg.duration) << "\n";
    out << "seed = " << cfg.sim_seed << "\n";
    out << "z_max = " << cfg.z_max << "\n";
    out << "centrality_basis = "
        << (cfg.centrality_basis == CentralityBasis::CommLinks ? "comm" : "social") << "\n\n";
    out << "[fixed_point]\n";
    out << "scale = " << cfg.fixed_point_scale << "\n";
    for (const auto& v : cfg.vehicles) {
        out << "\n[vehicle " << v.id << "]\n";
        out << "entry_time = " << fmt_double(v.entry_time) << "\n";
        out << "lane = " << v.lane << "\n";
        out << "speed = " << fmt_double(v.speed) << "\n";
        if (v.x) out << "x = " << fmt_double(*v.x) << "\n";
        out << "profile = " << v.profile.to_string() << "\n";
        if (v.psi_h) out << "psi_h = " << fmt_double(*v.psi_h) << "\n";
    }
    for (const auto& [key, tst] : cfg.initial_trust) {
        out << "\n[trust " << key.first << " " << key.second << "]\n";
        out << "tst = " << fmt_double(tst) << "\n";
    }
    for (const auto& q : cfg.queries) {
        out << "\n[query " << q.s << " " << q.d << "]\n";
        out << "at = " << fmt_double(q.at) << "\n";
    }
    return out.str();
}

inline nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["highway"] = {{"length", cfg.highway.length},
                    {"lanes", cfg.highway.lanes},
                    {"lane_width", cfg.highway.lane_width},
                    {"range", cfg.highway.h},
                    {"dt", cfg.highway.dt}};
    j["thresholds"] = {{"psi_h", cfg.thresholds.psi_h},
                       {"psi_l", cfg.thresholds.psi_l},
                       {"psi_t", cfg.thresholds.psi_t}};
    j["weights"] = {{"delta_d", cfg.weights.delta_d},
                    {"delta_h", cfg.weights.delta_h},
                    {"delta_t", cfg.weights.delta_t},
                    {"delta_f", cfg.weights.delta_f},
                    {"gamma", cfg.gamma}};
    j["crypto"] = {{"key_bits", cfg.key_bits}, {"seed", cfg.crypto_seed}, {"t_exp_ms", cfg.t_exp_ms}};
    j["sim"] = {{"duration", cfg.duration},
                {"seed", cfg.sim_seed},
                {"z_max", cfg.z_max},
                {"centrality_basis",
                 cfg.centrality_basis == CentralityBasis::CommLinks ? "comm" : "social"}};
    j["fixed_point"] = {{"scale", cfg.fixed_point_scale}};
    j["vehicles"] = nlohmann::json::array();
    for (const auto& v : cfg.vehicles) {
        nlohmann::json jv = {{"id", v.id},
                             {"entry_time", v.entry_time},
                             {"lane", v.lane},
                             {"speed", v.speed},
                             {"profile", v.profile.to_string()}};
        if (v.x) jv["x"] = *v.x;
        if (v.psi_h) jv["psi_h"] = *v.psi_h;
        j["vehicles"].push_back(std::move(jv));
    }
    j["initial_trust"] = nlohmann::json::array();
    for (const auto& [key, tst] : cfg.initial_trust)
        j["initial_trust"].push_back({{"from", key.first}, {"to", key.second}, {"tst", tst}});
    j["queries"] = nlohmann::json::array();
    for (const auto& q : cfg.queries)
        j["queries"].push_back({{"s", q.s}, {"d", q.d}, {"at", q.at}});
    return j;
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    ScenarioConfig cfg;
    if (j.contains("highway")) {
        const auto& h = j["highway"];
        if (h.contains("length")) cfg.highway.length = h["length"].get<double>();
        if (h.contains("lanes")) cfg.highway.lanes = h["lanes"].get<int>();
        if (h.contains("lane_width")) cfg.highway.lane_width = h["lane_width"].get<double>();
        if (h.contains("range")) cfg.highway.h = h["range"].get<double>();
        if (h.contains("dt")) cfg.highway.dt = h["dt"].get<double>();
    }
    if (j.contains("thresholds")) {
        const auto& t = j["thresholds"];
        if (t.contains("psi_h")) cfg.thresholds.psi_h = t["psi_h"].get<double>();
        if (t.contains("psi_l")) cfg.thresholds.psi_l = t["psi_l"].get<double>();
        if (t.contains("psi_t")) cfg.thresholds.psi_t = t["psi_t"].get<double>();
    }
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        if (w.contains("delta_d")) cfg.weights.delta_d = w["delta_d"].get<double>();
        if (w.contains("delta_h")) cfg.weights.delta_h = w["delta_h"].get<double>();
        if (w.contains("delta_t")) cfg.weights.delta_t = w["delta_t"].get<double>();
        if (w.contains("delta_f")) cfg.weights.delta_f = w["delta_f"].get<double>();
        if (w.contains("gamma")) cfg.gamma = w["gamma"].get<double>();
    }
    if (j.contains("crypto")) {
        const auto& c = j["crypto"];
        if (c.contains("key_bits")) cfg.key_bits = c["key_bits"].get<unsigned>();
        if (c.contains("seed")) cfg.crypto_seed = c["seed"].get<unsigned long>();
        if (c.contains("t_exp_ms")) cfg.t_exp_ms = c["t_exp_ms"].get<double>();
    }
    if (j.contains("sim")) {
        const auto& s = j["sim"];
        if (s.contains("duration")) cfg.duration = s["duration"].get<double>();
        if (s.contains("seed")) cfg.sim_seed = s["seed"].get<unsigned long>();
        if (s.contains("z_max")) cfg.z_max = s["z_max"].get<std::size_t>();
        if (s.contains("centrality_basis"))
            cfg.centrality_basis = s["centrality_basis"].get<std::string>() == "comm"
                                       ? CentralityBasis::CommLinks
                                       : CentralityBasis::SocialEstablished;
    }
    if (j.contains("fixed_point") && j["fixed_point"].contains("scale"))
        cfg.fixed_point_scale = j["fixed_point"]["scale"].get<unsigned>();
    for (const auto& jv : j.value("vehicles", nlohmann::json::array())) {
        VehicleSpec v;
        v.id = jv.at("id").get<VehicleId>();
        v.entry_time = jv.value("entry_time", 0.0);
        v.lane = jv.value("lane", 0);
        v.speed = jv.value("speed", 0.0);
        if (jv.contains("x")) v.x = jv["x"].get<double>();
        v.profile = InterestProfile::from_string(jv.value("profile", ""));
        if (jv.contains("psi_h")) v.psi_h = jv["psi_h"].get<double>();
        cfg.vehicles.push_back(std::move(v));
    }
    for (const auto& jt : j.value("initial_trust", nlohmann::json::array()))
        cfg.initial_trust[{jt.at("from").get<VehicleId>(), jt.at("to").get<VehicleId>()}] =
            jt.at("tst").get<double>();
    for (const auto& jq : j.value("queries", nlohmann::json::array()))
        cfg.queries.push_back(QuerySpec{.s = jq.at("s").get<VehicleId>(),
                                        .d = jq.at("d").get<VehicleId>(),
                                        .at = jq.value("at", 0.0)});
    return cfg;
}

// Accepts either the key/value text form or JSON.
inline ScenarioConfig parse_scenario(const std::string& text) {
    const std::string trimmed = detail::trim(text);
    if (!trimmed.empty() && trimmed.front() == '{')
        return scenario_from_json(nlohmann::json::parse(trimmed));
    return parse_scenario_text(text);
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

// Field-level validation; throws ConfigError naming the offending field.
inline void validate_scenario(const ScenarioConfig& cfg) {
    auto require = [](bool ok, const std::string& field, const std::string& msg) {
        if (!ok) throw ConfigError(field, msg);
    };
    require(cfg.highway.length > 0, "highway.length", "must be positive");
    require(cfg.highway.lanes >= 1, "highway.lanes", "must be at least 1");
    require(cfg.highway.h > 0, "highway.range", "must be positive");
    require(cfg.highway.dt > 0, "highway.dt", "must be positive");
    require(cfg.thresholds.psi_h >= 0 && cfg.thresholds.psi_h <= 1, "thresholds.psi_h",
            "must lie in [0, 1]");
    require(cfg.thresholds.psi_l > 0, "thresholds.psi_l", "must be positive");
    require(cfg.thresholds.psi_t >= -1 && cfg.thresholds.psi_t <= 1, "thresholds.psi_t",
            "must lie in [-1, 1]");
    require(cfg.weights.delta_d >= 0 && cfg.weights.delta_d <= 1, "weights.delta_d",
            "must lie in [0, 1]");
    require(cfg.weights.delta_h >= 0 && cfg.weights.delta_h <= 1, "weights.delta_h",
            "must lie in [0, 1]");
    require(cfg.weights.delta_t >= -1 && cfg.weights.delta_t <= 0.1, "weights.delta_t",
            "must lie in [-1, 0.1]");
    require(cfg.weights.delta_f >= 0 && cfg.weights.delta_f <= 1, "weights.delta_f",
            "must lie in [0, 1]");
    require(cfg.gamma > 0 && cfg.gamma <= 1, "weights.gamma", "must lie in (0, 1]");
    require(cfg.key_bits >= 16, "crypto.key_bits", "must be at least 16");
    require(cfg.fixed_point_scale >= 1, "fixed_point.scale", "must be at least 1");
    require(cfg.duration >= 0, "sim.duration", "must be non-negative");
    require(cfg.z_max >= 1, "sim.z_max", "must be at least 1");

    std::size_t profile_len = 0;
    std::map<VehicleId, bool> seen;
    for (const auto& v : cfg.vehicles) {
        const std::string field = "vehicle " + v.id;
        require(!seen.contains(v.id), field, "duplicate vehicle id");
        seen[v.id] = true;
        require(v.lane >= 0 && v.lane < cfg.highway.lanes, field + ".lane",
                "outside configured lane count");
        require(v.entry_time >= 0, field + ".entry_time", "must be non-negative");
        if (v.x)
            require(*v.x >= 0 && *v.x <= cfg.highway.length, field + ".x",
                    "outside the highway");
        if (v.psi_h)
            require(*v.psi_h >= 0 && *v.psi_h <= 1, field + ".psi_h", "must lie in [0, 1]");
        if (profile_len == 0) profile_len = v.profile.size();
        require(v.profile.size() == profile_len, field + ".profile",
                "profile lengths must be uniform");
        require(v.profile.size() > 0, field + ".profile", "profile missing");
    }
    for (const auto& [key, tst] : cfg.initial_trust) {
        const std::string field = "trust " + key.first + " " + key.second;
        require(seen.contains(key.first) && seen.contains(key.second), field,
                "references unknown vehicle");
        require(tst >= -1 && tst <= 1, field + ".tst", "must lie in [-1, 1]");
    }
    for (const auto& q : cfg.queries) {
        const std::string field = "query " + q.s + " " + q.d;
        require(seen.contains(q.s) && seen.contains(q.d), field, "references unknown vehicle");
        require(q.s != q.d, field, "source equals destination");
        require(q.at >= 0 && q.at <= cfg.duration, field + ".at", "outside the run window");
        const double steps = q.at / cfg.highway.dt;
        require(std::abs(steps - std::round(steps)) < 1e-9, field + ".at",
                "must be a multiple of the step dt");
    }
}

} // namespace segtrust
