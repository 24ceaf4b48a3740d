#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "segtrust/json_io.hpp"
#include "segtrust/log.hpp"
#include "segtrust/scenario.hpp"
#include "segtrust/trust_protocol.hpp"

namespace segtrust {

struct QueryOutcome {
    QuerySpec spec;
    std::string query_id;
    bool ok = false;
    std::string error;
    protocol::IndirectTrustResult result;
    // Modelled decryption cost: one exponentiation per route decryption at
    // the configured per-exponentiation time. Deterministic by design so
    // metric rows replay byte-identically; measured wall times go to the
    // run report instead.
    double decrypt_model_ms = 0.0;
};

struct StepSummary {
    double t = 0.0;
    std::size_t vehicles = 0;
    std::size_t comm_edges = 0;
    std::size_t social_established = 0;
};

struct CryptoTimings {
    double mean_encrypt_ms = 0.0;
    double mean_decrypt_ms = 0.0;
    double mean_hom_add_ms = 0.0;
    double exp_estimate_ms = 0.0; // single modular exponentiation, measured
    int samples = 0;
};

struct RunReport {
    std::vector<StepSummary> steps;
    std::vector<QueryOutcome> queries;
    net::NetMetrics net;
    CryptoTimings crypto;
};

// Measured wall-clock costs of the primitive operations for the report.
inline CryptoTimings measure_crypto(const paillier::Keypair& keys, int samples = 24) {
    using clock = std::chrono::steady_clock;
    CryptoTimings out;
    out.samples = samples;
    SeededRng rng(0xbe5c);
    const paillier::PublicKey& pk = keys.first;

    auto ms_per = [&](auto&& fn) {
        const auto begin = clock::now();
        for (int i = 0; i < samples; ++i) fn();
        const auto end = clock::now();
        return std::chrono::duration<double, std::milli>(end - begin).count() / samples;
    };

    paillier::Ciphertext c1 = paillier::encrypt(pk, 1, rng);
    paillier::Ciphertext c2 = paillier::encrypt(pk, 2, rng);
    out.mean_encrypt_ms = ms_per([&] { c1 = paillier::encrypt(pk, 1, rng); });
    out.mean_decrypt_ms = ms_per([&] { (void)paillier::decrypt(keys.second, pk, c1); });
    out.mean_hom_add_ms = ms_per([&] { c2 = paillier::hom_add(pk, c1, c2); });
    out.exp_estimate_ms = ms_per([&] {
        mpz_class base = rng.unit_mod(pk.n);
        mpz_class r;
        mpz_powm(r.get_mpz_t(), base.get_mpz_t(), pk.n.get_mpz_t(), pk.n_squared.get_mpz_t());
    });
    return out;
}

// Drives one scenario: constant-velocity stepping, per-step SEG rebuild,
// BSM exchange over the simulated network, and scheduled trust queries.
class SimDriver {
public:
    explicit SimDriver(ScenarioConfig cfg)
        : cfg_(std::move(cfg)),
          keys_(paillier::generate_keypair(cfg_.key_bits, cfg_.crypto_seed)),
          enc_rng_(cfg_.crypto_seed ^ 0x5eedULL),
          net_(0.010) {
        validate_scenario(cfg_);
        for (const auto& v : cfg_.vehicles) {
            SocialAttrs attrs;
            attrs.profile = v.profile;
            attrs.psi_h = v.psi_h;
            attrs_.emplace(v.id, std::move(attrs));
        }
        pending_ = cfg_.vehicles;
        std::stable_sort(pending_.begin(), pending_.end(),
                         [](const VehicleSpec& a, const VehicleSpec& b) {
                             return a.entry_time < b.entry_time;
                         });
        params_.thresholds = cfg_.thresholds;
        params_.weights = cfg_.weights;
        params_.h = cfg_.highway.h;
        params_.centrality_basis = cfg_.centrality_basis;
        proto_.weights = cfg_.weights;
        proto_.thresholds = cfg_.thresholds;
        proto_.gamma = cfg_.gamma;
        proto_.scale = cfg_.fixed_point_scale;
        proto_.z_max = cfg_.z_max;
        proto_.centrality_basis = cfg_.centrality_basis;
        net_.set_trace([this](const std::string& line) { trace_.push_back(line); });
    }

    const SegTimeline& timeline() const { return timeline_; }
    const ScenarioConfig& config() const { return cfg_; }
    const net::NetMetrics& net_metrics() const { return net_.metrics(); }
    const std::vector<std::string>& trace() const { return trace_; }
    const paillier::Keypair& keys() const { return keys_; }

    bool done() const { return next_t_ > cfg_.duration + 1e-9; }
    double current_time() const { return next_t_ - cfg_.highway.dt; }

    // Process the step at next_t_: move vehicles, admit arrivals, rebuild
    // the SEG, exchange BSMs.
    StepSummary advance_step() {
        const double t = next_t_;
        if (!timeline_.empty()) states_ = step(states_, cfg_.highway);
        while (arrival_ < pending_.size() && pending_[arrival_].entry_time <= t + 1e-9) {
            const VehicleSpec& v = pending_[arrival_++];
            VehicleState s;
            s.id = v.id;
            s.lane = v.lane;
            s.y = v.lane * cfg_.highway.lane_width;
            s.v = v.speed;
            s.x = v.x.value_or(v.speed >= 0 ? 0.0 : cfg_.highway.length);
            states_.push_back(std::move(s));
        }

        const SegSnapshot* prev = timeline_.empty() ? nullptr : &timeline_.back();
        SegSnapshot snap =
            build_snapshot(states_, attrs_, prev, t, params_, cfg_.initial_trust);
        timeline_.append(std::move(snap));
        const SegSnapshot& current = timeline_.back();
        net_.set_snapshot(&current, cfg_.highway.h);
        net_.set_time(t);

        exchange_bsms(current, t);

        StepSummary summary;
        summary.t = t;
        summary.vehicles = current.vehicle_count();
        summary.comm_edges = current.comm_edges.size();
        for (const auto& [key, e] : current.social_edges)
            if (e.established) ++summary.social_established;
        log(LogLevel::Debug, "t=" + detail::fmt_double(t) + " vehicles=" +
                                 std::to_string(summary.vehicles) + " social=" +
                                 std::to_string(summary.social_established));
        next_t_ += cfg_.highway.dt;
        return summary;
    }

    QueryOutcome execute_query(const QuerySpec& q) {
        QueryOutcome outcome;
        outcome.spec = q;
        outcome.query_id = "q" + std::to_string(query_serial_++);
        const SegSnapshot& snap = timeline_.back();
        try {
            outcome.result = protocol::initiate(q.s, q.d, snap, proto_, keys_, net_, enc_rng_,
                                                outcome.query_id);
            outcome.ok = true;
            outcome.decrypt_model_ms =
                static_cast<double>(outcome.result.per_route.size()) * cfg_.t_exp_ms;
            log(LogLevel::Info, "query " + outcome.query_id + " " + q.s + "->" + q.d +
                                    " tst_sd=" + detail::fmt_double(outcome.result.tst_sd) +
                                    " messages=" + std::to_string(outcome.result.messages_sent));
        } catch (const UnreachableError&) {
            outcome.error = "no trusted route";
            log(LogLevel::Warn, "query " + outcome.query_id + " " + q.s + "->" + q.d +
                                    ": no trusted route");
        } catch (const LookupError&) {
            outcome.error = "vehicle not present at query time";
            log(LogLevel::Warn, "query " + outcome.query_id + " " + q.s + "->" + q.d +
                                    ": vehicle not present at query time");
        }
        trace_query(outcome, snap.time);
        return outcome;
    }

    // Full scheduled run. out_dir empty: compute only, write nothing.
    RunReport run(const std::string& out_dir = "") {
        RunReport report;
        while (!done()) {
            report.steps.push_back(advance_step());
            const double t = current_time();
            for (const auto& q : cfg_.queries) {
                if (std::abs(q.at - t) < 1e-9) report.queries.push_back(execute_query(q));
            }
        }
        report.net = net_.metrics();
        report.crypto = measure_crypto(keys_);
        if (!out_dir.empty()) write_outputs(report, out_dir);
        return report;
    }

    // Advance to time t (inclusive) without touching scheduled queries.
    void run_until(double t) {
        while (!done() && next_t_ <= t + 1e-9) advance_step();
    }

    static std::string metrics_csv(const RunReport& report) {
        std::ostringstream csv;
        csv << "query_id,s,d,routes,messages,decrypt_ms,tst_sd\n";
        for (const auto& q : report.queries) {
            csv << q.query_id << "," << q.spec.s << "," << q.spec.d << ","
                << q.result.routes_used.size() << "," << q.result.messages_sent << ","
                << detail::fmt_double(q.decrypt_model_ms) << ",";
            if (q.ok)
                csv << detail::fmt_double(q.result.tst_sd);
            else
                csv << "nan";
            csv << "\n";
        }
        return csv.str();
    }

private:
    void exchange_bsms(const SegSnapshot& snap, double t) {
        std::map<VehicleId, double> psi;
        for (const auto& [id, node] : snap.nodes) psi[id] = node.psi_h;
        std::map<VehicleId, InterestProfile> profiles;
        for (const auto& [id, node] : snap.nodes) profiles[id] = node.profile;
        const auto records = broadcast_bsms(states_, profiles, psi, t);
        for (const auto& rec : records) {
            for (const auto& [other, node] : snap.nodes) {
                if (other == rec.sender) continue;
                if (!in_range(snap.nodes.at(rec.sender).state, node.state, cfg_.highway.h))
                    continue;
                net_.send(rec.sender, other, rec);
            }
        }
        net_.run_until_idle();
    }

    void trace_query(const QueryOutcome& outcome, double t) {
        nlohmann::json line;
        line["t"] = t;
        line["event"] = "query";
        line["id"] = outcome.query_id;
        line["s"] = outcome.spec.s;
        line["d"] = outcome.spec.d;
        if (outcome.ok) {
            line["tst_sd"] = outcome.result.tst_sd;
            line["routes"] = outcome.result.routes_used.routes;
            line["messages"] = outcome.result.messages_sent;
            line["direct"] = outcome.result.direct;
        } else {
            line["error"] = outcome.error;
        }
        trace_.push_back(line.dump());
    }

    void write_outputs(const RunReport& report, const std::string& out_dir) const {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);

        nlohmann::json snaps = nlohmann::json::array();
        for (const auto& s : timeline_.snapshots()) snaps.push_back(snapshot_to_json(s));
        std::ofstream(fs::path(out_dir) / "snapshots.json")
            << nlohmann::json{{"snapshots", std::move(snaps)}}.dump(2) << "\n";

        std::ofstream(fs::path(out_dir) / "metrics.csv") << metrics_csv(report);

        std::ofstream tracef(fs::path(out_dir) / "trace.jsonl");
        for (const auto& line : trace_) tracef << line << "\n";

        std::ofstream(fs::path(out_dir) / "report.json") << report_json(report).dump(2) << "\n";
    }

public:
    nlohmann::json report_json(const RunReport& report) const {
        nlohmann::json j;
        j["scenario"] = scenario_to_json(cfg_);
        j["steps"] = nlohmann::json::array();
        for (const auto& s : report.steps)
            j["steps"].push_back({{"t", s.t},
                                  {"vehicles", s.vehicles},
                                  {"comm_edges", s.comm_edges},
                                  {"social_established", s.social_established}});
        j["queries"] = nlohmann::json::array();
        for (const auto& q : report.queries) {
            nlohmann::json jq = {{"id", q.query_id}, {"s", q.spec.s}, {"d", q.spec.d},
                                 {"at", q.spec.at},  {"ok", q.ok}};
            if (q.ok) {
                jq["tst_sd"] = q.result.tst_sd;
                jq["direct"] = q.result.direct;
                jq["routes"] = q.result.routes_used.routes;
                jq["messages"] = q.result.messages_sent;
                jq["decrypt_ms"] = q.decrypt_model_ms;
                jq["centrality_d"] = q.result.centrality_d;
                jq["shp_sd"] = q.result.shp_sd;
                jq["per_route"] = nlohmann::json::array();
                for (const auto& r : q.result.per_route)
                    jq["per_route"].push_back({{"route", r.route},
                                               {"op_f", r.op_f},
                                               {"contributors", r.contributors},
                                               {"flagged", r.flagged}});
            } else {
                jq["error"] = q.error;
            }
            j["queries"].push_back(std::move(jq));
        }
        j["net"] = {{"sent", report.net.sent},
                    {"delivered", report.net.delivered},
                    {"dropped", report.net.dropped},
                    {"by_type", report.net.messages_by_type},
                    {"per_query", report.net.per_query}};
        j["crypto_timings"] = {{"mean_encrypt_ms", report.crypto.mean_encrypt_ms},
                               {"mean_decrypt_ms", report.crypto.mean_decrypt_ms},
                               {"mean_hom_add_ms", report.crypto.mean_hom_add_ms},
                               {"exp_estimate_ms", report.crypto.exp_estimate_ms},
                               {"t_exp_model_ms", cfg_.t_exp_ms},
                               {"samples", report.crypto.samples}};
        return j;
    }

private:
    ScenarioConfig cfg_;
    paillier::Keypair keys_;
    SeededRng enc_rng_;
    net::Network net_;
    SegParams params_;
    protocol::ProtocolParams proto_;
    std::map<VehicleId, SocialAttrs> attrs_;
    std::vector<VehicleSpec> pending_;
    std::size_t arrival_ = 0;
    std::vector<VehicleState> states_;
    SegTimeline timeline_;
    std::vector<std::string> trace_;
    double next_t_ = 0.0;
    int query_serial_ = 0;
};

// Snapshot JSON to plot-ready CSV tables (nodes and social edges).
struct ExportTables {
    std::string nodes_csv;
    std::string edges_csv;
};

inline ExportTables export_tables(const nlohmann::json& snapshots_doc) {
    using detail::fmt_double;
    std::ostringstream nodes;
    std::ostringstream edges;
    nodes << "t,id,x,y,v,lane\n";
    edges << "t,from,to,shp,tst,et,established\n";
    for (const auto& js : snapshots_doc.at("snapshots")) {
        const SegSnapshot snap = snapshot_from_json(js);
        for (const auto& [id, node] : snap.nodes) {
            nodes << fmt_double(snap.time) << "," << id << "," << fmt_double(node.state.x) << ","
                  << fmt_double(node.state.y) << "," << fmt_double(node.state.v) << ","
                  << node.state.lane << "\n";
        }
        for (const auto& [key, e] : snap.social_edges) {
            edges << fmt_double(snap.time) << "," << e.from << "," << e.to << ","
                  << fmt_double(e.shp) << "," << fmt_double(e.tst) << ",";
            if (e.et.is_unbounded())
                edges << "inf";
            else
                edges << fmt_double(e.et.seconds());
            edges << "," << (e.established ? 1 : 0) << "\n";
        }
    }
    return {nodes.str(), edges.str()};
}

} // namespace segtrust
