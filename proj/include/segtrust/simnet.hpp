#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "segtrust/messages.hpp"
#include "segtrust/seg.hpp"

namespace segtrust::net {

using Payload = std::variant<BsmRecord, OpinionRequest, OpinionReply>;

struct Envelope {
    VehicleId from;
    VehicleId to;
    Payload payload;
    double send_time = 0.0;
    double deliver_time = 0.0;
    std::uint64_t seq = 0;
};

inline const char* payload_type(const Payload& p) {
    switch (p.index()) {
    case 0: return "bsm";
    case 1: return "opinion_request";
    default: return "opinion_reply";
    }
}

struct NetMetrics {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::map<std::string, std::uint64_t> messages_by_type;
    std::map<std::string, std::uint64_t> per_query;
    std::map<std::string, std::uint64_t> drop_reasons;

    std::uint64_t total_messages() const { return sent; }
};

enum class SendOutcome { Accepted, Dropped };

// Deterministic discrete-event carrier. Direct sends are range-checked
// against the current snapshot; a routed send delivers along a known route
// of links and counts as a single message, with latency per hop traversed.
// Events are processed in (deliver_time, sequence) order, so identical
// scenarios replay identically.
class Network {
public:
    using Handler = std::function<void(Network&, const Envelope&)>;
    using TraceSink = std::function<void(const std::string& line)>;

    explicit Network(double hop_latency_s = 0.010) : hop_latency_(hop_latency_s) {}

    // Topology for range checks. Null snapshot disables them.
    void set_snapshot(const SegSnapshot* snap, double range_h) {
        snapshot_ = snap;
        range_ = range_h;
    }
    void set_handler(Handler h) { handler_ = std::move(h); }
    void set_trace(TraceSink sink) { trace_ = std::move(sink); }
    void set_time(double t) { now_ = t; }
    double now() const { return now_; }

    SendOutcome send(const VehicleId& from, const VehicleId& to, Payload payload) {
        count_send(payload);
        if (!node_known(to)) return drop(from, to, std::move(payload), "unknown_receiver");
        if (!pair_in_range(from, to)) return drop(from, to, std::move(payload), "out_of_range");
        return enqueue(from, to, std::move(payload), 1);
    }

    // Dispatch to the last node of route_prefix via the intermediate hops.
    SendOutcome send_routed(const std::vector<VehicleId>& route_prefix, Payload payload) {
        count_send(payload);
        if (route_prefix.size() < 2)
            return drop("", "", std::move(payload), "short_route");
        if (!node_known(route_prefix.back()))
            return drop(route_prefix.front(), route_prefix.back(), std::move(payload),
                        "unknown_receiver");
        for (std::size_t i = 0; i + 1 < route_prefix.size(); ++i) {
            if (!pair_in_range(route_prefix[i], route_prefix[i + 1]))
                return drop(route_prefix.front(), route_prefix.back(), std::move(payload),
                            "route_broken");
        }
        return enqueue(route_prefix.front(), route_prefix.back(), std::move(payload),
                       route_prefix.size() - 1);
    }

    const NetMetrics& metrics() const { return metrics_; }

    // Process queued events until none remain. A handler exception aborts
    // the run; metrics collected so far stay readable on the network.
    NetMetrics run_until_idle() {
        while (!queue_.empty()) {
            Envelope env = queue_.top();
            queue_.pop();
            now_ = env.deliver_time;
            ++metrics_.delivered;
            trace(env, "deliver", env.deliver_time, "");
            if (handler_) handler_(*this, env);
        }
        return metrics_;
    }

private:
    struct Later {
        bool operator()(const Envelope& a, const Envelope& b) const {
            if (a.deliver_time != b.deliver_time) return a.deliver_time > b.deliver_time;
            return a.seq > b.seq;
        }
    };

    bool node_known(const VehicleId& id) const {
        return snapshot_ == nullptr || snapshot_->nodes.contains(id);
    }

    bool pair_in_range(const VehicleId& a, const VehicleId& b) const {
        if (snapshot_ == nullptr) return true;
        if (!snapshot_->nodes.contains(a) || !snapshot_->nodes.contains(b)) return false;
        return in_range(snapshot_->nodes.at(a).state, snapshot_->nodes.at(b).state, range_);
    }

    void count_send(const Payload& payload) {
        ++metrics_.sent;
        ++metrics_.messages_by_type[payload_type(payload)];
        if (const std::string q = query_of(payload); !q.empty()) ++metrics_.per_query[q];
    }

    SendOutcome enqueue(const VehicleId& from, const VehicleId& to, Payload payload,
                        std::size_t hops) {
        Envelope env;
        env.from = from;
        env.to = to;
        env.payload = std::move(payload);
        env.send_time = now_;
        env.deliver_time = now_ + hop_latency_ * static_cast<double>(hops);
        env.seq = next_seq_++;
        trace(env, "send", env.send_time, "");
        queue_.push(std::move(env));
        return SendOutcome::Accepted;
    }

    SendOutcome drop(const VehicleId& from, const VehicleId& to, Payload payload,
                     const std::string& reason) {
        ++metrics_.dropped;
        ++metrics_.drop_reasons[reason];
        Envelope env;
        env.from = from;
        env.to = to;
        env.payload = std::move(payload);
        env.send_time = now_;
        env.deliver_time = now_;
        trace(env, "drop", env.send_time, reason);
        return SendOutcome::Dropped;
    }

    static std::string query_of(const Payload& p) {
        if (const auto* req = std::get_if<OpinionRequest>(&p)) return req->query;
        if (const auto* rep = std::get_if<OpinionReply>(&p)) return rep->state.query;
        return {};
    }

    void trace(const Envelope& env, const char* event, double t, const std::string& reason) {
        if (!trace_) return;
        nlohmann::json line;
        line["t"] = t;
        line["event"] = event;
        line["type"] = payload_type(env.payload);
        line["from"] = env.from;
        line["to"] = env.to;
        if (!reason.empty()) line["reason"] = reason;
        const OpinionRequest* state = nullptr;
        if (const auto* req = std::get_if<OpinionRequest>(&env.payload)) state = req;
        if (const auto* rep = std::get_if<OpinionReply>(&env.payload)) state = &rep->state;
        if (state != nullptr) {
            line["route"] = state->route;
            line["cursor"] = state->cursor;
            line["acc"] = paillier::to_hex(state->accumulator.value);
            line["nonce"] = state->nonce;
        }
        trace_(line.dump());
    }

    double hop_latency_;
    double now_ = 0.0;
    double range_ = 300.0;
    std::uint64_t next_seq_ = 0;
    const SegSnapshot* snapshot_ = nullptr;
    Handler handler_;
    TraceSink trace_;
    NetMetrics metrics_;
    std::priority_queue<Envelope, std::vector<Envelope>, Later> queue_;
};

} // namespace segtrust::net
