#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "segtrust/rng.hpp"
#include "segtrust/types.hpp"

namespace segtrust {

// Kinematic state of one vehicle. x runs along the highway, y is the lane
// offset, v is signed (sign = travel direction).
struct VehicleState {
    VehicleId id;
    double x = 0.0;
    double y = 0.0;
    double v = 0.0;
    int lane = 0;

    bool operator==(const VehicleState&) const = default;
};

struct HighwayConfig {
    double length = 2000.0;   // m
    int lanes = 2;
    double lane_width = 3.5;  // m
    double h = 300.0;         // communication range H, m
    double dt = 1.0;          // step, s

    bool operator==(const HighwayConfig&) const = default;
};

// Periodic beacon carrying the sender's state plus its advertised social
// interests and homophily threshold.
struct BsmRecord {
    VehicleId sender;
    double time = 0.0;
    double x = 0.0;
    double y = 0.0;
    double v = 0.0;
    InterestProfile profile;
    double psi_h = 0.0;
};

inline double distance(const VehicleState& a, const VehicleState& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline bool in_range(const VehicleState& a, const VehicleState& b, double h) {
    return distance(a, b) <= h;
}

// The four relative-motion cases and their (theta, vartheta) signs.
enum class MotionCase {
    Overtaking,           // trailing vehicle faster, same direction: (-1, +1)
    MovingForwardInFront, // leading vehicle pulling away (or equal speed): (+1, +1)
    TowardEachOther,      // opposite directions, closing: (-1, -1)
    AwayFromEachOther,    // opposite directions, receding: (+1, -1)
};

struct MotionSigns {
    int theta;
    int vartheta;
};

inline MotionSigns motion_signs(MotionCase c) {
    switch (c) {
    case MotionCase::Overtaking: return {-1, +1};
    case MotionCase::MovingForwardInFront: return {+1, +1};
    case MotionCase::TowardEachOther: return {-1, -1};
    case MotionCase::AwayFromEachOther: return {+1, -1};
    }
    return {+1, +1}; // unreachable
}

// Total classification of an ordered state pair. Vehicles travelling in
// strictly opposite directions fall in the toward/away cases; everything
// else (including zero speeds) uses the same-direction cases. The gap is
// closing when d|p_i - p_j|/dt < 0, i.e. (x_i - x_j)(v_i - v_j) < 0.
inline MotionCase classify_motion(const VehicleState& a, const VehicleState& b) {
    const bool opposite = a.v * b.v < 0.0;
    const bool closing = (a.x - b.x) * (a.v - b.v) < 0.0;
    if (opposite) return closing ? MotionCase::TowardEachOther : MotionCase::AwayFromEachOther;
    return closing ? MotionCase::Overtaking : MotionCase::MovingForwardInFront;
}

// Constant-velocity step. Vehicles that leave [0, length] are removed.
inline std::vector<VehicleState> step(const std::vector<VehicleState>& states,
                                      const HighwayConfig& cfg) {
    std::vector<VehicleState> next;
    next.reserve(states.size());
    for (const auto& s : states) {
        VehicleState moved = s;
        moved.x += moved.v * cfg.dt;
        if (moved.x < 0.0 || moved.x > cfg.length) continue;
        next.push_back(moved);
    }
    return next;
}

inline std::vector<BsmRecord> broadcast_bsms(const std::vector<VehicleState>& states,
                                             const std::map<VehicleId, InterestProfile>& profiles,
                                             const std::map<VehicleId, double>& psi_h,
                                             double t) {
    std::vector<BsmRecord> out;
    out.reserve(states.size());
    for (const auto& s : states) {
        BsmRecord rec;
        rec.sender = s.id;
        rec.time = t;
        rec.x = s.x;
        rec.y = s.y;
        rec.v = s.v;
        if (auto it = profiles.find(s.id); it != profiles.end()) rec.profile = it->second;
        if (auto it = psi_h.find(s.id); it != psi_h.end()) rec.psi_h = it->second;
        out.push_back(std::move(rec));
    }
    return out;
}

// One scheduled entry onto the highway.
struct Arrival {
    double time = 0.0;
    VehicleState state;
};

// Fixed arrival schedule; also constructible as a seeded Poisson process
// so synthetic scenarios stay reproducible.
class ArrivalSchedule {
public:
    ArrivalSchedule() = default;
    explicit ArrivalSchedule(std::vector<Arrival> arrivals) : arrivals_(std::move(arrivals)) {
        std::stable_sort(arrivals_.begin(), arrivals_.end(),
                         [](const Arrival& a, const Arrival& b) { return a.time < b.time; });
    }

    static ArrivalSchedule poisson(double rate_per_s, double horizon_s, const HighwayConfig& cfg,
                                   std::uint64_t seed) {
        SmallRng rng(seed);
        std::vector<Arrival> out;
        double t = rng.exponential(rate_per_s);
        int serial = 0;
        while (t < horizon_s) {
            Arrival a;
            a.time = t;
            a.state.id = "p" + std::to_string(serial++);
            a.state.lane = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.lanes)));
            a.state.y = a.state.lane * cfg.lane_width;
            a.state.v = rng.uniform(20.0, 35.0);
            a.state.x = 0.0;
            out.push_back(std::move(a));
            t += rng.exponential(rate_per_s);
        }
        return ArrivalSchedule(std::move(out));
    }

    // Pop every arrival due at or before t.
    std::vector<VehicleState> due(double t) {
        std::vector<VehicleState> out;
        while (next_ < arrivals_.size() && arrivals_[next_].time <= t)
            out.push_back(arrivals_[next_++].state);
        return out;
    }

    const std::vector<Arrival>& all() const { return arrivals_; }

private:
    std::vector<Arrival> arrivals_;
    std::size_t next_ = 0;
};

} // namespace segtrust
