#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "segtrust/errors.hpp"

namespace segtrust {

// Vehicles are identified by pseudonyms; scenario files use short names.
using VehicleId = std::string;

// Binary interest vector HP. All profiles in a scenario share one length.
struct InterestProfile {
    std::vector<std::uint8_t> bits;

    InterestProfile() = default;
    explicit InterestProfile(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

    // Parse from a "10110..." string.
    static InterestProfile from_string(const std::string& s) {
        InterestProfile p;
        p.bits.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1') throw ProfileError("profile bits must be 0 or 1");
            p.bits.push_back(c == '1' ? 1 : 0);
        }
        return p;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(bits.size());
        for (auto b : bits) s.push_back(b ? '1' : '0');
        return s;
    }

    std::size_t size() const { return bits.size(); }
    int popcount() const {
        int c = 0;
        for (auto b : bits) c += b;
        return c;
    }

    bool operator==(const InterestProfile&) const = default;
};

// Establishment thresholds: homophily, link duration (s), trust.
struct Thresholds {
    double psi_h = 0.6;
    double psi_l = 12.0;
    double psi_t = 0.5;

    bool operator==(const Thresholds&) const = default;
};

// Weighting factors for the direct and indirect trust estimates.
// delta_t may be negative to penalise past behaviour.
struct TrustWeights {
    double delta_d = 1.0; // centrality weight, [0, 1]
    double delta_h = 1.0; // homophily weight, [0, 1]
    double delta_t = 0.1; // prior-trust weight, [-1, 0.1]
    double delta_f = 1.0; // opinion weight, [0, 1]

    bool operator==(const TrustWeights&) const = default;
};

// Expected remaining link duration. Unbounded means zero relative speed;
// it compares greater than every finite duration.
class LinkDuration {
public:
    static LinkDuration finite(double seconds) { return LinkDuration(false, seconds); }
    static LinkDuration unbounded() { return LinkDuration(true, 0.0); }

    bool is_unbounded() const { return unbounded_; }

    // Only valid for finite durations.
    double seconds() const {
        if (unbounded_) throw DomainError("LinkDuration: unbounded has no finite value");
        return seconds_;
    }

    bool exceeds(double threshold) const { return unbounded_ || seconds_ > threshold; }

    friend bool operator<(const LinkDuration& a, const LinkDuration& b) {
        if (a.unbounded_) return false;
        if (b.unbounded_) return true;
        return a.seconds_ < b.seconds_;
    }
    friend bool operator>(const LinkDuration& a, const LinkDuration& b) { return b < a; }
    friend bool operator==(const LinkDuration& a, const LinkDuration& b) {
        return a.unbounded_ == b.unbounded_ && (a.unbounded_ || a.seconds_ == b.seconds_);
    }

    friend LinkDuration min(const LinkDuration& a, const LinkDuration& b) {
        return a < b ? a : b;
    }

private:
    LinkDuration(bool unbounded, double seconds) : unbounded_(unbounded), seconds_(seconds) {}
    bool unbounded_;
    double seconds_;
};

inline double clamp_trust(double t) { return std::clamp(t, -1.0, 1.0); }

} // namespace segtrust
