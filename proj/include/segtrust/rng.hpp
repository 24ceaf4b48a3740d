#pragma once

#include <cmath>
#include <cstdint>
#include <gmpxx.h>

#include "segtrust/errors.hpp"

namespace segtrust {

// Deterministic big-integer randomness for key generation and encryption
// blinding. Same seed, same stream, so simulation runs replay bit-exactly.
class SeededRng {
public:
    explicit SeededRng(unsigned long seed) {
        gmp_randinit_default(state_);
        gmp_randseed_ui(state_, seed);
    }
    ~SeededRng() { gmp_randclear(state_); }

    SeededRng(const SeededRng&) = delete;
    SeededRng& operator=(const SeededRng&) = delete;

    mpz_class bits(unsigned long n) {
        mpz_class out;
        mpz_urandomb(out.get_mpz_t(), state_, n);
        return out;
    }

    // Uniform in [0, bound).
    mpz_class below(const mpz_class& bound) {
        mpz_class out;
        mpz_urandomm(out.get_mpz_t(), state_, bound.get_mpz_t());
        return out;
    }

    // Uniform unit in Z*_n, i.e. gcd(r, n) = 1 and 0 < r < n.
    mpz_class unit_mod(const mpz_class& n) {
        if (n <= 1) throw DomainError("unit_mod: modulus must exceed 1");
        for (int attempt = 0; attempt < 256; ++attempt) {
            mpz_class r = below(n);
            if (r == 0) continue;
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
            if (g == 1) return r;
        }
        throw GenerationError("unit_mod: could not find a unit mod n");
    }

private:
    gmp_randstate_t state_;
};

// Small deterministic generator for scenario/test material (positions,
// speeds, profiles). splitmix64 core; avoids libstdc++ distribution
// implementation details leaking into replayability guarantees.
class SmallRng {
public:
    explicit SmallRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) { return bound ? next_u64() % bound : 0; }

    bool chance(double p) { return uniform() < p; }

    // Exponential with the given rate; used for Poisson arrival gaps.
    double exponential(double rate) {
        double u = uniform();
        return -std::log1p(-u) / rate;
    }

private:
    std::uint64_t state_;
};

} // namespace segtrust
