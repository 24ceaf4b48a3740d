#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <gmpxx.h>

#include "segtrust/errors.hpp"
#include "segtrust/rng.hpp"

namespace segtrust::paillier {

inline std::string to_hex(const mpz_class& v) { return v.get_str(16); }

inline mpz_class from_hex(const std::string& s) {
    mpz_class v;
    if (v.set_str(s, 16) != 0) throw EncodingError("from_hex: not a hex integer: " + s);
    return v;
}

// Short identifier binding ciphertexts to the key they were made under.
// FNV-1a over the hex form of n.
inline std::uint64_t key_fingerprint(const mpz_class& n) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : to_hex(n)) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 1099511628211ULL;
    }
    return h;
}

struct PublicKey {
    mpz_class n;         // modulus, product of two distinct primes
    mpz_class g;         // generator; n + 1 here
    mpz_class n_squared; // cached n^2
    std::uint64_t key_id = 0;
};

struct PrivateKey {
    mpz_class lambda; // lcm(p-1, q-1)
    mpz_class mu;     // (L(g^lambda mod n^2))^-1 mod n
    std::uint64_t key_id = 0;
};

struct Ciphertext {
    mpz_class value; // element of Z*_{n^2}
    std::uint64_t key_id = 0;

    bool operator==(const Ciphertext&) const = default;
};

using Keypair = std::pair<PublicKey, PrivateKey>;

namespace detail {

// L(u) = (u - 1) / n. Defined on u = 1 mod n.
inline mpz_class big_l(const mpz_class& u, const mpz_class& n) {
    return (u - 1) / n;
}

inline bool coprime(const mpz_class& a, const mpz_class& b) {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g == 1;
}

inline mpz_class random_prime(SeededRng& rng, unsigned long bits) {
    mpz_class candidate = rng.bits(bits);
    // Force the top bit so both primes are full-width and n has ~2*bits.
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_class p;
    mpz_nextprime(p.get_mpz_t(), candidate.get_mpz_t());
    return p;
}

} // namespace detail

// Assemble a keypair from explicit primes. Also the test hook for tiny
// hand-verifiable keys such as p=5, q=7.
inline Keypair keypair_from_primes(const mpz_class& p, const mpz_class& q) {
    if (p == q) throw GenerationError("keypair: primes must be distinct");
    if (mpz_probab_prime_p(p.get_mpz_t(), 32) == 0 || mpz_probab_prime_p(q.get_mpz_t(), 32) == 0)
        throw GenerationError("keypair: factors must be prime");

    mpz_class n = p * q;
    mpz_class totient = (p - 1) * (q - 1);
    if (!detail::coprime(n, totient))
        throw GenerationError("keypair: gcd(n, (p-1)(q-1)) != 1");

    PublicKey pk;
    pk.n = n;
    pk.g = n + 1;
    pk.n_squared = n * n;
    pk.key_id = key_fingerprint(n);

    PrivateKey sk;
    mpz_lcm(sk.lambda.get_mpz_t(), mpz_class(p - 1).get_mpz_t(), mpz_class(q - 1).get_mpz_t());
    mpz_class gl;
    mpz_powm(gl.get_mpz_t(), pk.g.get_mpz_t(), sk.lambda.get_mpz_t(), pk.n_squared.get_mpz_t());
    mpz_class l = detail::big_l(gl, n);
    if (mpz_invert(sk.mu.get_mpz_t(), l.get_mpz_t(), n.get_mpz_t()) == 0)
        throw GenerationError("keypair: L(g^lambda) not invertible mod n");
    sk.key_id = pk.key_id;
    return {pk, sk};
}

// Generate an n of roughly `bits` bits from a seeded stream. bits >= 16;
// tiny keys are allowed so tests can stay fast.
inline Keypair generate_keypair(unsigned long bits, unsigned long rng_seed) {
    if (bits < 16) throw DomainError("generate_keypair: need at least 16 key bits");
    SeededRng rng(rng_seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        mpz_class p = detail::random_prime(rng, bits / 2);
        mpz_class q = detail::random_prime(rng, bits - bits / 2);
        if (p == q) continue;
        if (!detail::coprime(p * q, (p - 1) * (q - 1))) continue;
        return keypair_from_primes(p, q);
    }
    throw GenerationError("generate_keypair: no valid prime pair after bounded retries");
}

// E(m, r) = g^m * r^n mod n^2.
inline Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, const mpz_class& r) {
    if (m < 0 || m >= pk.n) throw DomainError("encrypt: plaintext outside [0, n)");
    if (r <= 0 || r >= pk.n || !detail::coprime(r, pk.n))
        throw RandomnessError("encrypt: r must be a unit in Z*_n");
    mpz_class gm, rn;
    mpz_powm(gm.get_mpz_t(), pk.g.get_mpz_t(), m.get_mpz_t(), pk.n_squared.get_mpz_t());
    mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t(), pk.n_squared.get_mpz_t());
    Ciphertext c;
    c.value = (gm * rn) % pk.n_squared;
    c.key_id = pk.key_id;
    return c;
}

inline Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, SeededRng& rng) {
    return encrypt(pk, m, rng.unit_mod(pk.n));
}

// D(c) = L(c^lambda mod n^2) * mu mod n.
inline mpz_class decrypt(const PrivateKey& sk, const PublicKey& pk, const Ciphertext& c) {
    if (c.key_id != pk.key_id || sk.key_id != pk.key_id)
        throw KeyError("decrypt: ciphertext not bound to this keypair");
    if (c.value <= 0 || c.value >= pk.n_squared || !detail::coprime(c.value, pk.n))
        throw KeyError("decrypt: malformed ciphertext, not in Z*_{n^2}");
    mpz_class cl;
    mpz_powm(cl.get_mpz_t(), c.value.get_mpz_t(), sk.lambda.get_mpz_t(), pk.n_squared.get_mpz_t());
    return (detail::big_l(cl, pk.n) * sk.mu) % pk.n;
}

// Ciphertext product decrypts to the plaintext sum mod n.
inline Ciphertext hom_add(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
    if (c1.key_id != pk.key_id || c2.key_id != pk.key_id)
        throw KeyError("hom_add: operands bound to different keys");
    Ciphertext out;
    out.value = (c1.value * c2.value) % pk.n_squared;
    out.key_id = pk.key_id;
    return out;
}

// Signed fixed-point plaintexts. Opinions in [-1, 1] become small integers
// (scale 100 turns 0.58 into 58); negatives occupy the upper half of Z_n.
struct SignedFixedPoint {
    mpz_class raw;
    unsigned scale = 100;
};

inline mpz_class encode_signed(double x, unsigned scale, const mpz_class& n) {
    if (scale == 0) throw EncodingError("encode_signed: scale must be positive");
    double scaled = std::abs(x) * static_cast<double>(scale);
    mpz_class magnitude(static_cast<long>(std::llround(scaled)));
    if (2 * magnitude >= n) throw EncodingError("encode_signed: magnitude exceeds n/2");
    if (x < 0 && magnitude > 0) return n - magnitude;
    return magnitude;
}

inline double decode_signed(const mpz_class& raw, unsigned scale, const mpz_class& n) {
    if (raw < 0 || raw >= n) throw DomainError("decode_signed: raw outside [0, n)");
    mpz_class twice = 2 * raw;
    if (twice <= n) return raw.get_d() / static_cast<double>(scale);
    return -mpz_class(n - raw).get_d() / static_cast<double>(scale);
}

} // namespace segtrust::paillier
