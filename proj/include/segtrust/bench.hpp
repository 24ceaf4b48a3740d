#pragma once

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "segtrust/paillier.hpp"
#include "segtrust/routing.hpp"
#include "segtrust/scenario.hpp"
#include "segtrust/synthetic.hpp"

namespace segtrust::bench {

struct CryptoRow {
    unsigned key_bits = 0;
    std::string op;
    double mean_ms = 0.0;
    double p95_ms = 0.0;
};

namespace detail {

inline double percentile(std::vector<double> samples, double p) {
    std::sort(samples.begin(), samples.end());
    if (samples.empty()) return 0.0;
    const double idx = p * static_cast<double>(samples.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return samples[lo] * (1.0 - frac) + samples[hi] * frac;
}

template <typename Fn>
std::pair<double, double> time_op(int trials, Fn&& fn) {
    using clock = std::chrono::steady_clock;
    std::vector<double> ms;
    ms.reserve(trials);
    for (int i = 0; i < trials; ++i) {
        const auto begin = clock::now();
        fn();
        const auto end = clock::now();
        ms.push_back(std::chrono::duration<double, std::milli>(end - begin).count());
    }
    double sum = 0.0;
    for (double v : ms) sum += v;
    return {sum / trials, percentile(ms, 0.95)};
}

} // namespace detail

// Mean/95p timings of the primitive operations per key size, plus a
// per-exponentiation estimate (one modular exponentiation mod n^2).
inline std::vector<CryptoRow> bench_crypto(const std::vector<unsigned>& key_bits, int trials,
                                           unsigned long seed) {
    std::vector<CryptoRow> rows;
    for (unsigned bits : key_bits) {
        const paillier::Keypair keys = paillier::generate_keypair(bits, seed);
        const paillier::PublicKey& pk = keys.first;
        SeededRng rng(seed + 1);
        paillier::Ciphertext c1 = paillier::encrypt(pk, 17, rng);
        paillier::Ciphertext c2 = paillier::encrypt(pk, 4, rng);

        auto [enc_mean, enc_p95] =
            detail::time_op(trials, [&] { c1 = paillier::encrypt(pk, 17, rng); });
        rows.push_back({bits, "encrypt", enc_mean, enc_p95});

        auto [dec_mean, dec_p95] =
            detail::time_op(trials, [&] { (void)paillier::decrypt(keys.second, pk, c1); });
        rows.push_back({bits, "decrypt", dec_mean, dec_p95});

        auto [add_mean, add_p95] =
            detail::time_op(trials, [&] { c2 = paillier::hom_add(pk, c1, c2); });
        rows.push_back({bits, "hom_add", add_mean, add_p95});

        auto [exp_mean, exp_p95] = detail::time_op(trials, [&] {
            mpz_class base = rng.unit_mod(pk.n);
            mpz_class r;
            mpz_powm(r.get_mpz_t(), base.get_mpz_t(), pk.n.get_mpz_t(),
                     pk.n_squared.get_mpz_t());
        });
        rows.push_back({bits, "exponentiation", exp_mean, exp_p95});
    }
    return rows;
}

inline std::string crypto_csv(const std::vector<CryptoRow>& rows) {
    std::ostringstream csv;
    csv << "key_bits,op,mean_ms,p95_ms\n";
    for (const auto& r : rows)
        csv << r.key_bits << "," << r.op << "," << segtrust::detail::fmt_double(r.mean_ms) << ","
            << segtrust::detail::fmt_double(r.p95_ms) << "\n";
    return csv.str();
}

struct DijkstraRow {
    std::size_t vertices = 0;
    std::size_t edges = 0; // undirected social link count
    std::uint64_t extractions = 0;
    std::uint64_t relaxations = 0;
    std::uint64_t elementary = 0;
    double wall_ms = 0.0;
    double ratio = 0.0; // elementary / ((|E| + |V|) * log2 |V|)
};

// Route discovery cost over a nested family of sparse strip graphs.
inline std::vector<DijkstraRow> bench_dijkstra(const std::vector<std::size_t>& sizes,
                                               double mean_degree, unsigned long seed) {
    using clock = std::chrono::steady_clock;
    std::vector<DijkstraRow> rows;
    for (std::size_t n : sizes) {
        const SegSnapshot snap = strip_snapshot(seed, n, 300.0, mean_degree, 12.0);
        const VehicleId s = "n0";
        const VehicleId d = "n" + std::to_string(n - 1);

        const auto begin = clock::now();
        const DijkstraResult run = seg_dijkstra(snap, s, d, 12.0);
        const auto end = clock::now();

        DijkstraRow row;
        row.vertices = snap.vehicle_count();
        row.edges = snap.comm_edges.size();
        row.extractions = run.ops.heap_extractions;
        row.relaxations = run.ops.edge_relaxations;
        row.elementary = run.ops.elementary();
        row.wall_ms = std::chrono::duration<double, std::milli>(end - begin).count();
        const double denom = (static_cast<double>(row.edges) + static_cast<double>(row.vertices)) *
                             std::log2(static_cast<double>(row.vertices));
        row.ratio = static_cast<double>(row.elementary) / denom;
        rows.push_back(row);
    }
    return rows;
}

inline std::string dijkstra_csv(const std::vector<DijkstraRow>& rows) {
    std::ostringstream csv;
    csv << "vertices,edges,extractions,relaxations,elementary_ops,wall_ms,ratio\n";
    for (const auto& r : rows)
        csv << r.vertices << "," << r.edges << "," << r.extractions << "," << r.relaxations << ","
            << r.elementary << "," << segtrust::detail::fmt_double(r.wall_ms) << ","
            << segtrust::detail::fmt_double(r.ratio) << "\n";
    return csv.str();
}

} // namespace segtrust::bench
