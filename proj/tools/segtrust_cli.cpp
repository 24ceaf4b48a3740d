// segtrust command line: scenario runs, trust queries, benchmarks and
// snapshot export. Results go to stdout, diagnostics to stderr.
//
// Exit codes: 0 success, 2 invalid configuration, 3 runtime protocol
// failure, 4 no trusted route.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segtrust/bench.hpp"
#include "segtrust/driver.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitUnreachable = 4;

segtrust::ScenarioConfig load_config(const std::string& path,
                                     std::optional<unsigned long> seed_override,
                                     std::optional<unsigned> key_bits_override) {
    segtrust::ScenarioConfig cfg = segtrust::load_scenario(path);
    if (seed_override) {
        cfg.sim_seed = *seed_override;
        cfg.crypto_seed = *seed_override;
    }
    if (key_bits_override) cfg.key_bits = *key_bits_override;
    segtrust::validate_scenario(cfg);
    return cfg;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<unsigned long> seed, std::optional<unsigned> key_bits) {
    segtrust::ScenarioConfig cfg = load_config(config_path, seed, key_bits);
    segtrust::SimDriver driver(std::move(cfg));
    const segtrust::RunReport report = driver.run(out_dir);

    std::cout << "steps: " << report.steps.size() << "\n";
    std::cout << "messages: " << report.net.sent << " sent, " << report.net.delivered
              << " delivered, " << report.net.dropped << " dropped\n";
    for (const auto& q : report.queries) {
        std::cout << "query " << q.query_id << " " << q.spec.s << " -> " << q.spec.d << " @ "
                  << q.spec.at << ": ";
        if (q.ok)
            std::cout << "tst_sd=" << q.result.tst_sd << " routes="
                      << q.result.routes_used.size() << " messages=" << q.result.messages_sent
                      << (q.result.direct ? " (direct)" : "") << "\n";
        else
            std::cout << q.error << "\n";
    }
    if (!out_dir.empty()) std::cout << "outputs: " << out_dir << "\n";
    return 0;
}

int cmd_trust_query(const std::string& config_path, const std::string& s, const std::string& d,
                    double at, std::optional<unsigned long> seed,
                    std::optional<unsigned> key_bits) {
    segtrust::ScenarioConfig cfg = load_config(config_path, seed, key_bits);
    cfg.queries.clear(); // scheduled queries are not this verb's business
    segtrust::SimDriver driver(std::move(cfg));
    driver.run_until(at);
    if (driver.timeline().empty() || std::abs(driver.current_time() - at) > 1e-9) {
        std::cerr << "query.at: no snapshot at t=" << at << " (check dt and duration)\n";
        return kExitConfig;
    }
    segtrust::QueryOutcome outcome =
        driver.execute_query(segtrust::QuerySpec{.s = s, .d = d, .at = at});
    if (!outcome.ok) {
        std::cerr << outcome.error << "\n";
        return outcome.error == "no trusted route" ? kExitUnreachable : kExitRuntime;
    }
    std::cout << "tst_sd = " << outcome.result.tst_sd << "\n";
    std::cout << "routes (" << outcome.result.routes_used.size() << "):\n";
    for (const auto& route : outcome.result.routes_used.routes) {
        std::cout << " ";
        for (const auto& hop : route) std::cout << " " << hop;
        std::cout << "\n";
    }
    std::cout << "messages = " << outcome.result.messages_sent << "\n";
    if (outcome.result.direct) std::cout << "(direct neighbour, no protocol messages)\n";
    return 0;
}

int cmd_bench(const std::string& kind, const std::vector<unsigned>& key_bits, int trials,
              const std::vector<std::size_t>& sizes, unsigned long seed,
              const std::string& out_path, const std::string& format) {
    std::string csv;
    nlohmann::json j = nlohmann::json::array();
    if (kind == "crypto") {
        const auto rows = segtrust::bench::bench_crypto(key_bits, trials, seed);
        csv = segtrust::bench::crypto_csv(rows);
        for (const auto& r : rows)
            j.push_back({{"key_bits", r.key_bits},
                         {"op", r.op},
                         {"mean_ms", r.mean_ms},
                         {"p95_ms", r.p95_ms}});
    } else if (kind == "dijkstra") {
        const auto rows = segtrust::bench::bench_dijkstra(sizes, 4.0, seed);
        csv = segtrust::bench::dijkstra_csv(rows);
        for (const auto& r : rows)
            j.push_back({{"vertices", r.vertices},
                         {"edges", r.edges},
                         {"extractions", r.extractions},
                         {"relaxations", r.relaxations},
                         {"elementary_ops", r.elementary},
                         {"wall_ms", r.wall_ms},
                         {"ratio", r.ratio}});
    } else {
        std::cerr << "bench.kind: expected 'crypto' or 'dijkstra'\n";
        return kExitConfig;
    }
    const std::string payload = format == "json" ? j.dump(2) + "\n" : csv;
    if (out_path.empty()) {
        std::cout << payload;
    } else {
        std::ofstream(out_path) << payload;
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

int cmd_export(const std::string& in_path, const std::string& out_dir,
               const std::string& format) {
    std::ifstream in(in_path);
    if (!in) {
        std::cerr << "export.in: cannot open " << in_path << "\n";
        return kExitConfig;
    }
    nlohmann::json doc = nlohmann::json::parse(in);
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    if (format == "json") {
        std::ofstream(fs::path(out_dir) / "snapshots.json") << doc.dump(2) << "\n";
        std::cout << "wrote " << (fs::path(out_dir) / "snapshots.json").string() << "\n";
        return 0;
    }
    const segtrust::ExportTables tables = segtrust::export_tables(doc);
    std::ofstream(fs::path(out_dir) / "nodes.csv") << tables.nodes_csv;
    std::ofstream(fs::path(out_dir) / "social_edges.csv") << tables.edges_csv;
    std::cout << "wrote " << (fs::path(out_dir) / "nodes.csv").string() << " and "
              << (fs::path(out_dir) / "social_edges.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Social evolving graph trust simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    std::optional<unsigned long> seed;
    std::optional<unsigned> key_bits;
    std::string format = "csv";

    auto* run = app.add_subcommand("run", "Run a scenario and write outputs");
    run->add_option("--config", config_path, "scenario file (.scenario or JSON)")->required();
    run->add_option("--out", out, "output directory");
    run->add_option("--seed", seed, "override sim and crypto seeds");
    run->add_option("--key-bits", key_bits, "override Paillier key size");

    std::string qs, qd;
    double at = 0.0;
    auto* tq = app.add_subcommand("trust-query", "Indirect trust between two vehicles");
    tq->add_option("--config", config_path, "scenario file")->required();
    tq->add_option("s", qs, "source vehicle id")->required();
    tq->add_option("d", qd, "destination vehicle id")->required();
    tq->add_option("--at", at, "query time (must be a step time)");
    tq->add_option("--seed", seed, "override sim and crypto seeds");
    tq->add_option("--key-bits", key_bits, "override Paillier key size");

    std::string bench_kind;
    std::vector<unsigned> bench_bits{512, 1024, 2048};
    std::vector<std::size_t> bench_sizes{100, 1000, 10000};
    int bench_trials = 30;
    unsigned long bench_seed = 7;
    auto* bench = app.add_subcommand("bench", "Crypto or route-discovery benchmarks");
    bench->add_option("kind", bench_kind, "crypto|dijkstra")->required();
    bench->add_option("--key-bits", bench_bits, "key sizes for the crypto bench");
    bench->add_option("--sizes", bench_sizes, "graph sizes for the dijkstra bench");
    bench->add_option("--trials", bench_trials, "trials per operation");
    bench->add_option("--seed", bench_seed, "bench seed");
    bench->add_option("--out", out, "output file (default stdout)");
    bench->add_option("--format", format, "csv|json");

    std::string export_in;
    auto* exp = app.add_subcommand("export", "Snapshot JSON to plot-ready CSV");
    exp->add_option("--in", export_in, "snapshots.json from a run")->required();
    exp->add_option("--out", out, "output directory")->required();
    exp->add_option("--format", format, "csv|json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out, seed, key_bits);
        if (tq->parsed()) return cmd_trust_query(config_path, qs, qd, at, seed, key_bits);
        if (bench->parsed())
            return cmd_bench(bench_kind, bench_bits, bench_trials, bench_sizes, bench_seed, out,
                             format);
        if (exp->parsed()) return cmd_export(export_in, out, format);
    } catch (const segtrust::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const segtrust::UnreachableError& e) {
        std::cerr << e.what() << "\n";
        return kExitUnreachable;
    } catch (const segtrust::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "unexpected: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
