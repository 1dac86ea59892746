#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "debfab/error.hpp"
#include "debfab/fabric.hpp"
#include "debfab/sim.hpp"

namespace debfab {

/// Everything needed to run one (topology, routing, size, seed) cell.
struct CellConfig {
    Scheme scheme = Scheme::DbDbRouting;
    uint32_t n_tor = 8;
    uint32_t hosts_per_tor = 40;
    uint64_t seed = 1;
    uint32_t d = 2;                // De Bruijn radix
    uint32_t n_spine = 4;          // leaf-spine
    uint32_t uplinks_per_tor = 4;  // random flat
    double host_link_bps = 1e9;
    double uplink_bps = 1e10;
    size_t ecmp_max_paths = 64;
    DirectionTieBreak tie_break = DirectionTieBreak::PreferForward;
};

struct CellResult {
    CellConfig cfg;
    bool ok = false;
    std::string error;
    Metrics metrics;
    std::vector<RoutedConnection> routed;
    std::vector<double> channel_capacity;
    Allocation alloc;
};

// De Bruijn sizes must be exact powers of the radix.
inline uint32_t debruijn_length_for(uint32_t n_tor, uint32_t d) {
    uint32_t m = 0;
    uint64_t n = 1;
    while (n < n_tor) {
        n *= d;
        ++m;
    }
    if (n != n_tor)
        throw config_error(std::to_string(n_tor) + " switches is not a power of d=" +
                           std::to_string(d));
    return m == 0 ? 1 : m;
}

inline Fabric build_fabric_for(const CellConfig& cfg) {
    switch (cfg.scheme) {
        case Scheme::LsEcmp:
            return build_leaf_spine(cfg.n_tor, cfg.n_spine, cfg.hosts_per_tor, cfg.host_link_bps,
                                    cfg.uplink_bps);
        case Scheme::RandomEcmp:
            // The wiring gets its own stream so topology and traffic draws stay
            // independent per seed.
            return build_random_flat(cfg.n_tor, cfg.uplinks_per_tor, cfg.hosts_per_tor,
                                     stable_hash64(0x746f706f, cfg.seed), cfg.host_link_bps,
                                     cfg.uplink_bps);
        case Scheme::DbDbRouting:
        case Scheme::DbEcmp:
            return build_debruijn_fabric(cfg.d, debruijn_length_for(cfg.n_tor, cfg.d),
                                         cfg.hosts_per_tor, cfg.host_link_bps, cfg.uplink_bps);
    }
    throw config_error("unknown scheme");
}

inline CellResult run_cell(const CellConfig& cfg) {
    CellResult result;
    result.cfg = cfg;
    try {
        Fabric fabric = build_fabric_for(cfg);
        auto connections = generate_traffic(fabric, cfg.seed);
        result.routed = route_connections(fabric, cfg.scheme, connections, cfg.seed,
                                          cfg.ecmp_max_paths, cfg.tie_break);
        result.channel_capacity.reserve(fabric.channels.size());
        for (const Channel& ch : fabric.channels)
            result.channel_capacity.push_back(ch.capacity_bps);
        result.alloc = maxmin_allocate(result.routed, result.channel_capacity);
        result.metrics = summarize(result.alloc, fabric, result.routed, cfg.scheme, cfg.seed);
        result.ok = true;
    } catch (const std::exception& e) {
        result.ok = false;
        result.error = e.what();
    }
    return result;
}

struct SweepConfig {
    std::vector<uint32_t> sizes{8, 16, 32, 64};
    std::vector<Scheme> schemes{Scheme::LsEcmp, Scheme::RandomEcmp, Scheme::DbDbRouting,
                                Scheme::DbEcmp};
    std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
    uint32_t hosts_per_tor = 40;
    uint32_t d = 2;
    uint32_t n_spine = 4;
    uint32_t uplinks_per_tor = 4;
    double host_link_bps = 1e9;
    double uplink_bps = 1e10;
    size_t ecmp_max_paths = 64;
    DirectionTieBreak tie_break = DirectionTieBreak::PreferForward;
    unsigned jobs = 1;
};

struct SweepResult {
    std::vector<CellResult> cells;  // size-major, then scheme, then seed
};

/// Run the whole grid. Cells are independent; `jobs` worker threads may
/// execute them concurrently, and results land in grid order either way.
inline SweepResult run_sweep(const SweepConfig& cfg) {
    std::vector<CellConfig> cells;
    for (uint32_t size : cfg.sizes)
        for (Scheme scheme : cfg.schemes)
            for (uint64_t seed : cfg.seeds) {
                CellConfig c;
                c.scheme = scheme;
                c.n_tor = size;
                c.hosts_per_tor = cfg.hosts_per_tor;
                c.seed = seed;
                c.d = cfg.d;
                c.n_spine = cfg.n_spine;
                c.uplinks_per_tor = cfg.uplinks_per_tor;
                c.host_link_bps = cfg.host_link_bps;
                c.uplink_bps = cfg.uplink_bps;
                c.ecmp_max_paths = cfg.ecmp_max_paths;
                c.tie_break = cfg.tie_break;
                cells.push_back(c);
            }

    SweepResult result;
    result.cells.resize(cells.size());
    unsigned jobs = std::max(1u, cfg.jobs);
    if (jobs == 1) {
        for (size_t i = 0; i < cells.size(); ++i) result.cells[i] = run_cell(cells[i]);
        return result;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                result.cells[i] = run_cell(cells[i]);
            }
        });
    }
    for (auto& t : workers) t.join();
    return result;
}

inline void write_connection_csv(std::ostream& out, const SweepResult& sweep) {
    out << "topology,routing,n_tor,hosts_per_tor,seed,conn_id,src_host,dst_host,inter_rack,"
           "path_len,rate_bps\n";
    char rate[32];
    for (const CellResult& cell : sweep.cells) {
        if (!cell.ok) continue;
        for (size_t c = 0; c < cell.routed.size(); ++c) {
            const RoutedConnection& rc = cell.routed[c];
            std::snprintf(rate, sizeof(rate), "%.6f", cell.alloc.rate_bps[c]);
            out << topology_name(cell.cfg.scheme) << ',' << routing_name(cell.cfg.scheme) << ','
                << cell.cfg.n_tor << ',' << cell.cfg.hosts_per_tor << ',' << cell.cfg.seed << ','
                << rc.conn.id << ',' << rc.conn.src_host << ',' << rc.conn.dst_host << ','
                << (rc.inter_rack ? 1 : 0) << ',' << rc.inter_switch_hops << ',' << rate << '\n';
        }
    }
}

inline nlohmann::ordered_json metrics_json(const Metrics& mx) {
    return nlohmann::ordered_json{{"topology", mx.topology},
                                  {"routing", mx.routing},
                                  {"n_tor", mx.n_tor},
                                  {"hosts_per_tor", mx.hosts_per_tor},
                                  {"seed", mx.seed},
                                  {"n_connections", mx.n_connections},
                                  {"mean_rate_bps", mx.mean_rate_bps},
                                  {"min_rate_bps", mx.min_rate_bps},
                                  {"p10_rate_bps", mx.p10_rate_bps},
                                  {"p50_rate_bps", mx.p50_rate_bps},
                                  {"p90_rate_bps", mx.p90_rate_bps},
                                  {"max_rate_bps", mx.max_rate_bps},
                                  {"mean_path_len", mx.mean_path_len},
                                  {"max_path_len", mx.max_path_len},
                                  {"inter_rack_fraction", mx.inter_rack_fraction}};
}

inline nlohmann::ordered_json sweep_summary_json(const SweepResult& sweep) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const CellResult& cell : sweep.cells) {
        nlohmann::ordered_json entry{{"topology", topology_name(cell.cfg.scheme)},
                                     {"routing", routing_name(cell.cfg.scheme)},
                                     {"n_tor", cell.cfg.n_tor},
                                     {"hosts_per_tor", cell.cfg.hosts_per_tor},
                                     {"seed", cell.cfg.seed},
                                     {"status", cell.ok ? "ok" : "failed"}};
        if (cell.ok)
            entry["metrics"] = metrics_json(cell.metrics);
        else
            entry["error"] = cell.error;
        cells.push_back(std::move(entry));
    }
    return nlohmann::ordered_json{{"cells", std::move(cells)}};
}

}  // namespace debfab
