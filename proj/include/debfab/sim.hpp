#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "debfab/error.hpp"
#include "debfab/fabric.hpp"
#include "debfab/rng.hpp"
#include "debfab/routing.hpp"

namespace debfab {

enum class Scheme : uint8_t { LsEcmp, RandomEcmp, DbDbRouting, DbEcmp };

inline const char* topology_name(Scheme s) {
    switch (s) {
        case Scheme::LsEcmp: return "leafspine";
        case Scheme::RandomEcmp: return "random";
        case Scheme::DbDbRouting:
        case Scheme::DbEcmp: return "debruijn";
    }
    return "?";
}

inline const char* routing_name(Scheme s) {
    switch (s) {
        case Scheme::LsEcmp:
        case Scheme::RandomEcmp:
        case Scheme::DbEcmp: return "ecmp";
        case Scheme::DbDbRouting: return "dbrouting";
    }
    return "?";
}

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::LsEcmp: return "ls/ecmp";
        case Scheme::RandomEcmp: return "random/ecmp";
        case Scheme::DbDbRouting: return "db/dbrouting";
        case Scheme::DbEcmp: return "db/ecmp";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& text) {
    if (text == "ls/ecmp") return Scheme::LsEcmp;
    if (text == "random/ecmp") return Scheme::RandomEcmp;
    if (text == "db/dbrouting") return Scheme::DbDbRouting;
    if (text == "db/ecmp") return Scheme::DbEcmp;
    throw config_error("unknown scheme \"" + text + "\"");
}

/// One sender-receiver pair; hosts are global host indices.
struct Connection {
    uint32_t id = 0;
    uint32_t src_host = 0;
    uint32_t dst_host = 0;
};

struct RoutedConnection {
    Connection conn;
    std::vector<ChannelId> channels;  // directed walk incl. both host access links
    uint32_t inter_switch_hops = 0;
    bool inter_rack = false;
};

/// One connection per host: every host sends to a uniformly chosen other host.
inline std::vector<Connection> generate_traffic(const Fabric& fabric, uint64_t seed) {
    const uint32_t n = fabric.host_count();
    if (n < 2) throw config_error("traffic needs at least two hosts");
    std::mt19937_64 rng(splitmix64(seed));
    std::vector<Connection> conns;
    conns.reserve(n);
    for (uint32_t src = 0; src < n; ++src) {
        uint32_t other = static_cast<uint32_t>(bounded(rng, n - 1));
        uint32_t dst = other < src ? other : other + 1;
        conns.push_back({src, src, dst});
    }
    return conns;
}

namespace detail {

inline void check_scheme_fabric(Scheme scheme, const Fabric& fabric) {
    TopologyKind want = scheme == Scheme::LsEcmp      ? TopologyKind::LeafSpine
                        : scheme == Scheme::RandomEcmp ? TopologyKind::RandomFlat
                                                       : TopologyKind::DeBruijn;
    if (fabric.kind != want)
        throw config_error(std::string("scheme ") + to_string(scheme) +
                           " does not run on a " + to_string(fabric.kind) + " fabric");
}

inline ChannelId switch_channel(const Fabric& fabric, DeviceId a, DeviceId b) {
    auto ch = fabric.channel_between_switches(a, b);
    if (!ch) throw no_path_error("switches " + fabric.device(a).name + " and " +
                                 fabric.device(b).name + " are not adjacent");
    return *ch;
}

}  // namespace detail

/// Attach routes to connections: source host access link, the scheme's
/// switch-level route mapped onto directed channels, destination host access
/// link. ECMP schemes hash each connection onto one of the equal-cost
/// shortest paths; the De Bruijn scheme takes the shorter-graph shift route.
inline std::vector<RoutedConnection> route_connections(
    const Fabric& fabric, Scheme scheme, const std::vector<Connection>& connections,
    uint64_t seed, size_t ecmp_max_paths = 64,
    DirectionTieBreak tie_break = DirectionTieBreak::PreferForward) {
    detail::check_scheme_fabric(scheme, fabric);

    const bool use_ecmp = scheme != Scheme::DbDbRouting;
    InterSwitchGraph graph;
    if (use_ecmp) graph = InterSwitchGraph::from_fabric(fabric);
    // Shortest-path sets per (src tor, dst tor), shared by all connections.
    std::map<std::pair<uint32_t, uint32_t>, std::vector<std::vector<uint32_t>>> path_cache;

    std::vector<RoutedConnection> routed;
    routed.reserve(connections.size());
    for (const Connection& conn : connections) {
        const HostRecord& src_rec = fabric.host_by_global(conn.src_host);
        const HostRecord& dst_rec = fabric.host_by_global(conn.dst_host);
        uint32_t src_tor = conn.src_host / fabric.hosts_per_tor;
        uint32_t dst_tor = conn.dst_host / fabric.hosts_per_tor;

        RoutedConnection rc;
        rc.conn = conn;
        rc.inter_rack = src_tor != dst_tor;
        rc.channels.push_back(src_rec.up_channel);

        if (src_tor != dst_tor) {
            uint64_t key = (static_cast<uint64_t>(conn.src_host) << 32) | conn.dst_host;
            if (scheme == Scheme::DbDbRouting) {
                Route route = best_route(fabric.label_of_tor(src_tor),
                                         fabric.label_of_tor(dst_tor), tie_break, key, seed);
                for (size_t i = 0; i + 1 < route.labels.size(); ++i) {
                    DeviceId a = fabric.tors[fabric.tor_of_label(route.labels[i])];
                    DeviceId b = fabric.tors[fabric.tor_of_label(route.labels[i + 1])];
                    rc.channels.push_back(detail::switch_channel(fabric, a, b));
                }
                rc.inter_switch_hops = route.hop_count();
            } else {
                uint32_t s = graph.node_of.at(fabric.tors[src_tor]);
                uint32_t t = graph.node_of.at(fabric.tors[dst_tor]);
                auto [it, fresh] = path_cache.try_emplace({s, t});
                if (fresh) it->second = ecmp_paths(graph, s, t, ecmp_max_paths);
                const auto& path = ecmp_select(it->second, key, seed);
                for (size_t i = 0; i + 1 < path.size(); ++i)
                    rc.channels.push_back(detail::switch_channel(
                        fabric, graph.node_device[path[i]], graph.node_device[path[i + 1]]));
                rc.inter_switch_hops = static_cast<uint32_t>(path.size() - 1);
            }
        }

        rc.channels.push_back(dst_rec.down_channel);
        routed.push_back(std::move(rc));
    }
    return routed;
}

struct Allocation {
    std::vector<double> rate_bps;  // by connection position in the routed list
};

/// Progressive-filling max-min fair share over directed channels: all
/// unfrozen connections grow at one common rate; when a channel fills, every
/// connection crossing it freezes; repeat until everything is frozen.
inline Allocation maxmin_allocate(const std::vector<RoutedConnection>& routed,
                                  const std::vector<double>& channel_capacity) {
    for (const RoutedConnection& rc : routed) {
        if (rc.channels.empty())
            throw config_error("connection " + std::to_string(rc.conn.id) +
                               " has an empty channel list");
        for (ChannelId ch : rc.channels) {
            double cap = channel_capacity.at(ch);
            if (!(cap > 0) || !std::isfinite(cap))
                throw config_error("channel " + std::to_string(ch) +
                                   " has a non-positive or non-finite capacity");
        }
    }

    const size_t n = routed.size();
    Allocation alloc;
    alloc.rate_bps.assign(n, 0.0);

    // Only channels that actually carry connections matter.
    std::vector<ChannelId> used;
    for (const RoutedConnection& rc : routed)
        used.insert(used.end(), rc.channels.begin(), rc.channels.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());

    std::vector<double> residual(used.size());
    std::vector<uint32_t> active(used.size(), 0);
    std::unordered_map<ChannelId, uint32_t> slot;
    slot.reserve(used.size());
    for (size_t i = 0; i < used.size(); ++i) {
        slot[used[i]] = static_cast<uint32_t>(i);
        residual[i] = channel_capacity.at(used[i]);
    }
    for (const RoutedConnection& rc : routed)
        for (ChannelId ch : rc.channels) ++active[slot[ch]];

    std::vector<char> frozen(n, 0);
    size_t remaining = n;
    while (remaining > 0) {
        double step = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < used.size(); ++i)
            if (active[i] > 0) step = std::min(step, residual[i] / active[i]);

        for (size_t c = 0; c < n; ++c)
            if (!frozen[c]) alloc.rate_bps[c] += step;
        for (size_t i = 0; i < used.size(); ++i)
            if (active[i] > 0) residual[i] = std::max(0.0, residual[i] - step * active[i]);

        // Freeze everything crossing a channel that just filled up.
        for (size_t c = 0; c < n; ++c) {
            if (frozen[c]) continue;
            bool saturated = false;
            for (ChannelId ch : routed[c].channels) {
                uint32_t i = slot[ch];
                if (residual[i] <= 1e-12 * channel_capacity.at(used[i])) {
                    saturated = true;
                    break;
                }
            }
            if (saturated) {
                frozen[c] = 1;
                --remaining;
                for (ChannelId ch : routed[c].channels) --active[slot[ch]];
            }
        }
    }
    return alloc;
}

inline Allocation maxmin_allocate(const std::vector<RoutedConnection>& routed,
                                  const Fabric& fabric) {
    std::vector<double> caps;
    caps.reserve(fabric.channels.size());
    for (const Channel& ch : fabric.channels) caps.push_back(ch.capacity_bps);
    return maxmin_allocate(routed, caps);
}

// Allocation checkers shared by tests and the acceptance suite.

inline bool allocation_feasible(const std::vector<RoutedConnection>& routed,
                                const std::vector<double>& channel_capacity,
                                const Allocation& alloc, double rel_tol = 1e-6) {
    std::unordered_map<ChannelId, double> load;
    for (size_t c = 0; c < routed.size(); ++c)
        for (ChannelId ch : routed[c].channels) load[ch] += alloc.rate_bps[c];
    for (auto [ch, sum] : load)
        if (sum > channel_capacity.at(ch) * (1 + rel_tol)) return false;
    return true;
}

// Max-min bottleneck condition: every connection crosses a saturated channel
// on which no other connection gets a strictly larger rate.
inline bool allocation_bottlenecked(const std::vector<RoutedConnection>& routed,
                                    const std::vector<double>& channel_capacity,
                                    const Allocation& alloc, double rel_tol = 1e-6) {
    std::unordered_map<ChannelId, double> load;
    std::unordered_map<ChannelId, double> max_rate;
    for (size_t c = 0; c < routed.size(); ++c) {
        for (ChannelId ch : routed[c].channels) {
            load[ch] += alloc.rate_bps[c];
            auto [it, fresh] = max_rate.try_emplace(ch, 0.0);
            it->second = std::max(it->second, alloc.rate_bps[c]);
        }
    }
    for (size_t c = 0; c < routed.size(); ++c) {
        bool ok = false;
        for (ChannelId ch : routed[c].channels) {
            double cap = channel_capacity.at(ch);
            bool saturated = load[ch] >= cap * (1 - rel_tol);
            bool maximal = alloc.rate_bps[c] >= max_rate[ch] - cap * rel_tol;
            if (saturated && maximal) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

/// Run-level summary of one allocation.
struct Metrics {
    std::string topology;
    std::string routing;
    uint32_t n_tor = 0;
    uint32_t hosts_per_tor = 0;
    uint64_t seed = 0;
    uint32_t n_connections = 0;
    double mean_rate_bps = 0;
    double min_rate_bps = 0;
    double p10_rate_bps = 0;
    double p50_rate_bps = 0;
    double p90_rate_bps = 0;
    double max_rate_bps = 0;
    double mean_path_len = 0;
    uint32_t max_path_len = 0;
    double inter_rack_fraction = 0;
};

namespace detail {
inline double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0;
    size_t rank = static_cast<size_t>(std::ceil(q * sorted.size()));
    rank = std::clamp<size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}
}  // namespace detail

inline Metrics summarize(const Allocation& alloc, const Fabric& fabric,
                         const std::vector<RoutedConnection>& routed, Scheme scheme,
                         uint64_t seed) {
    Metrics mx;
    mx.topology = to_string(fabric.kind);
    mx.routing = routing_name(scheme);
    mx.n_tor = fabric.n_tor;
    mx.hosts_per_tor = fabric.hosts_per_tor;
    mx.seed = seed;
    mx.n_connections = static_cast<uint32_t>(routed.size());
    if (routed.empty()) return mx;

    double rate_sum = 0, len_sum = 0;
    uint32_t inter_rack = 0;
    for (size_t c = 0; c < routed.size(); ++c) {
        rate_sum += alloc.rate_bps[c];
        len_sum += routed[c].inter_switch_hops;
        mx.max_path_len = std::max(mx.max_path_len, routed[c].inter_switch_hops);
        if (routed[c].inter_rack) ++inter_rack;
    }
    std::vector<double> sorted = alloc.rate_bps;
    std::sort(sorted.begin(), sorted.end());
    mx.mean_rate_bps = rate_sum / routed.size();
    mx.min_rate_bps = sorted.front();
    mx.p10_rate_bps = detail::percentile(sorted, 0.10);
    mx.p50_rate_bps = detail::percentile(sorted, 0.50);
    mx.p90_rate_bps = detail::percentile(sorted, 0.90);
    mx.max_rate_bps = sorted.back();
    mx.mean_path_len = len_sum / routed.size();
    mx.inter_rack_fraction = static_cast<double>(inter_rack) / routed.size();
    return mx;
}

}  // namespace debfab
