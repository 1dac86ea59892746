#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <unordered_map>
#include <vector>

#include "debfab/error.hpp"
#include "debfab/fabric.hpp"
#include "debfab/label.hpp"
#include "debfab/rng.hpp"

namespace debfab {

/// A switch-level route: the visited labels from source to destination and
/// the shift graph that produced it.
struct Route {
    std::vector<Label> labels;
    GraphDirection direction = GraphDirection::Forward;

    uint32_t hop_count() const { return static_cast<uint32_t>(labels.size()) - 1; }
};

namespace detail {

// Digit to shift in next when standing at `cur` with destination `dst`.
inline Digit greedy_next_digit(const Label& cur, const Label& dst, GraphDirection dir) {
    const uint32_t m = cur.length();
    if (dir == GraphDirection::Forward) {
        uint32_t k = longest_overlap(cur, dst);
        return dst.digit(k + 1);
    }
    uint32_t k = longest_overlap(dst, cur);
    return dst.digit(m - k);
}

}  // namespace detail

/// Shift route: at every switch, extend the longest fragment of the
/// destination label already held by one more digit. The overlap is
/// recomputed at each hop, and shrinks the remaining distance by one per hop.
inline Route greedy_route(const Label& src, const Label& dst, GraphDirection dir) {
    detail::check_compatible(src, dst);
    Route route;
    route.direction = dir;
    route.labels.push_back(src);
    Label cur = src;
    while (cur != dst) {
        Digit x = detail::greedy_next_digit(cur, dst, dir);
        cur = dir == GraphDirection::Forward ? forward_neighbor(cur, x)
                                             : reverse_neighbor(cur, x);
        route.labels.push_back(cur);
        if (route.labels.size() > src.length() + 1)
            throw trace_error("greedy route exceeded the label length bound");
    }
    return route;
}

enum class DirectionTieBreak : uint8_t { PreferForward, HashSplit };

/// The shorter of the two single-graph routes. Ties go to the forward graph,
/// or alternate by connection hash when HashSplit is selected.
inline Route best_route(const Label& src, const Label& dst,
                        DirectionTieBreak tie_break = DirectionTieBreak::PreferForward,
                        uint64_t connection_key = 0, uint64_t seed = 0) {
    uint32_t fwd = debruijn_distance(src, dst, GraphDirection::Forward);
    uint32_t rev = debruijn_distance(src, dst, GraphDirection::Reverse);
    GraphDirection dir;
    if (fwd < rev) {
        dir = GraphDirection::Forward;
    } else if (rev < fwd) {
        dir = GraphDirection::Reverse;
    } else if (tie_break == DirectionTieBreak::PreferForward) {
        dir = GraphDirection::Forward;
    } else {
        dir = (stable_hash64(connection_key, seed) & 1) == 0 ? GraphDirection::Forward
                                                             : GraphDirection::Reverse;
    }
    return greedy_route(src, dst, dir);
}

/// Undirected switch-to-switch view of a fabric, for path-set routing that
/// ignores any shift-graph structure. Nodes are indexed 0..n-1 in device
/// order; neighbor lists are sorted.
struct InterSwitchGraph {
    std::vector<DeviceId> node_device;               // node index -> device id
    std::unordered_map<DeviceId, uint32_t> node_of;  // device id -> node index
    std::vector<std::vector<uint32_t>> adjacency;

    static InterSwitchGraph from_fabric(const Fabric& fabric) {
        InterSwitchGraph g;
        for (const Device& dev : fabric.devices) {
            if (dev.kind == DeviceKind::Tor || dev.kind == DeviceKind::Spine) {
                g.node_of[dev.id] = static_cast<uint32_t>(g.node_device.size());
                g.node_device.push_back(dev.id);
            }
        }
        g.adjacency.resize(g.node_device.size());
        for (const Channel& ch : fabric.channels) {
            if (ch.id > ch.reverse) continue;  // one direction per cable
            if (!fabric.is_switch(ch.from) || !fabric.is_switch(ch.to)) continue;
            uint32_t a = g.node_of.at(ch.from), b = g.node_of.at(ch.to);
            g.adjacency[a].push_back(b);
            g.adjacency[b].push_back(a);
        }
        for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
        return g;
    }
};

/// All shortest paths between two nodes, lexicographically smallest first,
/// truncated to `max_paths`. Node sequences include both endpoints.
inline std::vector<std::vector<uint32_t>> ecmp_paths(const InterSwitchGraph& graph, uint32_t src,
                                                     uint32_t dst, size_t max_paths = 64) {
    constexpr uint32_t kInf = std::numeric_limits<uint32_t>::max();
    std::vector<uint32_t> dist(graph.adjacency.size(), kInf);
    std::deque<uint32_t> queue;
    dist[src] = 0;
    queue.push_back(src);
    while (!queue.empty()) {
        uint32_t u = queue.front();
        queue.pop_front();
        for (uint32_t v : graph.adjacency[u])
            if (dist[v] == kInf) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
    }
    if (dist[dst] == kInf)
        throw no_path_error("switches are not connected");

    std::vector<std::vector<uint32_t>> paths;
    std::vector<uint32_t> current{src};
    std::function<bool(uint32_t)> walk = [&](uint32_t u) {
        if (u == dst) {
            paths.push_back(current);
            return paths.size() < max_paths;
        }
        for (uint32_t v : graph.adjacency[u]) {  // ascending: lexicographic enumeration
            if (dist[v] != dist[u] + 1 || dist[v] > dist[dst]) continue;
            current.push_back(v);
            bool keep_going = walk(v);
            current.pop_back();
            if (!keep_going) return false;
        }
        return true;
    };
    walk(src);
    return paths;
}

/// Stable per-connection choice among equal-cost paths.
inline const std::vector<uint32_t>& ecmp_select(const std::vector<std::vector<uint32_t>>& paths,
                                                uint64_t connection_key, uint64_t seed) {
    if (paths.empty()) throw no_path_error("empty path set");
    return paths[stable_hash64(connection_key, seed) % paths.size()];
}

}  // namespace debfab
