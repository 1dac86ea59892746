#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "debfab/error.hpp"
#include "debfab/label.hpp"
#include "debfab/rng.hpp"

namespace debfab {

using DeviceId = uint32_t;
using PortId = uint32_t;
using ChannelId = uint32_t;

enum class DeviceKind : uint8_t { Tor, Spine, Host, Vswitch, Vm };
enum class TopologyKind : uint8_t { DeBruijn, LeafSpine, RandomFlat };

inline const char* to_string(DeviceKind k) {
    switch (k) {
        case DeviceKind::Tor: return "tor";
        case DeviceKind::Spine: return "spine";
        case DeviceKind::Host: return "host";
        case DeviceKind::Vswitch: return "vswitch";
        case DeviceKind::Vm: return "vm";
    }
    return "?";
}

inline const char* to_string(TopologyKind k) {
    switch (k) {
        case TopologyKind::DeBruijn: return "debruijn";
        case TopologyKind::LeafSpine: return "leafspine";
        case TopologyKind::RandomFlat: return "random";
    }
    return "?";
}

struct Device {
    DeviceId id = 0;
    DeviceKind kind = DeviceKind::Tor;
    std::string name;
    int32_t tor_index = -1;   // owning rack; the switch's own index for Tor
    int32_t host_index = -1;  // position within the rack
    int32_t vm_index = -1;    // position within the host
    uint64_t mac = 0;         // VMs only
    uint32_t ip = 0;          // VMs only
};

// One direction of a full-duplex cable. `reverse` names the paired channel.
struct Channel {
    ChannelId id = 0;
    DeviceId from = 0;
    PortId from_port = 0;
    DeviceId to = 0;
    PortId to_port = 0;
    double capacity_bps = 0;
    ChannelId reverse = 0;
};

/// Per-ToR port directory. For De Bruijn fabrics two (direction, digit) keys
/// may alias the same physical port when both shift edges lead to the same
/// neighbor; a digit whose edge is a self-loop has no port at all.
struct TorPorts {
    std::vector<PortId> host_ports;  // by host index within the rack
    std::map<std::pair<GraphDirection, Digit>, PortId> debruijn_uplinks;
    std::vector<PortId> uplink_ports;    // leaf-spine: by spine index; random: by link index
    std::vector<DeviceId> uplink_peers;  // parallel to uplink_ports

    std::optional<PortId> uplink(GraphDirection dir, Digit digit) const {
        auto it = debruijn_uplinks.find({dir, digit});
        if (it == debruijn_uplinks.end()) return std::nullopt;
        return it->second;
    }
};

struct HostRecord {
    DeviceId host = 0;
    DeviceId vswitch = 0;
    std::vector<DeviceId> vms;
    ChannelId up_channel = 0;    // vswitch -> tor (the host NIC, egress)
    ChannelId down_channel = 0;  // tor -> vswitch
    PortId vswitch_uplink_port = 0;
    std::vector<PortId> vswitch_vm_ports;
};

class Fabric {
public:
    TopologyKind kind = TopologyKind::DeBruijn;
    uint32_t d = 0;  // De Bruijn radix
    uint32_t m = 0;  // De Bruijn label length
    uint32_t n_tor = 0;
    uint32_t n_spine = 0;
    uint32_t hosts_per_tor = 0;
    uint32_t vms_per_host = 1;
    uint32_t uplinks_per_tor = 0;  // random fabrics
    uint64_t seed = 0;             // random fabrics
    double host_link_bps = 1e9;
    double uplink_bps = 1e10;

    std::vector<Device> devices;
    std::vector<Channel> channels;
    std::vector<DeviceId> tors;    // tor index -> device
    std::vector<DeviceId> spines;  // spine index -> device
    std::vector<Label> tor_labels; // De Bruijn: tor index == label value
    std::vector<TorPorts> tor_ports;
    std::vector<std::vector<HostRecord>> racks;  // [tor][host]

    const Device& device(DeviceId id) const { return devices.at(id); }
    uint32_t tor_count() const { return n_tor; }
    uint32_t host_count() const { return n_tor * hosts_per_tor; }

    const Label& label_of_tor(uint32_t tor_index) const { return tor_labels.at(tor_index); }
    uint32_t tor_of_label(const Label& label) const {
        if (kind != TopologyKind::DeBruijn)
            throw config_error("fabric has no De Bruijn labels");
        if (label.radix() != d || label.length() != m)
            throw label_error("label " + label.to_string() + " does not belong to this fabric");
        return static_cast<uint32_t>(label.value());
    }

    const HostRecord& host_record(uint32_t tor_index, uint32_t host_index) const {
        return racks.at(tor_index).at(host_index);
    }
    uint32_t global_host_index(uint32_t tor_index, uint32_t host_index) const {
        return tor_index * hosts_per_tor + host_index;
    }
    const HostRecord& host_by_global(uint32_t global_index) const {
        return host_record(global_index / hosts_per_tor, global_index % hosts_per_tor);
    }
    DeviceId vm_at(uint32_t tor_index, uint32_t host_index, uint32_t vm_index = 0) const {
        return host_record(tor_index, host_index).vms.at(vm_index);
    }

    ChannelId channel_from(DeviceId dev, PortId port) const {
        auto it = port_channel_.find(port_key(dev, port));
        if (it == port_channel_.end())
            throw trace_error("no channel at device " + devices.at(dev).name + " port " +
                              std::to_string(port));
        return it->second;
    }

    // The single inter-switch channel a -> b, if the switches are adjacent.
    std::optional<ChannelId> channel_between_switches(DeviceId a, DeviceId b) const {
        auto it = switch_pair_channel_.find(pair_key(a, b));
        if (it == switch_pair_channel_.end()) return std::nullopt;
        return it->second;
    }

    bool is_switch(DeviceId id) const {
        DeviceKind k = devices[id].kind;
        return k == DeviceKind::Tor || k == DeviceKind::Spine;
    }

    // --- assembly helpers (used by the builders below) ---

    DeviceId add_device(DeviceKind kind_, std::string name_, int32_t tor_i = -1,
                        int32_t host_i = -1, int32_t vm_i = -1) {
        Device dev;
        dev.id = static_cast<DeviceId>(devices.size());
        dev.kind = kind_;
        dev.name = std::move(name_);
        dev.tor_index = tor_i;
        dev.host_index = host_i;
        dev.vm_index = vm_i;
        devices.push_back(std::move(dev));
        next_port_.push_back(0);
        return devices.back().id;
    }

    PortId allocate_port(DeviceId dev) { return next_port_.at(dev)++; }

    // Creates both directions of one cable and indexes them.
    std::pair<ChannelId, ChannelId> add_link(DeviceId a, PortId pa, DeviceId b, PortId pb,
                                             double capacity_bps) {
        ChannelId ab = static_cast<ChannelId>(channels.size());
        ChannelId ba = ab + 1;
        channels.push_back({ab, a, pa, b, pb, capacity_bps, ba});
        channels.push_back({ba, b, pb, a, pa, capacity_bps, ab});
        port_channel_[port_key(a, pa)] = ab;
        port_channel_[port_key(b, pb)] = ba;
        if (is_switch(a) && is_switch(b)) {
            switch_pair_channel_[pair_key(a, b)] = ab;
            switch_pair_channel_[pair_key(b, a)] = ba;
        }
        return {ab, ba};
    }

private:
    static uint64_t port_key(DeviceId dev, PortId port) {
        return (static_cast<uint64_t>(dev) << 20) | port;
    }
    static uint64_t pair_key(DeviceId a, DeviceId b) {
        return (static_cast<uint64_t>(a) << 32) | b;
    }

    std::vector<PortId> next_port_;
    std::unordered_map<uint64_t, ChannelId> port_channel_;
    std::unordered_map<uint64_t, ChannelId> switch_pair_channel_;
};

namespace detail {

inline uint32_t bits_per_digit(uint32_t d) {
    uint32_t b = 0;
    uint32_t max_digit = d - 1;
    while (max_digit > 0) {
        ++b;
        max_digit >>= 1;
    }
    return b == 0 ? 1 : b;
}

inline void add_rack(Fabric& f, uint32_t tor_index) {
    DeviceId tor_dev = f.tors[tor_index];
    auto& rack = f.racks[tor_index];
    for (uint32_t h = 0; h < f.hosts_per_tor; ++h) {
        std::string suffix = std::to_string(tor_index) + "-" + std::to_string(h);
        HostRecord rec;
        rec.host = f.add_device(DeviceKind::Host, "host-" + suffix, tor_index, h);
        rec.vswitch = f.add_device(DeviceKind::Vswitch, "vsw-" + suffix, tor_index, h);

        PortId tor_port = f.allocate_port(tor_dev);
        rec.vswitch_uplink_port = f.allocate_port(rec.vswitch);
        auto [up, down] =
            f.add_link(rec.vswitch, rec.vswitch_uplink_port, tor_dev, tor_port, f.host_link_bps);
        rec.up_channel = up;
        rec.down_channel = down;
        f.tor_ports[tor_index].host_ports.push_back(tor_port);

        for (uint32_t v = 0; v < f.vms_per_host; ++v) {
            DeviceId vm = f.add_device(DeviceKind::Vm, "vm-" + suffix + "-" + std::to_string(v),
                                       tor_index, h, v);
            f.devices[vm].mac =
                (0x02ull << 40) | (static_cast<uint64_t>(tor_index) << 24) | (h << 8) | v;
            f.devices[vm].ip = 0x0A000000u | (tor_index << 8) | (h << 2) | v;
            PortId vm_port = f.allocate_port(vm);
            PortId vsw_port = f.allocate_port(rec.vswitch);
            f.add_link(vm, vm_port, rec.vswitch, vsw_port, f.host_link_bps);
            rec.vms.push_back(vm);
            rec.vswitch_vm_ports.push_back(vsw_port);
        }
        rack.push_back(std::move(rec));
    }
}

inline void add_all_racks(Fabric& f) {
    if (f.hosts_per_tor == 0) return;
    if (f.n_tor > 65536 || f.hosts_per_tor > 64 || f.vms_per_host > 4)
        throw config_error("address plan supports at most 65536 racks, 64 hosts per rack, "
                           "4 VMs per host");
    f.racks.resize(f.n_tor);
    for (uint32_t t = 0; t < f.n_tor; ++t) add_rack(f, t);
}

}  // namespace detail

/// Flat fabric of d^m ToR switches wired as the union of the forward and
/// reverse shift graphs. One cable per unordered neighbor pair; self-loop
/// edges get no cable.
inline Fabric build_debruijn_fabric(uint32_t d, uint32_t m, uint32_t hosts_per_tor,
                                    double host_link_bps = 1e9, double uplink_bps = 1e10,
                                    uint32_t vms_per_host = 1) {
    if (d < 2 || d > 256) throw config_error("radix d must be in [2, 256]");
    if (m < 1) throw config_error("label length m must be >= 1");
    uint32_t b = detail::bits_per_digit(d);
    if (m * b + 1 > 32)
        throw config_error("locator encoding needs " + std::to_string(m * b + 1) +
                           " bits, more than an IPv4 address holds");
    uint64_t n = 1;
    for (uint32_t i = 0; i < m; ++i) {
        n *= d;
        if (n > (1u << 31)) throw config_error("d^m too large");
    }

    Fabric f;
    f.kind = TopologyKind::DeBruijn;
    f.d = d;
    f.m = m;
    f.n_tor = static_cast<uint32_t>(n);
    f.hosts_per_tor = hosts_per_tor;
    f.vms_per_host = vms_per_host;
    f.host_link_bps = host_link_bps;
    f.uplink_bps = uplink_bps;

    f.tor_labels.reserve(f.n_tor);
    for (uint32_t t = 0; t < f.n_tor; ++t) {
        Label label = Label::from_value(t, d, m);
        f.tors.push_back(f.add_device(DeviceKind::Tor, "tor-" + label.to_string(), t));
        f.tor_labels.push_back(std::move(label));
    }
    f.tor_ports.resize(f.n_tor);
    detail::add_all_racks(f);

    // Discover each ToR's distinct neighbors; alias every (direction, digit)
    // pair that reaches the same neighbor to one port.
    std::vector<std::map<uint32_t, PortId>> neighbor_port(f.n_tor);
    for (uint32_t t = 0; t < f.n_tor; ++t) {
        const Label& lt = f.tor_labels[t];
        auto visit = [&](GraphDirection dir, Digit x, const Label& nb) {
            uint32_t v = static_cast<uint32_t>(nb.value());
            if (v == t) return;  // self-loop: no cable, no port
            auto [it, fresh] = neighbor_port[t].try_emplace(v, 0);
            if (fresh) it->second = f.allocate_port(f.tors[t]);
            f.tor_ports[t].debruijn_uplinks[{dir, x}] = it->second;
        };
        for (Digit x = 0; x < d; ++x) visit(GraphDirection::Forward, x, forward_neighbor(lt, x));
        for (Digit x = 0; x < d; ++x) visit(GraphDirection::Reverse, x, reverse_neighbor(lt, x));
    }
    for (uint32_t t = 0; t < f.n_tor; ++t) {
        for (auto [v, port] : neighbor_port[t]) {
            if (v < t) continue;  // one cable per unordered pair
            f.add_link(f.tors[t], port, f.tors[v], neighbor_port[v].at(t), uplink_bps);
        }
    }
    return f;
}

/// Two-level fabric: every leaf connects to every spine.
inline Fabric build_leaf_spine(uint32_t n_leaf, uint32_t n_spine, uint32_t hosts_per_tor,
                               double host_link_bps = 1e9, double uplink_bps = 1e10,
                               uint32_t vms_per_host = 1) {
    if (n_leaf < 1 || n_spine < 1) throw config_error("need at least one leaf and one spine");

    Fabric f;
    f.kind = TopologyKind::LeafSpine;
    f.n_tor = n_leaf;
    f.n_spine = n_spine;
    f.hosts_per_tor = hosts_per_tor;
    f.vms_per_host = vms_per_host;
    f.host_link_bps = host_link_bps;
    f.uplink_bps = uplink_bps;

    for (uint32_t t = 0; t < n_leaf; ++t)
        f.tors.push_back(f.add_device(DeviceKind::Tor, "leaf-" + std::to_string(t), t));
    for (uint32_t s = 0; s < n_spine; ++s)
        f.spines.push_back(f.add_device(DeviceKind::Spine, "spine-" + std::to_string(s)));
    f.tor_ports.resize(n_leaf);
    detail::add_all_racks(f);

    for (uint32_t t = 0; t < n_leaf; ++t) {
        for (uint32_t s = 0; s < n_spine; ++s) {
            PortId leaf_port = f.allocate_port(f.tors[t]);
            PortId spine_port = f.allocate_port(f.spines[s]);
            f.add_link(f.tors[t], leaf_port, f.spines[s], spine_port, uplink_bps);
            f.tor_ports[t].uplink_ports.push_back(leaf_port);
            f.tor_ports[t].uplink_peers.push_back(f.spines[s]);
        }
    }
    return f;
}

namespace detail {

// One configuration-model attempt: pair up degree stubs, reject self-loops
// and parallel edges, then require a connected result.
inline std::optional<std::vector<std::pair<uint32_t, uint32_t>>> try_regular_graph(
    uint32_t n, uint32_t degree, uint64_t sub_seed) {
    std::mt19937_64 rng(sub_seed);
    std::vector<uint32_t> stubs;
    stubs.reserve(static_cast<size_t>(n) * degree);
    for (uint32_t v = 0; v < n; ++v)
        for (uint32_t k = 0; k < degree; ++k) stubs.push_back(v);
    deterministic_shuffle(stubs, rng);

    std::set<std::pair<uint32_t, uint32_t>> edges;
    for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
        uint32_t u = stubs[i], v = stubs[i + 1];
        if (u == v) return std::nullopt;
        auto e = std::minmax(u, v);
        if (!edges.insert({e.first, e.second}).second) return std::nullopt;
    }

    std::vector<std::vector<uint32_t>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<char> seen(n, 0);
    std::vector<uint32_t> stack{0};
    seen[0] = 1;
    uint32_t count = 1;
    while (!stack.empty()) {
        uint32_t u = stack.back();
        stack.pop_back();
        for (uint32_t v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
    }
    if (count != n) return std::nullopt;
    return std::vector<std::pair<uint32_t, uint32_t>>(edges.begin(), edges.end());
}

}  // namespace detail

/// Flat fabric whose inter-ToR wiring is a uniform random simple connected
/// graph with exactly `uplinks_per_tor` cables per switch. Deterministic for
/// a given seed; each retry derives its own sub-seed.
inline Fabric build_random_flat(uint32_t n_tor, uint32_t uplinks_per_tor, uint32_t hosts_per_tor,
                                uint64_t seed, double host_link_bps = 1e9,
                                double uplink_bps = 1e10, uint32_t vms_per_host = 1,
                                uint32_t max_attempts = 2000) {
    if (n_tor < 2) throw config_error("need at least two switches");
    if (uplinks_per_tor < 1) throw config_error("need at least one uplink per switch");
    if ((static_cast<uint64_t>(n_tor) * uplinks_per_tor) % 2 != 0)
        throw config_error("n_tor * uplinks_per_tor must be even");

    std::optional<std::vector<std::pair<uint32_t, uint32_t>>> edges;
    for (uint32_t attempt = 0; attempt < max_attempts && !edges; ++attempt)
        edges = detail::try_regular_graph(n_tor, uplinks_per_tor, stable_hash64(attempt, seed));
    if (!edges)
        throw generation_error("no simple connected " + std::to_string(uplinks_per_tor) +
                               "-regular graph on " + std::to_string(n_tor) +
                               " switches found for seed " + std::to_string(seed) + " after " +
                               std::to_string(max_attempts) + " attempts");

    Fabric f;
    f.kind = TopologyKind::RandomFlat;
    f.n_tor = n_tor;
    f.hosts_per_tor = hosts_per_tor;
    f.vms_per_host = vms_per_host;
    f.uplinks_per_tor = uplinks_per_tor;
    f.seed = seed;
    f.host_link_bps = host_link_bps;
    f.uplink_bps = uplink_bps;

    for (uint32_t t = 0; t < n_tor; ++t)
        f.tors.push_back(f.add_device(DeviceKind::Tor, "tor-" + std::to_string(t), t));
    f.tor_ports.resize(n_tor);
    detail::add_all_racks(f);

    for (auto [u, v] : *edges) {  // already in canonical (u < v) sorted order
        PortId pu = f.allocate_port(f.tors[u]);
        PortId pv = f.allocate_port(f.tors[v]);
        f.add_link(f.tors[u], pu, f.tors[v], pv, uplink_bps);
        f.tor_ports[u].uplink_ports.push_back(pu);
        f.tor_ports[u].uplink_peers.push_back(f.tors[v]);
        f.tor_ports[v].uplink_ports.push_back(pv);
        f.tor_ports[v].uplink_peers.push_back(f.tors[u]);
    }
    return f;
}

}  // namespace debfab
