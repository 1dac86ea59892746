#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "debfab/error.hpp"
#include "debfab/fabric.hpp"
#include "debfab/flow_compiler.hpp"
#include "debfab/flow_table.hpp"

namespace debfab {

/// Per-device flow tables for one emulation run. ToR tables are compiled up
/// front and stay fixed; vSwitch tables start empty and grow as the
/// controller reacts to misses.
struct TableStore {
    std::unordered_map<DeviceId, FlowTable> tables;

    FlowTable& at(DeviceId dev) { return tables[dev]; }
    const FlowTable* find(DeviceId dev) const {
        auto it = tables.find(dev);
        return it == tables.end() ? nullptr : &it->second;
    }
    bool has_mac_entry(DeviceId dev, uint64_t mac) const {
        const FlowTable* table = find(dev);
        if (!table) return false;
        for (const FlowEntry& e : *table)
            if (e.match_mac && *e.match_mac == mac) return true;
        return false;
    }
};

/// Static switch configuration: identifier rules for every local VM plus the
/// shift-routing rules of both graph directions.
inline TableStore compile_all_tables(const Fabric& fabric) {
    if (fabric.kind != TopologyKind::DeBruijn)
        throw config_error("packet emulation runs on De Bruijn fabrics");
    TableStore store;
    for (uint32_t t = 0; t < fabric.tor_count(); ++t) {
        FlowTable& table = store.at(fabric.tors[t]);
        for (FlowEntry& e : compile_identifier_flows(fabric, t)) table.add(std::move(e));
        for (GraphDirection dir : {GraphDirection::Forward, GraphDirection::Reverse})
            for (FlowEntry& e : configure_debruijn_flows(fabric, t, dir)) table.add(std::move(e));
    }
    return store;
}

/// The global-view control plane: answers ARP queries and installs the
/// per-connection vSwitch rules when a vSwitch reports a miss.
class Controller {
public:
    explicit Controller(const Fabric& fabric) : fabric_(&fabric) {
        for (const Device& dev : fabric.devices) {
            if (dev.kind == DeviceKind::Vm) {
                vm_by_ip_[dev.ip] = dev.id;
                vm_by_mac_[dev.mac] = dev.id;
            }
        }
    }

    // ARP interception: resolve a VM's IP to its MAC. Installs nothing.
    uint64_t resolve_arp(uint32_t ip) const {
        auto it = vm_by_ip_.find(ip);
        if (it == vm_by_ip_.end())
            throw unknown_destination_error("no VM with IP " + format_ipv4(ip));
        return fabric_->device(it->second).mac;
    }

    // Miss handling: identify the destination VM by the packet's MAC, then
    // install the rewrite rule at the missing vSwitch and the restore rule at
    // the destination vSwitch in one step. Returns the number of rules added.
    uint32_t handle_miss(TableStore& store, DeviceId vswitch, const PacketHeaders& headers,
                         GraphDirection dir) const {
        auto it = vm_by_mac_.find(headers.dst_mac);
        if (it == vm_by_mac_.end())
            throw unknown_destination_error("no VM with MAC " + format_mac(headers.dst_mac));
        VswitchFlows flows = compile_vswitch_flows(*fabric_, vswitch, it->second, dir);
        uint32_t installed = 0;
        if (flows.rewrite) {
            store.at(flows.src_vswitch).add(*flows.rewrite);
            ++installed;
        }
        // Another connection to the same VM may already have installed the
        // restore rule at the destination vSwitch.
        if (!store.has_mac_entry(flows.dst_vswitch, headers.dst_mac)) {
            store.at(flows.dst_vswitch).add(flows.restore);
            ++installed;
        }
        return installed;
    }

private:
    const Fabric* fabric_;
    std::unordered_map<uint32_t, DeviceId> vm_by_ip_;
    std::unordered_map<uint64_t, DeviceId> vm_by_mac_;
};

enum class HopKind : uint8_t { Match, ControllerInstall, Deliver };
enum class MatchKind : uint8_t { None, Mac, IpPrefix };

struct TraceHop {
    DeviceId device = 0;
    std::string device_name;
    int phase = 0;
    HopKind kind = HopKind::Match;
    MatchKind match = MatchKind::None;
    uint32_t matched_priority = 0;
    std::string action;
    uint32_t installed_entries = 0;  // ControllerInstall hops only
    PacketHeaders headers_after;
};

/// Device-by-device record of one packet walk.
struct Trace {
    PacketHeaders initial;
    std::vector<TraceHop> hops;

    size_t controller_events() const {
        size_t n = 0;
        for (const TraceHop& h : hops)
            if (h.kind == HopKind::ControllerInstall) ++n;
        return n;
    }

    // The ToR switches visited, in order.
    std::vector<uint32_t> tor_sequence(const Fabric& fabric) const {
        std::vector<uint32_t> seq;
        for (const TraceHop& h : hops)
            if (fabric.device(h.device).kind == DeviceKind::Tor)
                seq.push_back(static_cast<uint32_t>(fabric.device(h.device).tor_index));
        return seq;
    }
};

/// Walk one packet from the source VM's vSwitch to the destination VM's port.
/// Phase 1: source vSwitch (rewrite to locator, possibly after a controller
/// round-trip). Phase 2: prefix-matched multi-hop switch forwarding. Phase 3:
/// identifier-matched delivery at the destination switch and vSwitch.
inline Trace inject_and_trace(const Fabric& fabric, TableStore& store,
                              const Controller& controller, DeviceId src_vm, DeviceId dst_vm,
                              GraphDirection dir) {
    const Device& src = fabric.device(src_vm);
    const Device& dst = fabric.device(dst_vm);
    if (src.kind != DeviceKind::Vm || dst.kind != DeviceKind::Vm)
        throw config_error("trace endpoints must be VMs");

    Trace trace;
    trace.initial.src_mac = src.mac;
    trace.initial.src_ip = src.ip;
    trace.initial.dst_ip = dst.ip;
    trace.initial.dst_mac = controller.resolve_arp(dst.ip);

    PacketHeaders headers = trace.initial;
    DeviceId current = fabric.host_record(src.tor_index, src.host_index).vswitch;
    const size_t hop_limit = 2 * static_cast<size_t>(fabric.m) + 4;
    size_t forwarding_hops = 0;
    bool missed_here = false;

    while (true) {
        const Device& dev = fabric.device(current);
        const FlowTable* table = store.find(current);
        LookupResult hit = table ? table->lookup(headers) : LookupResult{};

        if (!hit.entry) {
            if (dev.kind != DeviceKind::Vswitch)
                throw trace_error("table miss at switch " + dev.name);
            if (missed_here)
                throw trace_error("repeated miss at " + dev.name + " after controller install");
            missed_here = true;
            uint32_t installed = controller.handle_miss(store, current, headers, dir);
            TraceHop hop;
            hop.device = current;
            hop.device_name = dev.name;
            hop.phase = 1;
            hop.kind = HopKind::ControllerInstall;
            hop.installed_entries = installed;
            hop.headers_after = headers;
            trace.hops.push_back(std::move(hop));
            continue;  // re-process the packet at the same vSwitch
        }
        missed_here = false;

        const FlowEntry& entry = *hit.entry;
        if (entry.action.kind == ActionKind::RewriteAndOutput)
            headers.dst_ip = entry.action.rewrite_ip;

        ChannelId ch = fabric.channel_from(current, entry.action.port);
        DeviceId next = fabric.channels[ch].to;

        TraceHop hop;
        hop.device = current;
        hop.device_name = dev.name;
        hop.kind = HopKind::Match;
        hop.match = entry.match_mac ? MatchKind::Mac : MatchKind::IpPrefix;
        hop.matched_priority = entry.priority;
        hop.action = entry.action.to_string();
        hop.headers_after = headers;
        if (dev.kind == DeviceKind::Vswitch)
            hop.phase = fabric.device(next).kind == DeviceKind::Vm ? 3 : 1;
        else
            hop.phase = entry.match_mac ? 3 : 2;
        trace.hops.push_back(std::move(hop));

        if (fabric.device(next).kind == DeviceKind::Vm) {
            if (next != dst_vm)
                throw trace_error("packet delivered to " + fabric.device(next).name +
                                  " instead of " + dst.name);
            TraceHop done;
            done.device = next;
            done.device_name = fabric.device(next).name;
            done.phase = 3;
            done.kind = HopKind::Deliver;
            done.headers_after = headers;
            trace.hops.push_back(std::move(done));
            return trace;
        }

        if (++forwarding_hops > hop_limit)
            throw trace_error("forwarding loop: more than " + std::to_string(hop_limit) +
                              " hops");
        current = next;
    }
}

}  // namespace debfab
