#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "debfab/fabric.hpp"
#include "debfab/flow_table.hpp"
#include "debfab/label.hpp"

namespace debfab {

// Identifier rules must always win over shift-routing rules, whose priorities
// equal their matched prefix length and so never exceed m.
constexpr uint32_t kIdentifierPriority = 10000;

/// Locator layout, low m*b bits of the IPv4 value with b = bits per digit:
/// the label pattern sits left-aligned within that field, one direction bit
/// at position m*b above it. Forward locators pack digits as written, so a
/// written-label prefix is an IP prefix; reverse locators pack them mirrored,
/// so a written-label suffix is an IP prefix. The mask covers the pattern and
/// the direction bit.
inline LocatorAddress encode_locator(std::span<const uint8_t> pattern, GraphDirection dir,
                                     uint32_t d, uint32_t m) {
    const uint32_t b = detail::bits_per_digit(d);
    const uint32_t k = static_cast<uint32_t>(pattern.size());
    if (k > m) throw config_error("label pattern longer than m");
    if (m * b + 1 > 32)
        throw config_error("locator encoding needs " + std::to_string(m * b + 1) +
                           " bits, more than an IPv4 address holds");
    uint32_t value = 0;
    for (uint32_t i = 0; i < k; ++i) {
        uint8_t digit = dir == GraphDirection::Forward ? pattern[i] : pattern[k - 1 - i];
        if (digit >= d) throw label_error("digit out of range in locator pattern");
        value |= static_cast<uint32_t>(digit) << ((m - 1 - i) * b);
    }
    if (dir == GraphDirection::Reverse) value |= 1u << (m * b);
    LocatorAddress loc;
    loc.ipv4 = value;
    loc.mask_len = static_cast<uint8_t>(32 - (m - k) * b);
    return loc;
}

/// Locator IP of a destination switch: the full-length pattern.
inline LocatorAddress locator_of(const Label& dst, GraphDirection dir) {
    return encode_locator(dst.digits(), dir, dst.radix(), dst.length());
}

/// Shift-routing rules for one switch and one graph direction. Enumerates the
/// switch label's suffixes (prefixes for the reverse graph) extended by one
/// digit; an extension that is itself a suffix (prefix) of the switch label is
/// unreachable by a longest-match lookup and is skipped. Priority equals the
/// pattern length, so overlapping prefixes resolve to the most specific rule.
inline std::vector<FlowEntry> configure_debruijn_flows(const Fabric& fabric, uint32_t tor_index,
                                                       GraphDirection dir) {
    if (fabric.kind != TopologyKind::DeBruijn)
        throw config_error("shift-routing flows need a De Bruijn fabric");
    const Label& sw = fabric.label_of_tor(tor_index);
    const auto& digits = sw.digits();
    const uint32_t d = sw.radix();
    const uint32_t m = sw.length();
    const TorPorts& ports = fabric.tor_ports.at(tor_index);
    const bool fwd = dir == GraphDirection::Forward;

    // is_fragment(p): pattern == suffix (forward) / prefix (reverse) of the
    // switch label, length inferred from the pattern.
    auto is_fragment = [&](std::span<const uint8_t> p) {
        size_t off = fwd ? m - p.size() : 0;
        for (size_t i = 0; i < p.size(); ++i)
            if (digits[off + i] != p[i]) return false;
        return true;
    };

    std::vector<FlowEntry> entries;
    for (uint32_t len = 0; len < m; ++len) {
        // matched fragment of the destination label so far
        std::vector<uint8_t> base(fwd ? digits.end() - len : digits.begin(),
                                  fwd ? digits.end() : digits.begin() + len);
        for (Digit x = 0; x < d; ++x) {
            std::vector<uint8_t> extended;
            extended.reserve(len + 1);
            if (fwd) {
                extended = base;
                extended.push_back(static_cast<uint8_t>(x));
            } else {
                extended.push_back(static_cast<uint8_t>(x));
                extended.insert(extended.end(), base.begin(), base.end());
            }
            if (is_fragment(extended)) continue;
            auto port = ports.uplink(dir, x);
            if (!port)
                throw config_error("missing uplink port for digit " + std::to_string(x));
            FlowEntry e;
            e.match_ip = encode_locator(extended, dir, d, m);
            e.priority = len + 1;
            e.action = Action::output(*port);
            entries.push_back(std::move(e));
        }
    }
    return entries;
}

/// Exact-MAC delivery rules for the given VMs, which must live in this
/// switch's rack.
inline std::vector<FlowEntry> compile_identifier_flows(const Fabric& fabric, uint32_t tor_index,
                                                       std::span<const DeviceId> vms) {
    std::vector<FlowEntry> entries;
    entries.reserve(vms.size());
    for (DeviceId vm : vms) {
        const Device& dev = fabric.device(vm);
        if (dev.kind != DeviceKind::Vm)
            throw misplacement_error("device " + dev.name + " is not a VM");
        if (dev.tor_index != static_cast<int32_t>(tor_index))
            throw misplacement_error("VM " + dev.name + " is not attached to switch " +
                                     fabric.device(fabric.tors.at(tor_index)).name);
        FlowEntry e;
        e.match_mac = dev.mac;
        e.priority = kIdentifierPriority;
        e.action = Action::output(fabric.tor_ports.at(tor_index).host_ports.at(dev.host_index));
        entries.push_back(std::move(e));
    }
    return entries;
}

/// All local VMs of a rack.
inline std::vector<FlowEntry> compile_identifier_flows(const Fabric& fabric, uint32_t tor_index) {
    std::vector<DeviceId> vms;
    if (fabric.hosts_per_tor > 0)
        for (const HostRecord& rec : fabric.racks.at(tor_index))
            vms.insert(vms.end(), rec.vms.begin(), rec.vms.end());
    return compile_identifier_flows(fabric, tor_index, vms);
}

/// The per-connection vSwitch rules: rewrite the destination IP to the
/// destination rack's locator on the way out, restore the VM's own IP and
/// deliver on the way in. When source and destination share a vSwitch only
/// the restore rule is needed.
struct VswitchFlows {
    DeviceId src_vswitch = 0;
    std::optional<FlowEntry> rewrite;  // absent when dst VM is local to src vswitch
    DeviceId dst_vswitch = 0;
    FlowEntry restore;
};

inline VswitchFlows compile_vswitch_flows(const Fabric& fabric, DeviceId src_vswitch,
                                          DeviceId dst_vm, GraphDirection dir) {
    const Device& vm = fabric.device(dst_vm);
    if (vm.kind != DeviceKind::Vm)
        throw unknown_destination_error("device " + std::to_string(dst_vm) + " is not a VM");
    const HostRecord& dst_rec = fabric.host_record(vm.tor_index, vm.host_index);

    VswitchFlows flows;
    flows.src_vswitch = src_vswitch;
    flows.dst_vswitch = dst_rec.vswitch;

    flows.restore.match_mac = vm.mac;
    flows.restore.priority = kIdentifierPriority;
    flows.restore.action =
        Action::rewrite_and_output(vm.ip, dst_rec.vswitch_vm_ports.at(vm.vm_index));

    if (src_vswitch != dst_rec.vswitch) {
        const Device& src_dev = fabric.device(src_vswitch);
        if (src_dev.kind != DeviceKind::Vswitch)
            throw config_error("device " + src_dev.name + " is not a vSwitch");
        const Label& dst_label = fabric.label_of_tor(vm.tor_index);
        const HostRecord& src_rec = fabric.host_record(src_dev.tor_index, src_dev.host_index);
        FlowEntry rewrite;
        rewrite.match_mac = vm.mac;
        rewrite.priority = kIdentifierPriority;
        rewrite.action = Action::rewrite_and_output(locator_of(dst_label, dir).ipv4,
                                                    src_rec.vswitch_uplink_port);
        flows.rewrite = std::move(rewrite);
    }
    return flows;
}

}  // namespace debfab
