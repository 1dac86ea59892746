#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "debfab/addr.hpp"
#include "debfab/error.hpp"

namespace debfab {

/// An IPv4 destination prefix: the top `mask_len` bits of `ipv4` are
/// significant, the rest must be zero.
struct LocatorAddress {
    uint32_t ipv4 = 0;
    uint8_t mask_len = 32;

    uint32_t mask() const { return mask_len == 0 ? 0u : ~0u << (32 - mask_len); }
    bool matches(uint32_t ip) const { return (ip & mask()) == ipv4; }

    std::string to_string() const {
        return format_ipv4(ipv4) + "/" + std::to_string(mask_len);
    }

    bool operator==(const LocatorAddress&) const = default;
};

enum class ActionKind : uint8_t { Output, RewriteAndOutput, ToController };

struct Action {
    ActionKind kind = ActionKind::ToController;
    uint32_t port = 0;
    uint32_t rewrite_ip = 0;

    static Action output(uint32_t port) { return {ActionKind::Output, port, 0}; }
    static Action rewrite_and_output(uint32_t ip, uint32_t port) {
        return {ActionKind::RewriteAndOutput, port, ip};
    }
    static Action to_controller() { return {ActionKind::ToController, 0, 0}; }

    std::string to_string() const {
        switch (kind) {
            case ActionKind::Output: return "output:" + std::to_string(port);
            case ActionKind::RewriteAndOutput:
                return "rewrite:" + format_ipv4(rewrite_ip) + ",output:" + std::to_string(port);
            case ActionKind::ToController: return "controller";
        }
        return "?";
    }

    bool operator==(const Action&) const = default;
};

/// One match-action rule. Shift-routing rules match only on the IP prefix;
/// identifier rules match only on the exact destination MAC.
struct FlowEntry {
    std::optional<uint64_t> match_mac;
    std::optional<LocatorAddress> match_ip;
    uint32_t priority = 0;
    Action action;

    bool operator==(const FlowEntry&) const = default;
};

struct PacketHeaders {
    uint64_t src_mac = 0;
    uint64_t dst_mac = 0;
    uint32_t src_ip = 0;
    uint32_t dst_ip = 0;

    bool operator==(const PacketHeaders&) const = default;
};

struct LookupResult {
    const FlowEntry* entry = nullptr;  // null on miss: hand the packet to the controller
    bool priority_tie = false;         // two matching entries shared the winning priority
};

/// Priority-ordered match table; the TCAM stand-in. Entries keep insertion
/// order, which also breaks (diagnosed) priority ties deterministically.
class FlowTable {
public:
    void add(FlowEntry entry) {
        if (!entry.match_mac && !entry.match_ip)
            throw config_error("flow entry needs at least one match field");
        entries_.push_back(std::move(entry));
    }

    LookupResult lookup(const PacketHeaders& headers) const {
        LookupResult result;
        for (const FlowEntry& e : entries_) {
            if (e.match_mac && *e.match_mac != headers.dst_mac) continue;
            if (e.match_ip && !e.match_ip->matches(headers.dst_ip)) continue;
            if (!result.entry || e.priority > result.entry->priority) {
                result.entry = &e;
                result.priority_tie = false;
            } else if (e.priority == result.entry->priority) {
                result.priority_tie = true;
            }
        }
        return result;
    }

    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::vector<FlowEntry> entries_;
};

// Stable one-line dump used by the CLI and golden tests.
inline std::string format_flow_entry(const std::string& device, const FlowEntry& e) {
    std::string line = "table=" + device;
    line += " match_mac=" + (e.match_mac ? format_mac(*e.match_mac) : std::string("-"));
    line += " match_ip=" + (e.match_ip ? e.match_ip->to_string() : std::string("-"));
    line += " prio=" + std::to_string(e.priority);
    line += " action=" + e.action.to_string();
    return line;
}

}  // namespace debfab
