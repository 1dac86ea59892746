#pragma once

#include <json.hpp>

#include "debfab/addr.hpp"
#include "debfab/dataplane.hpp"

namespace debfab {

inline nlohmann::ordered_json trace_hop_json(const TraceHop& hop, size_t index) {
    nlohmann::ordered_json rec{{"hop", index}, {"device", hop.device_name},
                               {"phase", hop.phase}};
    switch (hop.kind) {
        case HopKind::ControllerInstall:
            rec["event"] = "controller_install";
            rec["installed"] = hop.installed_entries;
            break;
        case HopKind::Deliver:
            rec["event"] = "delivered";
            break;
        case HopKind::Match:
            rec["match"] = hop.match == MatchKind::Mac ? "mac" : "ip";
            rec["prio"] = hop.matched_priority;
            rec["action"] = hop.action;
            break;
    }
    rec["dst_mac"] = format_mac(hop.headers_after.dst_mac);
    rec["dst_ip"] = format_ipv4(hop.headers_after.dst_ip);
    return rec;
}

// One JSON object per line, one line per hop.
inline std::string trace_json_lines(const Trace& trace) {
    std::string out;
    for (size_t i = 0; i < trace.hops.size(); ++i) {
        out += trace_hop_json(trace.hops[i], i).dump();
        out += '\n';
    }
    return out;
}

}  // namespace debfab
