#pragma once

#include <json.hpp>

#include "debfab/addr.hpp"
#include "debfab/fabric.hpp"

namespace debfab {

/// Full fabric description: devices, directed channels with port endpoints
/// and capacities, and (for De Bruijn fabrics) the label assignment.
inline nlohmann::ordered_json fabric_json(const Fabric& fabric) {
    nlohmann::ordered_json doc;
    doc["topology"] = to_string(fabric.kind);
    if (fabric.kind == TopologyKind::DeBruijn) {
        doc["d"] = fabric.d;
        doc["m"] = fabric.m;
    }
    if (fabric.kind == TopologyKind::LeafSpine) doc["n_spine"] = fabric.n_spine;
    if (fabric.kind == TopologyKind::RandomFlat) {
        doc["uplinks_per_tor"] = fabric.uplinks_per_tor;
        doc["seed"] = fabric.seed;
    }
    doc["n_tor"] = fabric.n_tor;
    doc["hosts_per_tor"] = fabric.hosts_per_tor;
    doc["host_link_bps"] = fabric.host_link_bps;
    doc["uplink_bps"] = fabric.uplink_bps;

    nlohmann::ordered_json devices = nlohmann::ordered_json::array();
    for (const Device& dev : fabric.devices) {
        nlohmann::ordered_json d{{"id", dev.id}, {"kind", to_string(dev.kind)},
                                 {"name", dev.name}};
        if (dev.kind == DeviceKind::Vm) {
            d["mac"] = format_mac(dev.mac);
            d["ip"] = format_ipv4(dev.ip);
        }
        devices.push_back(std::move(d));
    }
    doc["devices"] = std::move(devices);

    nlohmann::ordered_json links = nlohmann::ordered_json::array();
    for (const Channel& ch : fabric.channels) {
        links.push_back(nlohmann::ordered_json{{"id", ch.id},
                                               {"from", ch.from},
                                               {"from_port", ch.from_port},
                                               {"to", ch.to},
                                               {"to_port", ch.to_port},
                                               {"capacity_bps", ch.capacity_bps}});
    }
    doc["channels"] = std::move(links);

    if (fabric.kind == TopologyKind::DeBruijn) {
        nlohmann::ordered_json labels = nlohmann::ordered_json::object();
        for (uint32_t t = 0; t < fabric.tor_count(); ++t)
            labels[fabric.label_of_tor(t).to_string()] = fabric.tors[t];
        doc["labels"] = std::move(labels);
    }
    return doc;
}

}  // namespace debfab
