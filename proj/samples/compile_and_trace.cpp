// Minimal tour: build a small fabric, look at one switch's flow table, and
// follow a packet across the three forwarding phases.

#include <iostream>

#include "debfab/dataplane.hpp"
#include "debfab/fabric.hpp"
#include "debfab/flow_compiler.hpp"

int main() {
    using namespace debfab;

    Fabric fabric = build_debruijn_fabric(/*d=*/2, /*m=*/3, /*hosts_per_tor=*/2);
    std::cout << fabric.tor_count() << " switches, " << fabric.host_count() << " hosts\n\n";

    uint32_t sw = fabric.tor_of_label(Label::parse("101", 2, 3));
    std::cout << "flow table of tor-101 (forward graph):\n";
    for (const FlowEntry& e : configure_debruijn_flows(fabric, sw, GraphDirection::Forward))
        std::cout << "  " << format_flow_entry("tor-101", e) << '\n';

    TableStore store = compile_all_tables(fabric);
    Controller controller(fabric);
    Trace trace = inject_and_trace(fabric, store, controller,
                                   fabric.vm_at(fabric.tor_of_label(Label::parse("001", 2, 3)), 0),
                                   fabric.vm_at(fabric.tor_of_label(Label::parse("111", 2, 3)), 0),
                                   GraphDirection::Forward);
    std::cout << "\npacket walk vm@001 -> vm@111:\n";
    for (const TraceHop& hop : trace.hops)
        std::cout << "  phase " << hop.phase << "  " << hop.device_name << "  "
                  << (hop.kind == HopKind::ControllerInstall ? "controller install"
                      : hop.kind == HopKind::Deliver         ? "delivered"
                                                              : hop.action)
                  << '\n';
    return 0;
}
