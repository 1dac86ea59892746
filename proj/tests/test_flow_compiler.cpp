#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "debfab/dataplane.hpp"
#include "debfab/fabric.hpp"
#include "debfab/flow_compiler.hpp"
#include "debfab/routing.hpp"

using namespace debfab;

namespace {

std::vector<uint8_t> digits(const std::string& s) {
    std::vector<uint8_t> out;
    for (char c : s) out.push_back(static_cast<uint8_t>(c - '0'));
    return out;
}

LocatorAddress enc(const std::string& pattern, GraphDirection dir, uint32_t d, uint32_t m) {
    return encode_locator(digits(pattern), dir, d, m);
}

}  // namespace

TEST_CASE("locator encoding, forward graph") {
    CHECK(enc("0", GraphDirection::Forward, 2, 3) == LocatorAddress{0x00000000, 30});
    CHECK(enc("10", GraphDirection::Forward, 2, 3) == LocatorAddress{0x00000004, 31});
    CHECK(enc("11", GraphDirection::Forward, 2, 3) == LocatorAddress{0x00000006, 31});
    CHECK(enc("010", GraphDirection::Forward, 2, 3) == LocatorAddress{0x00000002, 32});
    CHECK(enc("011", GraphDirection::Forward, 2, 3) == LocatorAddress{0x00000003, 32});
    CHECK(enc("", GraphDirection::Forward, 2, 3) == LocatorAddress{0x00000000, 29});
}

TEST_CASE("locator encoding, reverse graph") {
    // direction bit at position m*b, pattern digits mirrored so that a label
    // suffix becomes an address prefix
    CHECK(enc("111", GraphDirection::Reverse, 2, 3).ipv4 == 8 + 7);
    CHECK(enc("011", GraphDirection::Reverse, 2, 3) == LocatorAddress{8 + 6, 32});
    CHECK(enc("0", GraphDirection::Reverse, 2, 3) == LocatorAddress{8 + 0, 30});
    CHECK(enc("01", GraphDirection::Reverse, 2, 3) == LocatorAddress{8 + 4, 31});
    // non-binary radix: two bits per digit
    CHECK(enc("12", GraphDirection::Forward, 3, 2).ipv4 == ((1u << 2) | 2u));
    CHECK(enc("12", GraphDirection::Forward, 3, 2).mask_len == 32);
    CHECK(enc("1", GraphDirection::Forward, 3, 2) == LocatorAddress{1u << 2, 30});
}

TEST_CASE("locator encoding rejects impossible layouts") {
    CHECK_THROWS_AS(enc("0", GraphDirection::Forward, 2, 32), config_error);
    CHECK_THROWS_AS(enc("0101", GraphDirection::Forward, 2, 3), config_error);
}

TEST_CASE("switch 101 forward flows, the worked example") {
    Fabric f = build_debruijn_fabric(2, 3, 0);
    uint32_t sw = f.tor_of_label(Label::parse("101", 2, 3));
    auto entries = configure_debruijn_flows(f, sw, GraphDirection::Forward);
    REQUIRE(entries.size() == 5);

    auto port = [&](Digit x) { return *f.tor_ports[sw].uplink(GraphDirection::Forward, x); };
    std::vector<std::tuple<LocatorAddress, uint32_t, PortId>> expected{
        {enc("0", GraphDirection::Forward, 2, 3), 1, port(0)},
        {enc("10", GraphDirection::Forward, 2, 3), 2, port(0)},
        {enc("11", GraphDirection::Forward, 2, 3), 2, port(1)},
        {enc("010", GraphDirection::Forward, 2, 3), 3, port(0)},
        {enc("011", GraphDirection::Forward, 2, 3), 3, port(1)},
    };
    for (size_t i = 0; i < expected.size(); ++i) {
        CAPTURE(i);
        CHECK(entries[i].match_ip == std::get<0>(expected[i]));
        CHECK(entries[i].priority == std::get<1>(expected[i]));
        CHECK(entries[i].action == Action::output(std::get<2>(expected[i])));
        CHECK(!entries[i].match_mac);
    }
}

TEST_CASE("switch 000 forward flows skip every own-suffix extension") {
    Fabric f = build_debruijn_fabric(2, 3, 0);
    uint32_t sw = f.tor_of_label(Label::parse("000", 2, 3));
    auto entries = configure_debruijn_flows(f, sw, GraphDirection::Forward);
    REQUIRE(entries.size() == 3);
    auto port1 = *f.tor_ports[sw].uplink(GraphDirection::Forward, 1);
    CHECK(entries[0].match_ip == enc("1", GraphDirection::Forward, 2, 3));
    CHECK(entries[0].priority == 1);
    CHECK(entries[1].match_ip == enc("01", GraphDirection::Forward, 2, 3));
    CHECK(entries[1].priority == 2);
    CHECK(entries[2].match_ip == enc("001", GraphDirection::Forward, 2, 3));
    CHECK(entries[2].priority == 3);
    for (const auto& e : entries) CHECK(e.action == Action::output(port1));
}

TEST_CASE("flow counts stay within the per-direction bound") {
    for (auto [d, m] : std::vector<std::pair<uint32_t, uint32_t>>{{2, 3}, {2, 5}, {3, 2}}) {
        Fabric f = build_debruijn_fabric(d, m, 0);
        for (uint32_t t = 0; t < f.tor_count(); ++t) {
            for (GraphDirection dir : {GraphDirection::Forward, GraphDirection::Reverse}) {
                size_t n = configure_debruijn_flows(f, t, dir).size();
                CHECK(n <= static_cast<size_t>(m) * d);
                CHECK(n >= static_cast<size_t>(m) * (d - 1));
            }
        }
    }
}

// Every destination's locator must match exactly one entry per priority
// level, and the overall longest match must output on the same digit the
// greedy step would use.
TEST_CASE("longest-prefix lookup agrees with the greedy step") {
    for (uint32_t m : {3u, 5u}) {
        Fabric f = build_debruijn_fabric(2, m, 0);
        for (GraphDirection dir : {GraphDirection::Forward, GraphDirection::Reverse}) {
            for (uint32_t s = 0; s < f.tor_count(); ++s) {
                auto entries = configure_debruijn_flows(f, s, dir);
                const Label& sw = f.label_of_tor(s);
                for (uint32_t t = 0; t < f.tor_count(); ++t) {
                    if (s == t) continue;
                    const Label& dst = f.label_of_tor(t);
                    uint32_t locator = locator_of(dst, dir).ipv4;

                    std::set<uint32_t> matched_priorities;
                    const FlowEntry* best = nullptr;
                    size_t matches = 0;
                    for (const FlowEntry& e : entries) {
                        if (!e.match_ip->matches(locator)) continue;
                        ++matches;
                        CHECK(matched_priorities.insert(e.priority).second);
                        if (!best || e.priority > best->priority) best = &e;
                    }
                    CAPTURE(m, static_cast<int>(dir), sw.to_string(), dst.to_string());
                    REQUIRE(matches >= 1);
                    REQUIRE(best);

                    uint32_t k = dir == GraphDirection::Forward ? longest_overlap(sw, dst)
                                                                : longest_overlap(dst, sw);
                    Digit next = dir == GraphDirection::Forward ? dst.digit(k + 1)
                                                                : dst.digit(m - k);
                    CHECK(best->action == Action::output(*f.tor_ports[s].uplink(dir, next)));
                    CHECK(best->priority == k + 1);
                }
            }
        }
    }
}

TEST_CASE("identifier flows deliver local VMs at top priority") {
    Fabric f = build_debruijn_fabric(2, 3, 40);
    auto entries = compile_identifier_flows(f, 5);
    REQUIRE(entries.size() == 40);
    for (const FlowEntry& e : entries) {
        CHECK(e.priority == kIdentifierPriority);
        CHECK(e.priority > f.m);
        CHECK(e.match_mac);
        CHECK(!e.match_ip);
    }
    for (uint32_t h = 0; h < 40; ++h) {
        CHECK(entries[h].match_mac == f.device(f.vm_at(5, h)).mac);
        CHECK(entries[h].action == Action::output(f.tor_ports[5].host_ports[h]));
    }

    Fabric empty = build_debruijn_fabric(2, 3, 0);
    CHECK(compile_identifier_flows(empty, 5).empty());

    // a VM from another rack is rejected
    DeviceId foreign = f.vm_at(2, 0);
    CHECK_THROWS_AS(compile_identifier_flows(f, 5, std::vector<DeviceId>{foreign}),
                    misplacement_error);
}

TEST_CASE("vswitch flows rewrite to the locator and back") {
    Fabric f = build_debruijn_fabric(2, 3, 2);
    uint32_t src_tor = f.tor_of_label(Label::parse("001", 2, 3));
    uint32_t dst_tor = f.tor_of_label(Label::parse("111", 2, 3));
    DeviceId src_vsw = f.host_record(src_tor, 0).vswitch;
    DeviceId dst_vm = f.vm_at(dst_tor, 1);

    VswitchFlows flows = compile_vswitch_flows(f, src_vsw, dst_vm, GraphDirection::Forward);
    REQUIRE(flows.rewrite);
    CHECK(flows.rewrite->match_mac == f.device(dst_vm).mac);
    CHECK(flows.rewrite->action.kind == ActionKind::RewriteAndOutput);
    CHECK(flows.rewrite->action.rewrite_ip == 0x00000007);  // locator of 111
    CHECK(flows.rewrite->action.port == f.host_record(src_tor, 0).vswitch_uplink_port);
    CHECK(flows.dst_vswitch == f.host_record(dst_tor, 1).vswitch);
    CHECK(flows.restore.match_mac == f.device(dst_vm).mac);
    CHECK(flows.restore.action.rewrite_ip == f.device(dst_vm).ip);

    VswitchFlows rev = compile_vswitch_flows(f, src_vsw, dst_vm, GraphDirection::Reverse);
    CHECK(rev.rewrite->action.rewrite_ip == 8 + 7);  // direction bit set

    // destination VM behind the same vSwitch: restore rule only
    Fabric multi = build_debruijn_fabric(2, 3, 1, 1e9, 1e10, /*vms_per_host=*/2);
    DeviceId vsw = multi.host_record(0, 0).vswitch;
    VswitchFlows local = compile_vswitch_flows(multi, vsw, multi.vm_at(0, 0, 1),
                                               GraphDirection::Forward);
    CHECK(!local.rewrite);
    CHECK(local.dst_vswitch == vsw);
}
