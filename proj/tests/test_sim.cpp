#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "debfab/experiment.hpp"
#include "debfab/sim.hpp"

using namespace debfab;

namespace {

Label L(const std::string& text, uint32_t d = 2) {
    return Label::parse(text, d, static_cast<uint32_t>(text.size()));
}

// A routed connection over hand-picked channel ids, for allocator tests.
RoutedConnection rc(uint32_t id, std::vector<ChannelId> channels) {
    RoutedConnection r;
    r.conn = {id, id, id + 1};
    r.channels = std::move(channels);
    return r;
}

}  // namespace

TEST_CASE("traffic generation: one sender per host, receiver never self") {
    Fabric f = build_debruijn_fabric(2, 3, 40);
    auto conns = generate_traffic(f, 1);
    REQUIRE(conns.size() == 320);
    for (const Connection& c : conns) {
        CHECK(c.src_host != c.dst_host);
        CHECK(c.dst_host < 320);
    }
    auto again = generate_traffic(f, 1);
    for (size_t i = 0; i < conns.size(); ++i) CHECK(conns[i].dst_host == again[i].dst_host);
    auto other = generate_traffic(f, 2);
    size_t differing = 0;
    for (size_t i = 0; i < conns.size(); ++i)
        if (conns[i].dst_host != other[i].dst_host) ++differing;
    CHECK(differing > 200);

    size_t inter_rack = 0;
    for (const Connection& c : conns)
        if (c.src_host / 40 != c.dst_host / 40) ++inter_rack;
    double fraction = double(inter_rack) / conns.size();
    CHECK(fraction > 0.80);  // expectation is 280/319
    CHECK(fraction < 0.95);
}

TEST_CASE("two hosts send to each other") {
    Fabric f = build_debruijn_fabric(2, 1, 1);
    auto conns = generate_traffic(f, 5);
    REQUIRE(conns.size() == 2);
    CHECK(conns[0].dst_host == 1);
    CHECK(conns[1].dst_host == 0);
}

TEST_CASE("db routing walks the shift route's channels") {
    Fabric f = build_debruijn_fabric(2, 3, 1);
    uint32_t src_tor = f.tor_of_label(L("001")), dst_tor = f.tor_of_label(L("111"));
    std::vector<Connection> conns{{0, f.global_host_index(src_tor, 0),
                                   f.global_host_index(dst_tor, 0)}};
    auto routed = route_connections(f, Scheme::DbDbRouting, conns, 1);
    REQUIRE(routed.size() == 1);
    const RoutedConnection& r = routed[0];
    CHECK(r.inter_rack);
    CHECK(r.inter_switch_hops == 2);
    REQUIRE(r.channels.size() == 4);
    CHECK(r.channels.front() == f.host_record(src_tor, 0).up_channel);
    CHECK(r.channels.back() == f.host_record(dst_tor, 0).down_channel);
    uint32_t mid = f.tor_of_label(L("011"));
    CHECK(r.channels[1] == *f.channel_between_switches(f.tors[src_tor], f.tors[mid]));
    CHECK(r.channels[2] == *f.channel_between_switches(f.tors[mid], f.tors[dst_tor]));
}

TEST_CASE("intra-rack connections use only the two access links") {
    Fabric f = build_debruijn_fabric(2, 3, 2);
    std::vector<Connection> conns{{0, f.global_host_index(3, 0), f.global_host_index(3, 1)}};
    for (Scheme scheme : {Scheme::DbDbRouting, Scheme::DbEcmp}) {
        auto routed = route_connections(f, scheme, conns, 1);
        CHECK(routed[0].channels.size() == 2);
        CHECK(routed[0].inter_switch_hops == 0);
        CHECK(!routed[0].inter_rack);
    }
}

TEST_CASE("leaf-spine ecmp walks are always leaf-spine-leaf") {
    Fabric f = build_leaf_spine(8, 4, 4);
    auto conns = generate_traffic(f, 3);
    auto routed = route_connections(f, Scheme::LsEcmp, conns, 3);
    for (const RoutedConnection& r : routed) {
        if (r.inter_rack) {
            CHECK(r.inter_switch_hops == 2);
            CHECK(r.channels.size() == 4);
        } else {
            CHECK(r.inter_switch_hops == 0);
        }
    }
}

TEST_CASE("scheme and fabric kind must agree") {
    Fabric db = build_debruijn_fabric(2, 3, 1);
    auto conns = generate_traffic(db, 1);
    CHECK_THROWS_AS(route_connections(db, Scheme::LsEcmp, conns, 1), config_error);
    Fabric ls = build_leaf_spine(4, 2, 1);
    CHECK_THROWS_AS(route_connections(ls, Scheme::DbDbRouting, generate_traffic(ls, 1), 1),
                    config_error);
}

TEST_CASE("progressive filling splits a shared channel evenly") {
    std::vector<RoutedConnection> conns{rc(0, {0}), rc(1, {0})};
    std::vector<double> caps{1e10};
    Allocation alloc = maxmin_allocate(conns, caps);
    CHECK(alloc.rate_bps[0] == Catch::Approx(5e9));
    CHECK(alloc.rate_bps[1] == Catch::Approx(5e9));
}

TEST_CASE("single bottleneck pins the rate") {
    std::vector<RoutedConnection> conns{rc(0, {0, 1, 2})};
    std::vector<double> caps{1e9, 1e10, 1e10};
    Allocation alloc = maxmin_allocate(conns, caps);
    CHECK(alloc.rate_bps[0] == Catch::Approx(1e9));
}

TEST_CASE("three-connection chain allocates 8/2/2") {
    // A and B share X (cap 10), B and C share Y (cap 4)
    std::vector<RoutedConnection> conns{rc(0, {0}), rc(1, {0, 1}), rc(2, {1})};
    std::vector<double> caps{10, 4};
    Allocation alloc = maxmin_allocate(conns, caps);
    CHECK(alloc.rate_bps[0] == Catch::Approx(8));
    CHECK(alloc.rate_bps[1] == Catch::Approx(2));
    CHECK(alloc.rate_bps[2] == Catch::Approx(2));
    CHECK(allocation_feasible(conns, caps, alloc));
    CHECK(allocation_bottlenecked(conns, caps, alloc));
}

TEST_CASE("allocator rejects malformed input") {
    std::vector<RoutedConnection> empty_walk{rc(0, {})};
    std::vector<double> caps{1e9};
    CHECK_THROWS_AS(maxmin_allocate(empty_walk, caps), config_error);
    std::vector<RoutedConnection> bad_cap{rc(0, {0})};
    std::vector<double> zero{0.0};
    CHECK_THROWS_AS(maxmin_allocate(bad_cap, zero), config_error);
}

TEST_CASE("allocation is feasible, bottlenecked, scale-free on a real cell") {
    Fabric f = build_debruijn_fabric(2, 3, 4);
    auto conns = generate_traffic(f, 7);
    auto routed = route_connections(f, Scheme::DbDbRouting, conns, 7);
    std::vector<double> caps;
    for (const Channel& ch : f.channels) caps.push_back(ch.capacity_bps);
    Allocation alloc = maxmin_allocate(routed, caps);
    CHECK(allocation_feasible(routed, caps, alloc));
    CHECK(allocation_bottlenecked(routed, caps, alloc));

    std::vector<double> scaled;
    for (double c : caps) scaled.push_back(3 * c);
    Allocation alloc3 = maxmin_allocate(routed, scaled);
    for (size_t i = 0; i < alloc.rate_bps.size(); ++i)
        CHECK(alloc3.rate_bps[i] == Catch::Approx(3 * alloc.rate_bps[i]).epsilon(1e-9));
}

TEST_CASE("identical cell runs produce identical metrics") {
    CellConfig cfg;
    cfg.scheme = Scheme::RandomEcmp;
    cfg.n_tor = 8;
    cfg.hosts_per_tor = 4;
    cfg.seed = 11;
    CellResult a = run_cell(cfg);
    CellResult b = run_cell(cfg);
    REQUIRE(a.ok);
    REQUIRE(b.ok);
    CHECK(a.metrics.mean_rate_bps == b.metrics.mean_rate_bps);
    CHECK(a.metrics.p50_rate_bps == b.metrics.p50_rate_bps);
    CHECK(a.metrics.inter_rack_fraction == b.metrics.inter_rack_fraction);
    REQUIRE(a.alloc.rate_bps.size() == b.alloc.rate_bps.size());
    for (size_t i = 0; i < a.alloc.rate_bps.size(); ++i)
        CHECK(a.alloc.rate_bps[i] == b.alloc.rate_bps[i]);
}

TEST_CASE("summary metrics: small debruijn cell") {
    CellConfig cfg;
    cfg.scheme = Scheme::DbDbRouting;
    cfg.n_tor = 8;
    cfg.hosts_per_tor = 1;
    cfg.seed = 4;
    CellResult cell = run_cell(cfg);
    REQUIRE(cell.ok);
    CHECK(cell.metrics.mean_path_len <= 3.0);
    CHECK(cell.metrics.max_path_len <= 3);
    CHECK(cell.metrics.mean_rate_bps <= cfg.host_link_bps);
    CHECK(cell.metrics.n_connections == 8);
}

TEST_CASE("all-intra-rack traffic reports zero inter-rack fraction") {
    Fabric f = build_debruijn_fabric(2, 3, 2);
    std::vector<Connection> conns;
    for (uint32_t t = 0; t < 8; ++t) {
        conns.push_back({t * 2, f.global_host_index(t, 0), f.global_host_index(t, 1)});
        conns.push_back({t * 2 + 1, f.global_host_index(t, 1), f.global_host_index(t, 0)});
    }
    auto routed = route_connections(f, Scheme::DbDbRouting, conns, 1);
    Allocation alloc = maxmin_allocate(routed, f);
    Metrics mx = summarize(alloc, f, routed, Scheme::DbDbRouting, 1);
    CHECK(mx.inter_rack_fraction == 0.0);
    CHECK(mx.mean_path_len == 0.0);
    CHECK(mx.mean_rate_bps == Catch::Approx(1e9));  // each host link carries one flow each way
}

TEST_CASE("leaf-spine outperforms the flat fabric at equal size") {
    CellConfig db;
    db.scheme = Scheme::DbDbRouting;
    db.n_tor = 8;
    db.hosts_per_tor = 40;
    db.seed = 2;
    CellConfig ls = db;
    ls.scheme = Scheme::LsEcmp;
    CellResult a = run_cell(db), b = run_cell(ls);
    REQUIRE(a.ok);
    REQUIRE(b.ok);
    CHECK(a.metrics.mean_rate_bps < b.metrics.mean_rate_bps);
}

TEST_CASE("sweep grid shape, failure isolation, csv determinism") {
    SweepConfig cfg;
    cfg.sizes = {8, 9};  // 9 is not a power of two: the De Bruijn cells fail
    cfg.schemes = {Scheme::LsEcmp, Scheme::DbDbRouting};
    cfg.seeds = {1, 2};
    cfg.hosts_per_tor = 2;
    SweepResult sweep = run_sweep(cfg);
    REQUIRE(sweep.cells.size() == 8);
    size_t failed = 0;
    for (const CellResult& cell : sweep.cells)
        if (!cell.ok) ++failed;
    CHECK(failed == 2);  // db/dbrouting at size 9, seeds 1 and 2
    for (const CellResult& cell : sweep.cells) {
        bool should_fail = cell.cfg.scheme == Scheme::DbDbRouting && cell.cfg.n_tor == 9;
        CHECK(cell.ok == !should_fail);
    }

    auto summary = sweep_summary_json(sweep);
    CHECK(summary["cells"].size() == 8);

    std::ostringstream csv_a, csv_b;
    write_connection_csv(csv_a, sweep);
    write_connection_csv(csv_b, run_sweep(cfg));
    CHECK(csv_a.str() == csv_b.str());
    CHECK(csv_a.str().starts_with("topology,routing,n_tor,hosts_per_tor,seed,conn_id,"
                                  "src_host,dst_host,inter_rack,path_len,rate_bps\n"));

    SweepConfig parallel = cfg;
    parallel.jobs = 4;
    std::ostringstream csv_c;
    write_connection_csv(csv_c, run_sweep(parallel));
    CHECK(csv_c.str() == csv_a.str());
}
