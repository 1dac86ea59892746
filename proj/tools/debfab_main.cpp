// debfab: build flat De Bruijn fabrics of ToR switches, compile their
// prefix-match flow tables, trace packets through the three forwarding
// phases, and compare throughput against leaf-spine/ECMP and random flat
// topologies.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "debfab/debfab.hpp"

namespace {

using namespace debfab;

GraphDirection parse_direction(const std::string& text) {
    if (text == "forward") return GraphDirection::Forward;
    if (text == "reverse") return GraphDirection::Reverse;
    throw config_error("direction must be forward or reverse");
}

int cmd_compile(uint32_t d, uint32_t m, const std::string& switch_label, const std::string& dir,
                uint32_t hosts_per_tor) {
    Fabric fabric = build_debruijn_fabric(d, m, hosts_per_tor);
    uint32_t tor = fabric.tor_of_label(Label::parse(switch_label, d, m));
    std::string name = fabric.device(fabric.tors[tor]).name;
    std::vector<GraphDirection> dirs;
    if (dir == "both")
        dirs = {GraphDirection::Forward, GraphDirection::Reverse};
    else
        dirs = {parse_direction(dir)};
    for (GraphDirection gd : dirs)
        for (const FlowEntry& e : configure_debruijn_flows(fabric, tor, gd))
            std::cout << format_flow_entry(name, e) << '\n';
    return 0;
}

int cmd_route(uint32_t d, uint32_t m, const std::string& src, const std::string& dst) {
    Label ls = Label::parse(src, d, m);
    Label ld = Label::parse(dst, d, m);
    Route route = best_route(ls, ld);
    nlohmann::ordered_json doc{
        {"src", ls.to_string()},
        {"dst", ld.to_string()},
        {"direction", to_string(route.direction)},
        {"length", route.hop_count()},
        {"forward_length", debruijn_distance(ls, ld, GraphDirection::Forward)},
        {"reverse_length", debruijn_distance(ls, ld, GraphDirection::Reverse)},
    };
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    for (const Label& l : route.labels) labels.push_back(l.to_string());
    doc["route"] = std::move(labels);
    std::cout << doc.dump() << '\n';
    return 0;
}

int cmd_trace(uint32_t d, uint32_t m, uint32_t hosts_per_tor, const std::string& src_tor,
              uint32_t src_host, const std::string& dst_tor, uint32_t dst_host,
              const std::string& dir, uint32_t repeat) {
    Fabric fabric = build_debruijn_fabric(d, m, hosts_per_tor);
    uint32_t st = fabric.tor_of_label(Label::parse(src_tor, d, m));
    uint32_t dt = fabric.tor_of_label(Label::parse(dst_tor, d, m));
    if (src_host >= hosts_per_tor || dst_host >= hosts_per_tor)
        throw config_error("host index out of range (hosts per switch: " +
                           std::to_string(hosts_per_tor) + ")");
    DeviceId src_vm = fabric.vm_at(st, src_host);
    DeviceId dst_vm = fabric.vm_at(dt, dst_host);
    if (src_vm == dst_vm) throw config_error("source and destination VM are the same");

    TableStore store = compile_all_tables(fabric);
    Controller controller(fabric);
    GraphDirection gd = parse_direction(dir);
    for (uint32_t i = 0; i < repeat; ++i) {
        Trace trace = inject_and_trace(fabric, store, controller, src_vm, dst_vm, gd);
        for (size_t h = 0; h < trace.hops.size(); ++h) {
            nlohmann::ordered_json rec = trace_hop_json(trace.hops[h], h);
            rec["trace"] = i;
            std::cout << rec.dump() << '\n';
        }
    }
    return 0;
}

int cmd_export_fabric(const std::string& topology, uint32_t d, uint32_t m, uint32_t n_tor,
                      uint32_t n_spine, uint32_t uplinks, uint32_t hosts_per_tor, uint64_t seed,
                      double host_link_bps, double uplink_bps, const std::string& out_path) {
    Fabric fabric;
    if (topology == "debruijn")
        fabric = build_debruijn_fabric(d, m, hosts_per_tor, host_link_bps, uplink_bps);
    else if (topology == "leafspine")
        fabric = build_leaf_spine(n_tor, n_spine, hosts_per_tor, host_link_bps, uplink_bps);
    else if (topology == "random")
        fabric = build_random_flat(n_tor, uplinks, hosts_per_tor, seed, host_link_bps,
                                   uplink_bps);
    else
        throw config_error("topology must be debruijn, leafspine, or random");

    std::string text = fabric_json(fabric).dump(2) + "\n";
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw error("cannot write " + out_path);
        out << text;
    }
    return 0;
}

void apply_json_config(SweepConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config file " + path + ": " + e.what());
    }
    if (doc.contains("sizes")) cfg.sizes = doc["sizes"].get<std::vector<uint32_t>>();
    if (doc.contains("schemes")) {
        cfg.schemes.clear();
        for (const auto& s : doc["schemes"]) cfg.schemes.push_back(parse_scheme(s));
    }
    if (doc.contains("seeds")) cfg.seeds = doc["seeds"].get<std::vector<uint64_t>>();
    if (doc.contains("hosts_per_tor")) cfg.hosts_per_tor = doc["hosts_per_tor"];
    if (doc.contains("d")) cfg.d = doc["d"];
    if (doc.contains("n_spine")) cfg.n_spine = doc["n_spine"];
    if (doc.contains("uplinks_per_tor")) cfg.uplinks_per_tor = doc["uplinks_per_tor"];
    if (doc.contains("host_link_bps")) cfg.host_link_bps = doc["host_link_bps"];
    if (doc.contains("uplink_bps")) cfg.uplink_bps = doc["uplink_bps"];
    if (doc.contains("ecmp_max_paths")) cfg.ecmp_max_paths = doc["ecmp_max_paths"];
    if (doc.contains("jobs")) cfg.jobs = doc["jobs"];
    if (doc.contains("db_tie_break")) {
        std::string tb = doc["db_tie_break"];
        if (tb == "forward") cfg.tie_break = DirectionTieBreak::PreferForward;
        else if (tb == "hash") cfg.tie_break = DirectionTieBreak::HashSplit;
        else throw config_error("db_tie_break must be forward or hash");
    }
}

int write_sweep_outputs(const SweepResult& sweep, const std::string& csv_path,
                        const std::string& summary_path) {
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw error("cannot write " + csv_path);
        write_connection_csv(csv, sweep);
    }
    std::string summary = sweep_summary_json(sweep).dump(2) + "\n";
    if (summary_path.empty() || summary_path == "-") {
        std::cout << summary;
    } else {
        std::ofstream out(summary_path, std::ios::binary);
        if (!out) throw error("cannot write " + summary_path);
        out << summary;
    }
    for (const CellResult& cell : sweep.cells)
        if (!cell.ok) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"De Bruijn data-center fabric toolkit"};
    app.require_subcommand(1);

    // compile
    auto* compile = app.add_subcommand("compile", "Print a switch's flow table");
    uint32_t c_d = 2, c_m = 3, c_hosts = 0;
    std::string c_switch, c_dir = "both";
    compile->add_option("--d", c_d, "Label radix")->capture_default_str();
    compile->add_option("--m", c_m, "Label length")->capture_default_str();
    compile->add_option("--switch", c_switch, "Switch label, e.g. 101")->required();
    compile->add_option("--dir", c_dir, "forward, reverse, or both")->capture_default_str();
    compile->add_option("--hosts-per-tor", c_hosts, "Hosts per switch (shifts uplink port numbers)")
        ->capture_default_str();

    // route
    auto* route = app.add_subcommand("route", "Shift route between two switches");
    uint32_t r_d = 2, r_m = 3;
    std::string r_src, r_dst;
    route->add_option("--d", r_d, "Label radix")->capture_default_str();
    route->add_option("--m", r_m, "Label length")->capture_default_str();
    route->add_option("--src", r_src, "Source switch label")->required();
    route->add_option("--dst", r_dst, "Destination switch label")->required();

    // trace
    auto* trace = app.add_subcommand("trace", "Walk a packet between two VMs");
    uint32_t t_d = 2, t_m = 3, t_hosts = 2, t_src_host = 0, t_dst_host = 0, t_repeat = 1;
    std::string t_src_tor, t_dst_tor, t_dir = "forward";
    trace->add_option("--d", t_d, "Label radix")->capture_default_str();
    trace->add_option("--m", t_m, "Label length")->capture_default_str();
    trace->add_option("--hosts-per-tor", t_hosts, "Hosts per switch")->capture_default_str();
    trace->add_option("--src-tor", t_src_tor, "Source switch label")->required();
    trace->add_option("--src-host", t_src_host, "Source host index")->capture_default_str();
    trace->add_option("--dst-tor", t_dst_tor, "Destination switch label")->required();
    trace->add_option("--dst-host", t_dst_host, "Destination host index")->capture_default_str();
    trace->add_option("--dir", t_dir, "forward or reverse")->capture_default_str();
    trace->add_option("--repeat", t_repeat, "Inject the packet N times")->capture_default_str();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run one throughput cell");
    std::string s_topology = "debruijn", s_routing = "dbrouting";
    uint32_t s_size = 8, s_hosts = 40, s_d = 2, s_spine = 4, s_uplinks = 4;
    uint64_t s_seed = 1;
    double s_host_bps = 1e9, s_uplink_bps = 1e10;
    std::string s_csv, s_summary;
    simulate->add_option("--topology", s_topology, "debruijn, leafspine, or random")
        ->capture_default_str();
    simulate->add_option("--routing", s_routing, "dbrouting or ecmp")->capture_default_str();
    simulate->add_option("--size", s_size, "Number of ToR switches")->capture_default_str();
    simulate->add_option("--hosts-per-tor", s_hosts, "Hosts per switch")->capture_default_str();
    simulate->add_option("--d", s_d, "De Bruijn radix")->capture_default_str();
    simulate->add_option("--n-spine", s_spine, "Spine count (leafspine)")->capture_default_str();
    simulate->add_option("--uplinks", s_uplinks, "Uplinks per switch (random)")
        ->capture_default_str();
    simulate->add_option("--seed", s_seed, "Run seed")->capture_default_str();
    simulate->add_option("--host-link-bps", s_host_bps, "Host link rate")->capture_default_str();
    simulate->add_option("--uplink-bps", s_uplink_bps, "Uplink rate")->capture_default_str();
    simulate->add_option("--csv", s_csv, "Per-connection CSV output path");
    simulate->add_option("--summary", s_summary, "Summary JSON path (default: stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a full (scheme x size x seed) grid");
    std::string w_config, w_csv = "sweep.csv", w_summary = "sweep_summary.json";
    std::vector<uint32_t> w_sizes;
    std::vector<std::string> w_schemes;
    std::vector<uint64_t> w_seeds;
    uint32_t w_hosts = 0;
    unsigned w_jobs = 0;
    sweep->add_option("--config", w_config, "JSON config file (see README for the schema)");
    sweep->add_option("--sizes", w_sizes, "ToR counts")->delimiter(',');
    sweep->add_option("--schemes", w_schemes,
                      "Schemes: ls/ecmp, random/ecmp, db/dbrouting, db/ecmp")
        ->delimiter(',');
    sweep->add_option("--seeds", w_seeds, "Seeds")->delimiter(',');
    sweep->add_option("--hosts-per-tor", w_hosts, "Hosts per switch");
    sweep->add_option("--jobs", w_jobs, "Worker threads");
    sweep->add_option("--csv", w_csv, "Per-connection CSV path")->capture_default_str();
    sweep->add_option("--summary", w_summary, "Summary JSON path")->capture_default_str();

    // export-fabric
    auto* exportf = app.add_subcommand("export-fabric", "Emit a fabric as JSON");
    std::string e_topology = "debruijn", e_out;
    uint32_t e_d = 2, e_m = 3, e_ntor = 8, e_spine = 4, e_uplinks = 4, e_hosts = 2;
    uint64_t e_seed = 1;
    double e_host_bps = 1e9, e_uplink_bps = 1e10;
    exportf->add_option("--topology", e_topology, "debruijn, leafspine, or random")
        ->capture_default_str();
    exportf->add_option("--d", e_d, "De Bruijn radix")->capture_default_str();
    exportf->add_option("--m", e_m, "De Bruijn label length")->capture_default_str();
    exportf->add_option("--n-tor", e_ntor, "Switch count (leafspine/random)")
        ->capture_default_str();
    exportf->add_option("--n-spine", e_spine, "Spine count (leafspine)")->capture_default_str();
    exportf->add_option("--uplinks", e_uplinks, "Uplinks per switch (random)")
        ->capture_default_str();
    exportf->add_option("--hosts-per-tor", e_hosts, "Hosts per switch")->capture_default_str();
    exportf->add_option("--seed", e_seed, "Wiring seed (random)")->capture_default_str();
    exportf->add_option("--host-link-bps", e_host_bps, "Host link rate")->capture_default_str();
    exportf->add_option("--uplink-bps", e_uplink_bps, "Uplink rate")->capture_default_str();
    exportf->add_option("--out", e_out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // 2 for every usage error, 0 for --help
    }

    try {
        if (compile->parsed()) return cmd_compile(c_d, c_m, c_switch, c_dir, c_hosts);
        if (route->parsed()) return cmd_route(r_d, r_m, r_src, r_dst);
        if (trace->parsed())
            return cmd_trace(t_d, t_m, t_hosts, t_src_tor, t_src_host, t_dst_tor, t_dst_host,
                             t_dir, t_repeat);
        if (simulate->parsed()) {
            std::string key = s_topology == "debruijn"  ? "db/" + s_routing
                              : s_topology == "leafspine" ? "ls/" + s_routing
                                                          : s_topology + "/" + s_routing;
            Scheme scheme = parse_scheme(key);
            SweepConfig cfg;
            cfg.sizes = {s_size};
            cfg.schemes = {scheme};
            cfg.seeds = {s_seed};
            cfg.hosts_per_tor = s_hosts;
            cfg.d = s_d;
            cfg.n_spine = s_spine;
            cfg.uplinks_per_tor = s_uplinks;
            cfg.host_link_bps = s_host_bps;
            cfg.uplink_bps = s_uplink_bps;
            return write_sweep_outputs(run_sweep(cfg), s_csv, s_summary);
        }
        if (sweep->parsed()) {
            SweepConfig cfg;
            if (!w_config.empty()) apply_json_config(cfg, w_config);
            if (!w_sizes.empty()) cfg.sizes = w_sizes;
            if (!w_schemes.empty()) {
                cfg.schemes.clear();
                for (const std::string& s : w_schemes) cfg.schemes.push_back(parse_scheme(s));
            }
            if (!w_seeds.empty()) cfg.seeds = w_seeds;
            if (w_hosts != 0) cfg.hosts_per_tor = w_hosts;
            if (w_jobs != 0) cfg.jobs = w_jobs;
            for (uint32_t size : cfg.sizes)
                for (Scheme scheme : cfg.schemes)
                    if (scheme == Scheme::DbDbRouting || scheme == Scheme::DbEcmp)
                        debruijn_length_for(size, cfg.d);  // reject non-power sizes up front
            return write_sweep_outputs(run_sweep(cfg), w_csv, w_summary);
        }
        if (exportf->parsed())
            return cmd_export_fabric(e_topology, e_d, e_m, e_ntor, e_spine, e_uplinks, e_hosts,
                                     e_seed, e_host_bps, e_uplink_bps, e_out);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const label_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
