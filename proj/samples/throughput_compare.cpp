// Compare mean throughput of the four scheme/topology combinations at one
// size, mirroring what `debfab sweep` does across a grid.

#include <cstdio>

#include "debfab/experiment.hpp"

int main() {
    using namespace debfab;

    for (Scheme scheme : {Scheme::LsEcmp, Scheme::RandomEcmp, Scheme::DbEcmp,
                          Scheme::DbDbRouting}) {
        CellConfig cfg;
        cfg.scheme = scheme;
        cfg.n_tor = 16;
        cfg.hosts_per_tor = 40;
        cfg.seed = 1;
        CellResult cell = run_cell(cfg);
        if (!cell.ok) {
            std::printf("%-14s failed: %s\n", to_string(scheme).c_str(), cell.error.c_str());
            continue;
        }
        std::printf("%-14s mean %8.1f Mbit/s   mean path %.2f hops\n", to_string(scheme).c_str(),
                    cell.metrics.mean_rate_bps / 1e6, cell.metrics.mean_path_len);
    }
    return 0;
}
