#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "librate/librate.h"

namespace {

int report(librate_status st, librate_result* res) {
    if (res) {
        for (size_t i = 0; i < librate_result_stage_count(res); ++i) {
            const char *name = nullptr, *detail = nullptr;
            int ok = 0;
            size_t n = 0;
            double secs = 0;
            librate_result_stage(res, i, &name, &ok, &n, &secs, &detail);
            std::printf("%-14s %-12s %6zu certificate(s) %9.2f s%s%s\n", name, ok ? "VERIFIED" : "FAILED", n, secs,
                        ok ? "" : "  ", ok ? "" : detail);
        }
        std::printf("%s\n", librate_result_summary(res));
        librate_result_free(res);
    }
    if (st != LIBRATE_OK && st != LIBRATE_NOT_VERIFIED) std::fprintf(stderr, "librate: %s\n", librate_last_error());
    return st == LIBRATE_OK ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Validated enclosures for the Lyapunov family near L2 of the planar restricted three-body problem"};
    app.require_subcommand(1);
    app.set_version_flag("--version", librate_version());

    std::string config_path, out_dir;
    bool long_run = false;
    unsigned threads = 1;

    auto* prove = app.add_subcommand("prove", "Run a proof stage together with the stages it depends on");
    std::string stage;
    prove->add_option("stage", stage, "Stage to certify")
        ->required()
        ->check(CLI::IsMember({"family", "hyperbolicity", "fibers", "transversal"}));
    prove->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    prove->add_flag("--long-run", long_run, "Full-size computations");
    prove->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    prove->add_option("--out", out_dir, "Certificate directory (overrides output_dir)");

    auto* plot = app.add_subcommand("plot", "Export CSV data from stored certificates");
    std::string what;
    plot->add_option("--what", what, "Plot kind")
        ->required()
        ->check(CLI::IsMember({"hill", "family", "slopes", "fibers", "section"}));
    plot->add_option("--out", out_dir, "Directory for the CSV file")->required();
    std::string certs_dir;
    plot->add_option("--certs", certs_dir, "Certificate directory (overrides output_dir)");
    plot->add_option("--config", config_path, "JSON run configuration (locates the certificates)")
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    librate_config* cfg = nullptr;
    if (librate_config_load(config_path.empty() ? nullptr : config_path.c_str(), &cfg) != LIBRATE_OK) {
        std::fprintf(stderr, "librate: %s\n", librate_last_error());
        return 2;
    }

    int code = 0;
    if (*prove) {
        librate_config_set_long_run(cfg, long_run ? 1 : 0);
        librate_config_set_threads(cfg, threads);
        if (!out_dir.empty()) librate_config_set_output_dir(cfg, out_dir.c_str());
        librate_result* res = nullptr;
        const librate_status st = librate_prove(cfg, stage.c_str(), &res);
        code = report(st, res);
    } else {
        if (!certs_dir.empty()) librate_config_set_output_dir(cfg, certs_dir.c_str());
        librate_status st = librate_plot(cfg, what.c_str(), out_dir.c_str());
        if (st != LIBRATE_OK) {
            std::fprintf(stderr, "librate: %s\n", librate_last_error());
            code = 1;
        } else {
            std::printf("%s/%s.csv\n", out_dir.c_str(), what.c_str());
        }
    }
    librate_config_free(cfg);
    return code;
}
