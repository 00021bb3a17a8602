#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "librate/serialize.hpp"

namespace librate {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
    int schema_version = kSchemaVersion;
    ModelParams params;
    IntegratorOptions integrator;
    std::vector<std::string> pipeline;  // stages to run, in any order

    // reference family box
    double x0 = -0.9510055339445208;
    double py0 = -0.836804179646973;
    double a = -4.506866203376769;
    double box_r = 1e-9;
    double box_j0 = 1e-13;
    double box_j1 = 1e-12;

    // continuation chain around x0; the long run covers [x_min, x_max] instead
    int chain_count = 50;
    ContinuationOptions continuation;
    double long_x_min = 0.5 * (-1.0 + 0.0009537 - 0.933);
    double long_x_max = -0.933;

    std::string chart_source = "reference";  // or "fit"
    int chart_degree = 4;
    double chart_sigma = 0.1;

    FiberOptions fibers;
    double long_fiber_x_hi = 4.5e-6;
    int long_fiber_N = 1200;

    double probe_x_m = 4.461867506615821e-6;
    double probe_half_width = 1e-11;
    SlopeOptions slope;
    int long_slope_x_parts = 100;
    int long_slope_c_parts = 6;

    std::string output_dir = "librate-out";  // empty: keep everything in memory
    bool long_run = false;
    unsigned threads = 1;

    void validate() const;
};

// Unknown keys are rejected at every level; throws ConfigError.
RunConfig config_from_json(const json& j);
RunConfig load_config(const std::string& path);
json to_json(const RunConfig& c);

const std::vector<std::string>& stage_order();
// Stages needed to produce `target`, in dependency order.
std::vector<std::string> stages_up_to(const std::string& target);

struct StageReport {
    std::string stage;
    bool verified = false;
    std::size_t certificates = 0;
    double seconds = 0;
    std::string detail;
};

struct PipelineResult {
    std::vector<StageReport> stages;
    bool all_verified = true;

    std::vector<FamilyCertificate> family;
    double tube_radius = 0;
    std::vector<HyperbolicityCertificate> hyperbolicity;
    std::optional<Chart> chart;
    std::optional<FiberCertificate> fiber;
    std::optional<IntersectionCertificate> transversal;

    // JSON-lines per stage file name, exactly as written
    std::map<std::string, std::vector<std::string>> lines;
};

// Runs the selected stages in dependency order; a failed stage stops the ones after it.
// Stage errors are reported in the StageReport; ConfigError propagates.
PipelineResult run_pipeline(const RunConfig& config);

// Re-checks the inclusion conditions stored in one certificate line.
Verdict recheck_certificate(const json& envelope, const ModelParams& params);

// Writes <out_dir>/<what>.csv from the certificates under config.output_dir; returns the path.
std::string emit_plot_data(const RunConfig& config, const std::string& what, const std::string& out_dir);

}  // namespace librate
