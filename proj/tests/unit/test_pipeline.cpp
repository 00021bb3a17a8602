#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "librate/pipeline.hpp"

using namespace librate;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("librate_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("shortest decimals reload bit-exactly") {
    std::mt19937_64 g(3);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 20000; ++i) {
        std::uint64_t b = bits(g);
        double v;
        std::memcpy(&v, &b, sizeof v);
        if (!std::isfinite(v)) continue;
        const double back = parse_decimal(shortest_decimal(v));
        CHECK(std::memcmp(&v, &back, sizeof v) == 0);
    }
    CHECK(shortest_decimal(0.1) == "0.1");
    CHECK_THROWS_AS(parse_decimal("0.1x"), Error);

    const Interval a(-0.1, 1.0 / 3.0);
    const json j = to_json(a);
    CHECK(j["lo"] == "-0.1");
    CHECK(interval_from_json(j) == a);
}

TEST_CASE("certificate round trips") {
    FamilyCertificate f;
    f.box = FamilyBox::make(-0.9510055339445208, 1e-9, -0.836804179646973, -4.506866203376769, 1e-13, 1e-12);
    f.newton_set = Interval(-0.8368041796469777, -0.8368041796469491);
    f.kappa_slope = Interval(-4.506888219877993, -4.506844186960539);
    f.status = Verdict::fail(ErrorCode::SlopeFailed, "x");
    f.index = 7;
    const json j = to_json(f);
    CHECK(to_json(family_cert_from_json(j)) == j);

    Chart c = reference_chart(1466.05, Interval(3.0588828926432114, 3.0588829322956026));
    const json cj = to_json(c);
    const Chart back = chart_from_json(cj);
    CHECK(to_json(back) == cj);
    CHECK((back.C - c.C).norm() == 0.0);

    IntersectionCertificate ic;
    ic.probe.x_l = 1;
    ic.probe.x_m = 2;
    ic.probe.x_r = 3;
    ic.probe.B_c = IVector{Interval(0.0), Interval(0.0), Interval(0.0)};
    ic.probe.alpha = 2.56e-6;
    ic.status = Verdict::ok();
    CHECK(to_json(intersection_cert_from_json(to_json(ic))) == to_json(ic));

    CHECK(error_code_from_name("ChainGap") == ErrorCode::ChainGap);
    CHECK_THROWS_AS(error_code_from_name("Nope"), Error);
    CHECK(fnv1a("") == 14695981039346656037ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("config schema") {
    const RunConfig d = config_from_json(json::object());
    CHECK(d.params.mu == 0.0009537);
    CHECK(d.chain_count == 50);
    CHECK(config_from_json(to_json(d)).chain_count == 50);

    CHECK_THROWS_AS(config_from_json(json{{"mu", 0.6}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"mu", 0.0}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"schema_version", 2}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"colour", 1}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"fibers", {{"N", 10}, {"n", 10}}}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"pipeline", {"family", "nope"}}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"threads", "four"}}), Error);
    try {
        config_from_json(json{{"mu", 0.6}});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }

    const RunConfig shipped = load_config(LIBRATE_SOURCE_DIR "/configs/oterma.json");
    CHECK(shipped.fibers.N == 150);
    CHECK(shipped.probe_x_m == 4.461867506615821e-6);
    CHECK_THROWS_AS(load_config("/nonexistent/librate.json"), Error);

    CHECK(stages_up_to("hyperbolicity") == std::vector<std::string>{"family", "hyperbolicity"});
    CHECK(stages_up_to("transversal").size() == 5);
    CHECK_THROWS_AS(stages_up_to("everything"), Error);
}

TEST_CASE("empty pipeline is a no-op") {
    RunConfig c;
    c.output_dir = scratch("noop").string();
    PipelineResult r = run_pipeline(c);
    CHECK(r.all_verified);
    CHECK(r.stages.empty());
    CHECK_FALSE(fs::exists(c.output_dir));
}

TEST_CASE("hyperbolicity pipeline writes re-checkable certificates") {
    RunConfig c;
    c.chain_count = 3;
    c.pipeline = {"hyperbolicity"};
    c.output_dir = scratch("hyp").string();
    PipelineResult r = run_pipeline(c);
    REQUIRE(r.stages.size() == 2);
    CHECK(r.all_verified);
    CHECK(r.family.size() == 4);
    CHECK(r.hyperbolicity.size() == 4);

    for (const char* stage : {"family", "hyperbolicity"}) {
        std::ifstream in(fs::path(c.output_dir) / (std::string(stage) + ".jsonl"));
        std::string line;
        int n = 0;
        while (std::getline(in, line)) {
            const json env = json::parse(line);
            CHECK(env["schema_version"] == kSchemaVersion);
            CHECK(recheck_certificate(env, c.params).verified);
            // tampering is caught
            json bad = env;
            bad["outputs"]["status"] = {{"verified", true}};
            if (std::string(stage) == "family") bad["outputs"]["newton_set"] = to_json(Interval(0.0, 1.0));
            else bad["outputs"]["lambda1"] = to_json(Interval(0.5));
            CHECK_FALSE(recheck_certificate(bad, c.params).verified);
            bad["hash"] = hash_hex(bad["outputs"]);
            CHECK_FALSE(recheck_certificate(bad, c.params).verified);
            ++n;
        }
        CHECK(n == 4);
    }
    CHECK(r.lines.at("family.jsonl").size() == 4);

    const fs::path plots = scratch("plots");
    const std::string fam = emit_plot_data(c, "family", plots.string());
    std::ifstream in(fam);
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "x,kappa_lo,kappa_hi");
    int rows = 0;
    while (std::getline(in, row)) {
        const double lo = std::stod(row.substr(row.find(',') + 1));
        const double hi = std::stod(row.substr(row.rfind(',') + 1));
        CHECK(hi - lo <= 1e-12);
        ++rows;
    }
    CHECK(rows == 4);
    CHECK_THROWS_AS(emit_plot_data(c, "fibers", plots.string()), Error);
    CHECK_THROWS_AS(emit_plot_data(c, "teapot", plots.string()), Error);
}

TEST_CASE("failed stage stops the pipeline") {
    RunConfig c;
    c.chain_count = 0;
    c.py0 += 1e-3;
    c.pipeline = {"fibers"};
    c.output_dir.clear();
    PipelineResult r = run_pipeline(c);
    CHECK_FALSE(r.all_verified);
    REQUIRE(r.stages.size() == 1);
    CHECK(r.stages[0].stage == "family");
    CHECK_FALSE(r.stages[0].verified);
    CHECK_FALSE(r.fiber.has_value());
}
