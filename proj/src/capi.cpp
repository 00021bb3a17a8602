#include "librate/librate.h"

#include <string>

#include "librate/pipeline.hpp"

using namespace librate;

struct librate_config {
    RunConfig cfg;
};

struct librate_result {
    PipelineResult res;
    std::string summary;
};

namespace {

thread_local std::string g_last_error;

librate_status fail(librate_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

librate_status map_error(const Error& e) {
    switch (e.code()) {
        case ErrorCode::ConfigError: return fail(LIBRATE_E_CONFIG, e.what());
        case ErrorCode::IOError: return fail(LIBRATE_E_IO, e.what());
        case ErrorCode::MissingCertificate: return fail(LIBRATE_E_MISSING_CERTIFICATE, e.what());
        case ErrorCode::InvalidArgument: return fail(LIBRATE_E_ARGUMENT, e.what());
        default: return fail(LIBRATE_E_INTERNAL, e.what());
    }
}

template <typename F>
librate_status guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        return map_error(e);
    } catch (const std::exception& e) {
        return fail(LIBRATE_E_INTERNAL, e.what());
    } catch (...) {
        return fail(LIBRATE_E_INTERNAL, "unknown exception");
    }
}

json summarize(const PipelineResult& r) {
    json s = {{"verified", r.all_verified}};
    json stages = json::array();
    for (const auto& st : r.stages)
        stages.push_back({{"stage", st.stage}, {"verified", st.verified}, {"certificates", st.certificates},
                          {"detail", st.detail}});
    s["stages"] = stages;
    if (!r.family.empty()) {
        const auto& f = r.family.front();
        s["family"] = {{"kappa_slope", to_json(f.kappa_slope)}, {"dH_dx", to_json(f.dH_dx)},
                       {"chain_boxes", r.family.size() - 1}, {"tube_radius", shortest_decimal(r.tube_radius)}};
    }
    if (!r.hyperbolicity.empty()) {
        const auto& h = r.hyperbolicity.front();
        s["hyperbolicity"] = {{"lambda1", to_json(h.lambda1)}, {"lambda2", to_json(h.lambda2)},
                              {"return_time", to_json(h.return_time)}};
    }
    if (r.fiber) {
        s["fibers"] = {{"x_hi", shortest_decimal(r.fiber->box.x_hi)}, {"N", r.fiber->box.N},
                       {"DF11", to_json(r.fiber->DF(0, 0))}, {"cone", to_json(r.fiber->cone)}};
    }
    if (r.transversal && r.transversal->slope_parts > 0) {
        s["transversal"] = {{"slope_a", to_json(r.transversal->slope_a)},
                            {"angle_deg", to_json(r.transversal->angle_deg)},
                            {"parts", r.transversal->slope_parts}};
    }
    return s;
}

librate_status run_into(const RunConfig& cfg, librate_result** out) {
    auto* res = new librate_result{run_pipeline(cfg), {}};
    res->summary = summarize(res->res).dump();
    *out = res;
    if (!res->res.all_verified) {
        g_last_error = res->res.stages.empty() ? "" : res->res.stages.back().detail;
        return LIBRATE_NOT_VERIFIED;
    }
    return LIBRATE_OK;
}

}  // namespace

extern "C" {

const char* librate_version(void) { return "0.1.0"; }

const char* librate_last_error(void) { return g_last_error.c_str(); }

librate_status librate_config_load(const char* path, librate_config** out) {
    if (!out) return fail(LIBRATE_E_ARGUMENT, "out is NULL");
    return guarded([&] {
        *out = new librate_config{path ? load_config(path) : RunConfig{}};
        return LIBRATE_OK;
    });
}

void librate_config_free(librate_config* cfg) { delete cfg; }

librate_status librate_config_set_long_run(librate_config* cfg, int long_run) {
    if (!cfg) return fail(LIBRATE_E_ARGUMENT, "cfg is NULL");
    cfg->cfg.long_run = long_run != 0;
    return LIBRATE_OK;
}

librate_status librate_config_set_threads(librate_config* cfg, unsigned threads) {
    if (!cfg) return fail(LIBRATE_E_ARGUMENT, "cfg is NULL");
    cfg->cfg.threads = threads;
    return LIBRATE_OK;
}

librate_status librate_config_set_output_dir(librate_config* cfg, const char* dir) {
    if (!cfg || !dir) return fail(LIBRATE_E_ARGUMENT, "NULL argument");
    cfg->cfg.output_dir = dir;
    return LIBRATE_OK;
}

librate_status librate_config_set_pipeline(librate_config* cfg, const char* stages) {
    if (!cfg || !stages) return fail(LIBRATE_E_ARGUMENT, "NULL argument");
    return guarded([&] {
        std::vector<std::string> list;
        std::string s(stages), cur;
        for (char ch : s + ",") {
            if (ch == ',') {
                if (!cur.empty()) list.push_back(cur);
                cur.clear();
            } else if (ch != ' ') {
                cur += ch;
            }
        }
        RunConfig next = cfg->cfg;
        next.pipeline = list;
        next.validate();
        cfg->cfg = next;
        return LIBRATE_OK;
    });
}

librate_status librate_prove(const librate_config* cfg, const char* stage, librate_result** out) {
    if (!cfg || !stage || !out) return fail(LIBRATE_E_ARGUMENT, "NULL argument");
    *out = nullptr;
    return guarded([&] {
        RunConfig c = cfg->cfg;
        c.pipeline = stages_up_to(stage);
        return run_into(c, out);
    });
}

librate_status librate_run(const librate_config* cfg, librate_result** out) {
    if (!cfg || !out) return fail(LIBRATE_E_ARGUMENT, "NULL argument");
    *out = nullptr;
    return guarded([&] { return run_into(cfg->cfg, out); });
}

void librate_result_free(librate_result* res) { delete res; }

int librate_result_verified(const librate_result* res) { return res && res->res.all_verified ? 1 : 0; }

size_t librate_result_stage_count(const librate_result* res) { return res ? res->res.stages.size() : 0; }

librate_status librate_result_stage(const librate_result* res, size_t i, const char** name, int* verified,
                                    size_t* certificates, double* seconds, const char** detail) {
    if (!res || i >= res->res.stages.size()) return fail(LIBRATE_E_ARGUMENT, "stage index out of range");
    const StageReport& s = res->res.stages[i];
    if (name) *name = s.stage.c_str();
    if (verified) *verified = s.verified ? 1 : 0;
    if (certificates) *certificates = s.certificates;
    if (seconds) *seconds = s.seconds;
    if (detail) *detail = s.detail.c_str();
    return LIBRATE_OK;
}

const char* librate_result_summary(const librate_result* res) { return res ? res->summary.c_str() : "{}"; }

librate_status librate_plot(const librate_config* cfg, const char* what, const char* out_dir) {
    if (!cfg || !what || !out_dir) return fail(LIBRATE_E_ARGUMENT, "NULL argument");
    return guarded([&] {
        emit_plot_data(cfg->cfg, what, out_dir);
        return LIBRATE_OK;
    });
}

}  // extern "C"
