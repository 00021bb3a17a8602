#include "librate/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "librate/parallel.hpp"

namespace librate {

namespace fs = std::filesystem;

void RunConfig::validate() const {
    if (schema_version != kSchemaVersion)
        throw Error(ErrorCode::ConfigError, "unsupported schema_version " + std::to_string(schema_version));
    if (!(params.mu > 0.0 && params.mu < 0.5)) throw Error(ErrorCode::ConfigError, "mu must lie in (0, 1/2)");
    for (const auto& s : pipeline)
        if (std::find(stage_order().begin(), stage_order().end(), s) == stage_order().end())
            throw Error(ErrorCode::ConfigError, "unknown stage " + s);
    if (chart_source != "reference" && chart_source != "fit")
        throw Error(ErrorCode::ConfigError, "chart.source must be reference or fit");
    if (chain_count < 0) throw Error(ErrorCode::ConfigError, "family.chain_count must be non-negative");
    if (!(box_r > 0 && box_j0 > 0 && box_j1 >= box_j0)) throw Error(ErrorCode::ConfigError, "bad reference box radii");
    if (!(long_x_min < long_x_max)) throw Error(ErrorCode::ConfigError, "long_x_min must be below long_x_max");
    if (!(fibers.alpha > 0 && fibers.x_lo < fibers.x_hi && fibers.N > 0 && fibers.m > 1))
        throw Error(ErrorCode::ConfigError, "bad fiber options");
    if (!(long_fiber_x_hi > fibers.x_lo && long_fiber_N > 0)) throw Error(ErrorCode::ConfigError, "bad long fiber options");
    if (!(probe_half_width > 0)) throw Error(ErrorCode::ConfigError, "probe half width must be positive");
    if (slope.x_parts < 1 || slope.c_parts < 1 || long_slope_x_parts < 1 || long_slope_c_parts < 1)
        throw Error(ErrorCode::ConfigError, "slope subdivisions must be positive");
    try {
        integrator.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
}

namespace {

class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw Error(ErrorCode::ConfigError, where_ + " must be an object");
    }
    ~Reader() noexcept(false) {
        if (std::uncaught_exceptions()) return;
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw Error(ErrorCode::ConfigError, "unknown key " + where_ + it.key());
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ConfigError, where_ + key + ": " + e.what());
        }
    }
    const json* sub(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

std::string toolchain() {
    std::string s = "g++ " __VERSION__;
#ifdef __FMA__
    s += " fma";
#endif
    return s;
}

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json integrator_json(const IntegratorOptions& o) {
    return {{"taylor_order", o.taylor_order}, {"abs_tolerance", o.abs_tolerance}, {"max_step", o.max_step},
            {"min_step", o.min_step},         {"width_cap", o.width_cap},         {"max_steps", o.max_steps}};
}

}  // namespace

RunConfig config_from_json(const json& j) {
    RunConfig c;
    {
        Reader r(j, "");
        r.get("schema_version", c.schema_version);
        r.get("mu", c.params.mu);
        r.get("pipeline", c.pipeline);
        r.get("output_dir", c.output_dir);
        r.get("long_run", c.long_run);
        r.get("threads", c.threads);
        if (const json* s = r.sub("integrator")) {
            Reader q(*s, "integrator.");
            q.get("taylor_order", c.integrator.taylor_order);
            q.get("abs_tolerance", c.integrator.abs_tolerance);
            q.get("max_step", c.integrator.max_step);
            q.get("min_step", c.integrator.min_step);
            q.get("width_cap", c.integrator.width_cap);
            q.get("max_steps", c.integrator.max_steps);
        }
        if (const json* s = r.sub("family")) {
            Reader q(*s, "family.");
            q.get("x0", c.x0);
            q.get("py0", c.py0);
            q.get("a", c.a);
            q.get("box_r", c.box_r);
            q.get("box_j0", c.box_j0);
            q.get("box_j1", c.box_j1);
            q.get("chain_count", c.chain_count);
            q.get("r", c.continuation.r);
            q.get("j0_rad", c.continuation.j0_rad);
            q.get("j1_rad", c.continuation.j1_rad);
            q.get("min_overlap", c.continuation.min_overlap);
            q.get("long_x_min", c.long_x_min);
            q.get("long_x_max", c.long_x_max);
        }
        if (const json* s = r.sub("chart")) {
            Reader q(*s, "chart.");
            q.get("source", c.chart_source);
            q.get("degree", c.chart_degree);
            q.get("sigma", c.chart_sigma);
        }
        if (const json* s = r.sub("fibers")) {
            Reader q(*s, "fibers.");
            q.get("alpha", c.fibers.alpha);
            q.get("x_lo", c.fibers.x_lo);
            q.get("x_hi", c.fibers.x_hi);
            q.get("N", c.fibers.N);
            q.get("m", c.fibers.m);
            q.get("long_x_hi", c.long_fiber_x_hi);
            q.get("long_N", c.long_fiber_N);
        }
        if (const json* s = r.sub("transversal")) {
            Reader q(*s, "transversal.");
            q.get("x_m", c.probe_x_m);
            q.get("half_width", c.probe_half_width);
            q.get("x_parts", c.slope.x_parts);
            q.get("c_parts", c.slope.c_parts);
            q.get("long_x_parts", c.long_slope_x_parts);
            q.get("long_c_parts", c.long_slope_c_parts);
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IOError, "cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, path + ": " + e.what());
    }
    return config_from_json(j);
}

json to_json(const RunConfig& c) {
    return {{"schema_version", c.schema_version},
            {"mu", c.params.mu},
            {"pipeline", c.pipeline},
            {"output_dir", c.output_dir},
            {"long_run", c.long_run},
            {"threads", c.threads},
            {"integrator", integrator_json(c.integrator)},
            {"family",
             {{"x0", c.x0},
              {"py0", c.py0},
              {"a", c.a},
              {"box_r", c.box_r},
              {"box_j0", c.box_j0},
              {"box_j1", c.box_j1},
              {"chain_count", c.chain_count},
              {"r", c.continuation.r},
              {"j0_rad", c.continuation.j0_rad},
              {"j1_rad", c.continuation.j1_rad},
              {"min_overlap", c.continuation.min_overlap},
              {"long_x_min", c.long_x_min},
              {"long_x_max", c.long_x_max}}},
            {"chart", {{"source", c.chart_source}, {"degree", c.chart_degree}, {"sigma", c.chart_sigma}}},
            {"fibers",
             {{"alpha", c.fibers.alpha},
              {"x_lo", c.fibers.x_lo},
              {"x_hi", c.fibers.x_hi},
              {"N", c.fibers.N},
              {"m", c.fibers.m},
              {"long_x_hi", c.long_fiber_x_hi},
              {"long_N", c.long_fiber_N}}},
            {"transversal",
             {{"x_m", c.probe_x_m},
              {"half_width", c.probe_half_width},
              {"x_parts", c.slope.x_parts},
              {"c_parts", c.slope.c_parts},
              {"long_x_parts", c.long_slope_x_parts},
              {"long_c_parts", c.long_slope_c_parts}}}};
}

const std::vector<std::string>& stage_order() {
    static const std::vector<std::string> order = {"family", "hyperbolicity", "chart", "fibers", "transversal"};
    return order;
}

std::vector<std::string> stages_up_to(const std::string& target) {
    const auto& order = stage_order();
    auto it = std::find(order.begin(), order.end(), target);
    if (it == order.end()) throw Error(ErrorCode::ConfigError, "unknown stage " + target);
    return std::vector<std::string>(order.begin(), it + 1);
}

namespace {

std::vector<FamilySeed> chain_seeds(const RunConfig& c) {
    const double h = 2 * c.continuation.r * (1.0 - c.continuation.min_overlap);
    std::vector<double> left, right;
    if (c.long_run) {
        for (double x = c.x0; x - c.continuation.r > c.long_x_min; x -= h) left.push_back(x);
        left.push_back(left.back() - h);
        for (double x = c.x0 + h;; x += h) {
            right.push_back(x);
            if (x + c.continuation.r >= c.long_x_max) break;
        }
    } else {
        if (c.chain_count == 0) return {};
        const int n_left = c.chain_count / 2;
        for (int i = 0; i <= n_left; ++i) left.push_back(c.x0 - i * h);
        for (int i = 1; i < c.chain_count - n_left; ++i) right.push_back(c.x0 + i * h);
    }
    std::vector<FamilySeed> seeds = generate_seeds(left, c.py0, c.params);
    std::reverse(seeds.begin(), seeds.end());
    if (!right.empty()) {
        std::vector<FamilySeed> r = generate_seeds(right, c.py0 + c.a * h, c.params);
        seeds.insert(seeds.end(), r.begin(), r.end());
    }
    return seeds;
}

json config_inputs(const RunConfig& c) {
    json j = to_json(c);
    j.erase("threads");
    j.erase("output_dir");
    j.erase("pipeline");
    return j;
}

class Runner {
public:
    explicit Runner(const RunConfig& c) : c_(c), inputs_(config_inputs(c)), inputs_hash_(hash_hex(inputs_)) {}

    PipelineResult run() {
        std::set<std::string> want(c_.pipeline.begin(), c_.pipeline.end());
        std::size_t last = 0;
        bool any = false;
        for (std::size_t i = 0; i < stage_order().size(); ++i)
            if (want.count(stage_order()[i])) {
                last = i;
                any = true;
            }
        if (!any) return std::move(out_);
        if (!c_.output_dir.empty()) {
            std::error_code ec;
            fs::create_directories(c_.output_dir, ec);
            if (ec) throw Error(ErrorCode::IOError, "cannot create " + c_.output_dir + ": " + ec.message());
        }
        for (std::size_t i = 0; i <= last; ++i) {
            const std::string& s = stage_order()[i];
            StageReport rep;
            rep.stage = s;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                if (s == "family") family(rep);
                else if (s == "hyperbolicity") hyperbolicity(rep);
                else if (s == "chart") chart(rep);
                else if (s == "fibers") fibers(rep);
                else transversal(rep);
            } catch (const Error& e) {
                rep.verified = false;
                rep.detail = e.what();
            }
            rep.seconds = since(t0);
            flush(s);
            write_timing(rep);
            out_.stages.push_back(rep);
            if (!rep.verified) {
                out_.all_verified = false;
                break;
            }
        }
        return std::move(out_);
    }

private:
    void emit(const std::string& stage, const char* kind, json inputs, json outputs, std::size_t index = 0) {
        inputs["config_hash"] = inputs_hash_;
        json env = {{"kind", kind},          {"schema_version", kSchemaVersion}, {"index", index},
                    {"inputs", std::move(inputs)}, {"outputs", std::move(outputs)}, {"toolchain", toolchain()}};
        env["hash"] = hash_hex(env["outputs"]);
        out_.lines[stage + ".jsonl"].push_back(env.dump());
    }

    void flush(const std::string& stage) {
        if (c_.output_dir.empty()) return;
        const std::string name = stage + ".jsonl";
        std::ofstream f(fs::path(c_.output_dir) / name, std::ios::trunc);
        if (!f) throw Error(ErrorCode::IOError, "cannot write " + name);
        for (const auto& l : out_.lines[name]) f << l << '\n';
    }

    void write_timing(const StageReport& rep) {
        if (c_.output_dir.empty()) return;
        std::ofstream f(fs::path(c_.output_dir) / "timing.jsonl", std::ios::app);
        f << json{{"stage", rep.stage}, {"seconds", rep.seconds}, {"verified", rep.verified}, {"threads", c_.threads}}.dump()
          << '\n';
    }

    const FamilyCertificate& reference() const { return out_.family.front(); }

    void family(StageReport& rep) {
        FamilyCertificate ref =
            verify_family_box(FamilyBox::make(c_.x0, c_.box_r, c_.py0, c_.a, c_.box_j0, c_.box_j1), c_.params, c_.integrator);
        if (ref.status.verified) energy_foliation(ref, c_.params);
        out_.family.push_back(ref);
        emit("family", "Family", {{"role", "reference"}}, to_json(ref));
        rep.verified = ref.status.verified && ref.dH_dx.negative();
        if (!ref.status.verified) rep.detail = "reference box: " + ref.status.detail;
        else if (!ref.dH_dx.negative()) rep.detail = "energy foliation sign not certified";

        ContinuationOptions co = c_.continuation;
        co.threads = c_.threads;
        ContinuationResult chain = continue_family(chain_seeds(c_), co, c_.params, c_.integrator);
        out_.tube_radius = chain.tube_radius;
        for (auto& cert : chain.certs) {
            if (cert.status.verified) energy_foliation(cert, c_.params);
            emit("family", "Family", {{"role", "chain"}, {"tube_radius", shortest_decimal(chain.tube_radius)}}, to_json(cert),
                 cert.index);
            out_.family.push_back(cert);
        }
        if (!chain.all_verified && rep.verified) {
            rep.verified = false;
            for (const auto& cert : chain.certs)
                if (!cert.status.verified) {
                    rep.detail = "chain box " + std::to_string(cert.index) + ": " + cert.status.detail;
                    break;
                }
        }
        if (c_.long_run && rep.verified && !(chain.tube_radius <= 5e-8)) {
            rep.verified = false;
            rep.detail = "tube radius " + shortest_decimal(chain.tube_radius) + " exceeds 5e-8";
        }
        rep.certificates = out_.family.size();
    }

    void hyperbolicity(StageReport& rep) {
        std::vector<HyperbolicityCertificate> h(out_.family.size());
        parallel_for(h.size(), c_.threads, [&](std::size_t i) {
            h[i] = verify_hyperbolicity(out_.family[i], c_.params, c_.integrator);
            h[i].index = out_.family[i].index;
        });
        rep.verified = true;
        for (std::size_t i = 0; i < h.size(); ++i) {
            emit("hyperbolicity", "Hyperbolicity", {{"role", i == 0 ? "reference" : "chain"}, {"family_hash", hash_hex(to_json(out_.family[i]))}},
                 to_json(h[i]), h[i].index);
            if (!h[i].status.verified && rep.verified) {
                rep.verified = false;
                rep.detail = "box " + std::to_string(i) + ": " + h[i].status.detail;
            }
        }
        out_.hyperbolicity = std::move(h);
        rep.certificates = out_.hyperbolicity.size();
    }

    void chart(StageReport& rep) {
        const HyperbolicityCertificate& h = out_.hyperbolicity.front();
        Chart ch = c_.chart_source == "fit" ? fit_chart(reference(), c_.params, c_.chart_degree, c_.chart_sigma)
                                            : reference_chart(h.lambda1.mid(), h.return_time);
        if (c_.chart_source == "fit") ch.T = h.return_time;
        emit("chart", "Chart", {{"source", c_.chart_source}, {"family_hash", hash_hex(to_json(reference()))}}, to_json(ch));
        out_.chart = std::move(ch);
        rep.verified = true;
        rep.certificates = 1;
    }

    bool need_cover() const {
        return c_.long_run || std::find(c_.pipeline.begin(), c_.pipeline.end(), "transversal") != c_.pipeline.end();
    }

    void fibers(StageReport& rep) {
        FiberOptions fo = c_.fibers;
        fo.threads = c_.threads;
        if (need_cover()) {
            fo.x_hi = std::max(fo.x_hi, c_.long_fiber_x_hi);
            fo.N = std::max(fo.N, c_.long_fiber_N);
        }
        const IVector B0 = enclose_B0(*out_.chart, reference());
        FiberCertificate f = enclose_fibers(*out_.chart, B0, fo, c_.params, c_.integrator);
        emit("fibers", "Fiber", {{"chart_hash", hash_hex(to_json(*out_.chart))}, {"family_hash", hash_hex(to_json(reference()))}},
             to_json(f));
        rep.verified = f.status.verified;
        rep.detail = f.status.detail;
        rep.certificates = 1;
        out_.fiber = std::move(f);
    }

    void transversal(StageReport& rep) {
        const SectionProbe probe = SectionProbe::make(c_.probe_x_m, c_.probe_half_width, out_.fiber->box);
        SlopeOptions so = c_.slope;
        if (c_.long_run) {
            so.x_parts = c_.long_slope_x_parts;
            so.c_parts = c_.long_slope_c_parts;
        }
        so.threads = c_.threads;
        IntersectionCertificate ic = certify_transversal(probe, *out_.chart, *out_.fiber, reference(),
                                                         out_.hyperbolicity.front(), c_.params, c_.integrator, so);
        emit("transversal", "Transversal",
             {{"chart_hash", hash_hex(to_json(*out_.chart))},
              {"probe_hash", hash_hex(to_json(probe))},
              {"family_hash", hash_hex(to_json(reference()))},
              {"fiber_hash", hash_hex(to_json(*out_.fiber))}},
             to_json(ic));
        rep.verified = ic.status.verified;
        rep.detail = ic.status.detail;
        rep.certificates = 1;
        out_.transversal = std::move(ic);
    }

    const RunConfig& c_;
    json inputs_;
    std::string inputs_hash_;
    PipelineResult out_;
};

Interval width_of(const Interval& a) { return Interval(a.hi()) - Interval(a.lo()); }

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
    config.validate();
    return Runner(config).run();
}

Verdict recheck_certificate(const json& env, const ModelParams& params) {
    (void)params;
    try {
        const std::string kind = env.at("kind").get<std::string>();
        const json& o = env.at("outputs");
        if (env.at("hash").get<std::string>() != hash_hex(o)) return Verdict::fail(ErrorCode::ConfigError, "hash mismatch");
        if (kind == "Family") {
            const FamilyCertificate c = family_cert_from_json(o);
            if (!c.status.verified) return c.status;
            if (!c.newton_set.subset_of(c.box.J0)) return Verdict::fail(ErrorCode::NewtonFailed, "N not inside J0");
            const Interval margin = (width_of(c.box.J1) - width_of(c.box.J0)) / width_of(c.box.I);
            if (!(abs(c.kappa_slope - Interval(c.box.a)).hi() < margin.lo()))
                return Verdict::fail(ErrorCode::SlopeFailed, "slope condition fails");
            return Verdict::ok();
        }
        if (kind == "Hyperbolicity") {
            const HyperbolicityCertificate c = hyperbolicity_cert_from_json(o);
            if (!c.status.verified) return c.status;
            const Eig2 e = eig2_real_unimodular(c.B_mat(0, 0) + c.B_mat(1, 1));
            if (!e.verified_real_split || !(e.lambda1.mig() > 1.0 && e.lambda2.mag() < 1.0))
                return Verdict::fail(ErrorCode::EigSplitFailed, "eigenvalue split not reproduced");
            if (!meet(e.lambda1, c.lambda1) || !meet(e.lambda2, c.lambda2))
                return Verdict::fail(ErrorCode::EigSplitFailed, "stored eigenvalues disagree with B");
            return Verdict::ok();
        }
        if (kind == "Chart") {
            chart_from_json(o);
            return Verdict::ok();
        }
        if (kind == "Fiber") {
            const FiberCertificate c = fiber_cert_from_json(o);
            if (!c.status.verified) return c.status;
            ConeForm cone{c.box.alpha, 3};
            ConeCertificate cc = certify_unstable_disc(c.DF, cone, c.cone.m);
            if (!cc.status.verified) return cc.status;
            if (static_cast<int>(c.images.size()) != c.box.N)
                return Verdict::fail(ErrorCode::MissingCertificate, "slab images missing");
            return Verdict::ok();
        }
        if (kind == "Transversal") {
            const IntersectionCertificate c = intersection_cert_from_json(o);
            if (!c.status.verified) return c.status;
            if (!(c.left_image[PX].negative() && c.right_image[PX].positive()))
                return Verdict::fail(ErrorCode::SignUndecided, "edge images not separated by px = 0");
            if (!c.slope_a.positive()) return Verdict::fail(ErrorCode::SignUndecided, "slope not positive");
            if (!transversal_angle_deg(c.slope_a).subset_of(c.angle_deg))
                return Verdict::fail(ErrorCode::InvalidArgument, "angle does not match slope");
            return Verdict::ok();
        }
        return Verdict::fail(ErrorCode::ConfigError, "unknown certificate kind " + kind);
    } catch (const Error& e) {
        return Verdict::from(e);
    } catch (const json::exception& e) {
        return Verdict::fail(ErrorCode::ConfigError, e.what());
    }
}

namespace {

std::vector<json> read_lines(const RunConfig& c, const std::string& stage) {
    const fs::path p = fs::path(c.output_dir) / (stage + ".jsonl");
    std::ifstream in(p);
    if (!in) throw Error(ErrorCode::MissingCertificate, "no certificates at " + p.string());
    std::vector<json> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(json::parse(line));
    if (out.empty()) throw Error(ErrorCode::MissingCertificate, p.string() + " is empty");
    return out;
}

std::string d(double v) { return shortest_decimal(v); }

void hill_csv(std::ostream& os, const RunConfig& c) {
    const State q0{Interval(c.x0), Interval(0.0), Interval(0.0), Interval(c.py0)};
    const EnergyLevel h{hamiltonian(q0, c.params)};
    os << "x_lo,x_hi,y_lo,y_hi,region\n";
    constexpr int n = 240;
    constexpr double L = 1.6;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x0 = -L + 2 * L * i / n, x1 = -L + 2 * L * (i + 1) / n;
            const double y0 = -L + 2 * L * j / n, y1 = -L + 2 * L * (j + 1) / n;
            std::string region;
            try {
                switch (hill_region_test(Interval(x0, x1), Interval(y0, y1), h, c.params)) {
                    case HillRegion::Inside: region = "inside"; break;
                    case HillRegion::Outside: region = "outside"; break;
                    case HillRegion::Boundary: region = "boundary"; break;
                }
            } catch (const Error&) {
                region = "collision";
            }
            os << d(x0) << ',' << d(x1) << ',' << d(y0) << ',' << d(y1) << ',' << region << '\n';
        }
}

void family_csv(std::ostream& os, const RunConfig& c) {
    os << "x,kappa_lo,kappa_hi\n";
    for (const json& e : read_lines(c, "family")) {
        const FamilyCertificate f = family_cert_from_json(e.at("outputs"));
        os << d(f.box.x0) << ',' << d(f.newton_set.lo()) << ',' << d(f.newton_set.hi()) << '\n';
    }
}

void slopes_csv(std::ostream& os, const RunConfig& c) {
    os << "x,slope_lo,slope_hi,dHdx_lo,dHdx_hi,energy_lo,energy_hi\n";
    for (const json& e : read_lines(c, "family")) {
        const FamilyCertificate f = family_cert_from_json(e.at("outputs"));
        const Interval en = hull(f.energy_left, f.energy_right);
        os << d(f.box.x0) << ',' << d(f.kappa_slope.lo()) << ',' << d(f.kappa_slope.hi()) << ',' << d(f.dH_dx.lo()) << ','
           << d(f.dH_dx.hi()) << ',' << d(en.lo()) << ',' << d(en.hi()) << '\n';
    }
}

void fibers_csv(std::ostream& os, const RunConfig& c) {
    const FiberCertificate f = fiber_cert_from_json(read_lines(c, "fibers").back().at("outputs"));
    os << "slab,x_lo,x_hi,y1_lo,y1_hi,y2_lo,y2_hi,y3_lo,y3_hi,img_x_lo,img_x_hi,img_y1_lo,img_y1_hi,img_y2_lo,img_y2_hi,"
          "img_y3_lo,img_y3_hi\n";
    for (int i = 0; i < f.box.N && i < static_cast<int>(f.images.size()); ++i) {
        const IVector s = f.box.slab(i);
        const IVector& im = f.images[i];
        os << i;
        for (std::size_t k = 0; k < 4; ++k) os << ',' << d(s[k].lo()) << ',' << d(s[k].hi());
        for (std::size_t k = 0; k < 4; ++k) os << ',' << d(im[k].lo()) << ',' << d(im[k].hi());
        os << '\n';
    }
}

void section_csv(std::ostream& os, const RunConfig& c) {
    const IntersectionCertificate t = intersection_cert_from_json(read_lines(c, "transversal").back().at("outputs"));
    if (t.left_image.size() != 4 || t.right_image.size() != 4)
        throw Error(ErrorCode::MissingCertificate, "transversal certificate has no edge images");
    os << "kind,x_lo,x_hi,px_lo,px_hi,slope_lo,slope_hi\n";
    auto row = [&](const char* k, const State& b, const Interval& a) {
        os << k << ',' << d(b[X].lo()) << ',' << d(b[X].hi()) << ',' << d(b[PX].lo()) << ',' << d(b[PX].hi()) << ','
           << d(a.lo()) << ',' << d(a.hi()) << '\n';
    };
    row("unstable_left", t.left_image, t.slope_a);
    row("unstable_right", t.right_image, t.slope_a);
    // stable fiber by S-symmetry: mirror boxes, opposite slope
    row("stable_left", symmetry_S(t.right_image), -t.slope_a);
    row("stable_right", symmetry_S(t.left_image), -t.slope_a);
}

}  // namespace

std::string emit_plot_data(const RunConfig& config, const std::string& what, const std::string& out_dir) {
    void (*fn)(std::ostream&, const RunConfig&) = nullptr;
    if (what == "hill") fn = hill_csv;
    else if (what == "family") fn = family_csv;
    else if (what == "slopes") fn = slopes_csv;
    else if (what == "fibers") fn = fibers_csv;
    else if (what == "section") fn = section_csv;
    else throw Error(ErrorCode::ConfigError, "unknown plot kind " + what);
    std::ostringstream body;
    try {
        fn(body, config);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MissingCertificate, std::string("unreadable certificate: ") + e.what());
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const fs::path p = fs::path(out_dir) / (what + ".csv");
    std::ofstream f(p, std::ios::trunc);
    if (!f) throw Error(ErrorCode::IOError, "cannot write " + p.string());
    f << body.str();
    return p.string();
}

}  // namespace librate
