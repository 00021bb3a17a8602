#include "librate/serialize.hpp"

#include <charconv>
#include <cstdio>

namespace librate {

std::string shortest_decimal(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_decimal(const std::string& s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(ErrorCode::ConfigError, "not a decimal: " + s);
    return v;
}

ErrorCode error_code_from_name(const std::string& name) {
    for (int c = 0; c <= static_cast<int>(ErrorCode::IOError); ++c)
        if (name == error_name(static_cast<ErrorCode>(c))) return static_cast<ErrorCode>(c);
    throw Error(ErrorCode::ConfigError, "unknown error code " + name);
}

namespace {

json poly_json(const Poly& p) {
    json j = json::array();
    for (double c : p) j.push_back(shortest_decimal(c));
    return j;
}

Poly poly_from(const json& j) {
    Poly p;
    for (const auto& c : j) p.push_back(parse_decimal(c.get<std::string>()));
    return p;
}

double num(const json& j, const char* key) { return parse_decimal(j.at(key).get<std::string>()); }

}  // namespace

json to_json(const Interval& a) { return {{"lo", shortest_decimal(a.lo())}, {"hi", shortest_decimal(a.hi())}}; }

json to_json(const IVector& v) {
    json j = json::array();
    for (std::size_t i = 0; i < v.size(); ++i) j.push_back(to_json(v[i]));
    return j;
}

json to_json(const IMatrix& m) {
    json j = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        j.push_back(row);
    }
    return j;
}

json to_json(const Vector& v) {
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(shortest_decimal(v(i)));
    return j;
}

json to_json(const Matrix& m) {
    json j = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(shortest_decimal(m(r, c)));
        j.push_back(row);
    }
    return j;
}

json to_json(const Verdict& v) {
    json j = {{"verified", v.verified}};
    if (!v.verified) {
        j["reason"] = error_name(v.reason);
        j["detail"] = v.detail;
    }
    return j;
}

json to_json(const FamilyBox& b) {
    return {{"x0", shortest_decimal(b.x0)}, {"I", to_json(b.I)},   {"py0", shortest_decimal(b.py0)},
            {"J0", to_json(b.J0)},         {"J1", to_json(b.J1)}, {"a", shortest_decimal(b.a)}};
}

json to_json(const FamilyCertificate& c) {
    return {{"index", c.index},
            {"box", to_json(c.box)},
            {"newton_set", to_json(c.newton_set)},
            {"kappa_slope", to_json(c.kappa_slope)},
            {"kappa_slope_left", to_json(c.kappa_slope_left)},
            {"kappa_slope_right", to_json(c.kappa_slope_right)},
            {"dH_dx", to_json(c.dH_dx)},
            {"half_time", to_json(c.half_time)},
            {"px_image_U0", to_json(c.px_image_U0)},
            {"energy_left", to_json(c.energy_left)},
            {"energy_right", to_json(c.energy_right)},
            {"status", to_json(c.status)}};
}

json to_json(const HyperbolicityCertificate& c) {
    return {{"index", c.index},
            {"A_row", to_json(c.A_row)},
            {"B_mat", to_json(c.B_mat)},
            {"lambda1", to_json(c.lambda1)},
            {"lambda2", to_json(c.lambda2)},
            {"return_time", to_json(c.return_time)},
            {"status", to_json(c.status)}};
}

json to_json(const Chart& c) {
    json K = json::array();
    for (const Poly& p : c.K) K.push_back(poly_json(p));
    return {{"q0", to_json(c.q0)}, {"C", to_json(c.C)}, {"C_inv", to_json(c.C_inv)},
            {"K", K},             {"lambda", shortest_decimal(c.lambda)}, {"T", to_json(c.T)}};
}

json to_json(const ConeCertificate& c) {
    auto check = [](const ConeCheck& k) {
        return json{{"pass", k.pass},
                    {"margin", shortest_decimal(k.margin)},
                    {"epsilon", shortest_decimal(k.epsilon)},
                    {"M", shortest_decimal(k.M)}};
    };
    return {{"alpha", shortest_decimal(c.alpha)}, {"m", shortest_decimal(c.m)}, {"cc1", check(c.cc1)},
            {"cc2", check(c.cc2)}, {"lipschitz", shortest_decimal(c.lipschitz)}, {"status", to_json(c.status)}};
}

json to_json(const LocalBox& b) {
    return {{"B0", to_json(b.B0)},
            {"x_lo", shortest_decimal(b.x_lo)},
            {"x_hi", shortest_decimal(b.x_hi)},
            {"N", b.N},
            {"alpha", shortest_decimal(b.alpha)}};
}

json to_json(const FiberCertificate& c) {
    json images = json::array();
    for (const IVector& v : c.images) images.push_back(to_json(v));
    return {{"box", to_json(c.box)}, {"DF", to_json(c.DF)}, {"images", images},
            {"cone", to_json(c.cone)}, {"status", to_json(c.status)}};
}

json to_json(const SectionProbe& p) {
    return {{"x_l", shortest_decimal(p.x_l)}, {"x_m", shortest_decimal(p.x_m)}, {"x_r", shortest_decimal(p.x_r)},
            {"B_c", to_json(p.B_c)},          {"alpha", shortest_decimal(p.alpha)}};
}

json to_json(const IntersectionCertificate& c) {
    json j = {{"probe", to_json(c.probe)}, {"slope_parts", c.slope_parts}, {"status", to_json(c.status)}};
    if (c.left_image.size() == 4) j["left_image"] = to_json(c.left_image);
    if (c.right_image.size() == 4) j["right_image"] = to_json(c.right_image);
    if (c.slope_parts > 0) {
        j["slope_a"] = to_json(c.slope_a);
        j["angle_deg"] = to_json(c.angle_deg);
    }
    return j;
}

Interval interval_from_json(const json& j) {
    const double lo = num(j, "lo"), hi = num(j, "hi");
    if (!(lo <= hi)) throw Error(ErrorCode::ConfigError, "interval with lo > hi");
    return Interval::raw(lo, hi);
}

IVector ivector_from_json(const json& j) {
    IVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = interval_from_json(j[i]);
    return v;
}

IMatrix imatrix_from_json(const json& j) {
    const std::size_t rows = j.size(), cols = rows ? j[0].size() : 0;
    IMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols) throw Error(ErrorCode::ConfigError, "ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = interval_from_json(j[r][c]);
    }
    return m;
}

Vector vector_from_json(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_decimal(j[i].get<std::string>());
    return v;
}

Matrix matrix_from_json(const json& j) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size()), cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols) throw Error(ErrorCode::ConfigError, "ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_decimal(j[r][c].get<std::string>());
    }
    return m;
}

Verdict verdict_from_json(const json& j) {
    if (j.at("verified").get<bool>()) return Verdict::ok();
    return Verdict::fail(error_code_from_name(j.at("reason").get<std::string>()), j.at("detail").get<std::string>());
}

FamilyBox family_box_from_json(const json& j) {
    FamilyBox b;
    b.x0 = num(j, "x0");
    b.I = interval_from_json(j.at("I"));
    b.py0 = num(j, "py0");
    b.J0 = interval_from_json(j.at("J0"));
    b.J1 = interval_from_json(j.at("J1"));
    b.a = num(j, "a");
    return b;
}

FamilyCertificate family_cert_from_json(const json& j) {
    FamilyCertificate c;
    c.index = j.at("index").get<std::size_t>();
    c.box = family_box_from_json(j.at("box"));
    c.newton_set = interval_from_json(j.at("newton_set"));
    c.kappa_slope = interval_from_json(j.at("kappa_slope"));
    c.kappa_slope_left = interval_from_json(j.at("kappa_slope_left"));
    c.kappa_slope_right = interval_from_json(j.at("kappa_slope_right"));
    c.dH_dx = interval_from_json(j.at("dH_dx"));
    c.half_time = interval_from_json(j.at("half_time"));
    c.px_image_U0 = interval_from_json(j.at("px_image_U0"));
    c.energy_left = interval_from_json(j.at("energy_left"));
    c.energy_right = interval_from_json(j.at("energy_right"));
    c.status = verdict_from_json(j.at("status"));
    return c;
}

HyperbolicityCertificate hyperbolicity_cert_from_json(const json& j) {
    HyperbolicityCertificate c;
    c.index = j.at("index").get<std::size_t>();
    c.A_row = imatrix_from_json(j.at("A_row"));
    c.B_mat = imatrix_from_json(j.at("B_mat"));
    c.lambda1 = interval_from_json(j.at("lambda1"));
    c.lambda2 = interval_from_json(j.at("lambda2"));
    c.return_time = interval_from_json(j.at("return_time"));
    c.status = verdict_from_json(j.at("status"));
    return c;
}

Chart chart_from_json(const json& j) {
    Chart c;
    c.q0 = vector_from_json(j.at("q0"));
    c.C = matrix_from_json(j.at("C"));
    c.C_inv = imatrix_from_json(j.at("C_inv"));
    const json& K = j.at("K");
    if (K.size() != 4) throw Error(ErrorCode::ConfigError, "chart needs four polynomials");
    for (std::size_t i = 0; i < 4; ++i) c.K[i] = poly_from(K[i]);
    c.lambda = num(j, "lambda");
    c.T = interval_from_json(j.at("T"));
    c.validate();
    return c;
}

ConeCertificate cone_cert_from_json(const json& j) {
    auto check = [](const json& k) {
        ConeCheck c;
        c.pass = k.at("pass").get<bool>();
        c.margin = num(k, "margin");
        c.epsilon = num(k, "epsilon");
        c.M = num(k, "M");
        return c;
    };
    ConeCertificate c;
    c.alpha = num(j, "alpha");
    c.m = num(j, "m");
    c.cc1 = check(j.at("cc1"));
    c.cc2 = check(j.at("cc2"));
    c.lipschitz = num(j, "lipschitz");
    c.status = verdict_from_json(j.at("status"));
    return c;
}

LocalBox local_box_from_json(const json& j) {
    LocalBox b;
    b.B0 = ivector_from_json(j.at("B0"));
    b.x_lo = num(j, "x_lo");
    b.x_hi = num(j, "x_hi");
    b.N = j.at("N").get<int>();
    b.alpha = num(j, "alpha");
    return b;
}

FiberCertificate fiber_cert_from_json(const json& j) {
    FiberCertificate c;
    c.box = local_box_from_json(j.at("box"));
    c.DF = imatrix_from_json(j.at("DF"));
    for (const auto& v : j.at("images")) c.images.push_back(ivector_from_json(v));
    c.cone = cone_cert_from_json(j.at("cone"));
    c.status = verdict_from_json(j.at("status"));
    return c;
}

SectionProbe probe_from_json(const json& j) {
    SectionProbe p;
    p.x_l = num(j, "x_l");
    p.x_m = num(j, "x_m");
    p.x_r = num(j, "x_r");
    p.B_c = ivector_from_json(j.at("B_c"));
    p.alpha = num(j, "alpha");
    return p;
}

IntersectionCertificate intersection_cert_from_json(const json& j) {
    IntersectionCertificate c;
    c.probe = probe_from_json(j.at("probe"));
    c.slope_parts = j.at("slope_parts").get<int>();
    c.status = verdict_from_json(j.at("status"));
    if (j.contains("left_image")) c.left_image = ivector_from_json(j.at("left_image"));
    if (j.contains("right_image")) c.right_image = ivector_from_json(j.at("right_image"));
    if (j.contains("slope_a")) {
        c.slope_a = interval_from_json(j.at("slope_a"));
        c.angle_deg = interval_from_json(j.at("angle_deg"));
    }
    return c;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(const json& j) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

}  // namespace librate
