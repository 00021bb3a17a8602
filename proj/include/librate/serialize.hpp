#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "librate/transversality.hpp"

namespace librate {

using json = nlohmann::json;

// Shortest decimal that parses back to the same double.
std::string shortest_decimal(double v);
double parse_decimal(const std::string& s);

ErrorCode error_code_from_name(const std::string& name);

json to_json(const Interval& a);
json to_json(const IVector& v);
json to_json(const IMatrix& m);   // row-major list of rows
json to_json(const Vector& v);
json to_json(const Matrix& m);
json to_json(const Verdict& v);
json to_json(const FamilyBox& b);
json to_json(const FamilyCertificate& c);
json to_json(const HyperbolicityCertificate& c);
json to_json(const Chart& c);
json to_json(const ConeCertificate& c);
json to_json(const LocalBox& b);
json to_json(const FiberCertificate& c);
json to_json(const SectionProbe& p);
json to_json(const IntersectionCertificate& c);

Interval interval_from_json(const json& j);
IVector ivector_from_json(const json& j);
IMatrix imatrix_from_json(const json& j);
Vector vector_from_json(const json& j);
Matrix matrix_from_json(const json& j);
Verdict verdict_from_json(const json& j);
FamilyBox family_box_from_json(const json& j);
FamilyCertificate family_cert_from_json(const json& j);
HyperbolicityCertificate hyperbolicity_cert_from_json(const json& j);
Chart chart_from_json(const json& j);
ConeCertificate cone_cert_from_json(const json& j);
LocalBox local_box_from_json(const json& j);
FiberCertificate fiber_cert_from_json(const json& j);
SectionProbe probe_from_json(const json& j);
IntersectionCertificate intersection_cert_from_json(const json& j);

std::uint64_t fnv1a(const std::string& bytes);
std::string hash_hex(const json& j);  // FNV-1a of the compact dump

}  // namespace librate
