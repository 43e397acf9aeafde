#pragma once

#include "polyrobin/classify.hpp"
#include "polyrobin/concavity.hpp"
#include "polyrobin/cone_harmonics.hpp"
#include "polyrobin/fem.hpp"
#include "polyrobin/polytope.hpp"
#include "polyrobin/pruefer.hpp"

#include <json.hpp>

#include <iosfwd>
#include <memory>
#include <string>

namespace polyrobin::io {

using Json = nlohmann::ordered_json;

/// {"dim": d, "halfspaces": [{"normal": [...], "offset": b}, ...]}. Throws Config.
Polytope parse_domain(const Json& j, double rel_tol = 1e-10);
Polytope read_domain(const std::string& path, double rel_tol = 1e-10);
/// Minimal, unit-normal form of P; parse_domain(domain_to_json(P)) reproduces it.
Json domain_to_json(const Polytope& P);

/// Pretty-printed JSON with a trailing newline; "-" writes to stdout.
void write_json(const Json& j, const std::string& path);

/// CSV with header node_index,x,y,value.
void write_field_csv(const Field& f, std::ostream& out);
void write_field_csv(const Field& f, const std::string& path);
/// Reads a field CSV and attaches it to `mesh`; node coordinates must match.
Field read_field_csv(const std::string& path, std::shared_ptr<const Mesh> mesh);

Json to_json(const Point& p);
Json to_json(const Classification& c);
Json to_json(const PerturbationResult& r);
Json to_json(const SpectralResult& r);
Json to_json(const CornerExpansion& e);
Json to_json(const ConcavityReport& r);
Json to_json(const PrueferOutcome& o);
Json to_json(const MuScan& s);
/// Summary only ({d, R, alpha, lambda, log_concave, max_v, max_w}); samples go to CSV.
Json to_json(const RadialGroundState& g);
Json mesh_summary(const Mesh& M);

}  // namespace polyrobin::io
