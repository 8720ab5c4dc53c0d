#pragma once

// JSON and CSV formats for fields, invariant sets, patches and residual
// reports. JSON output is stable: sorted keys, doubles at 17 significant
// digits. Every array is row-major with u as the slow index.

#include <json.hpp>

#include <optional>
#include <string>

#include "tsurf/invariants.hpp"
#include "tsurf/surface.hpp"

namespace tsurf {

using Json = nlohmann::json;

/// Serializes with sorted keys and "%.17g" doubles; numeric arrays stay on one line.
std::string dump_stable(const Json& j, int indent = 2);

Json to_json(const GridDomain& d);
GridDomain domain_from_json(const Json& j);

Json to_json(const ScalarField& f);
ScalarField scalar_field_from_json(const Json& j);

Json to_json(const Vec4Field& f);
Vec4Field vec4_field_from_json(const Json& j);

struct InvariantFile {
  InvariantSet invariants;
  std::optional<SurfaceType> type;
};

Json to_json(const InvariantSet& inv, std::optional<SurfaceType> type = std::nullopt);
InvariantFile invariants_from_json(const Json& j);

Json to_json(const DerivedCoefficients& dc);

Json to_json(const SurfacePatch& patch);
SurfacePatch surface_from_json(const Json& j);

Json to_json(const ResidualReport& r);

/// `u,v,x1,x2,x3,x4` rows; the grid is recovered from the distinct u and v values.
std::string surface_csv(const SurfacePatch& patch);
SurfacePatch surface_from_csv(const std::string& text);

/// `u,v,f,nu,lambda1,lambda2,mu1,mu2` rows.
std::string invariants_csv(const InvariantSet& inv);
/// `u,v,<field names...>` rows.
std::string residual_fields_csv(const ResidualFields& r);

/// File helpers; failures throw Io.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);
Json read_json(const std::string& path);

/// JSON unless the path ends in ".csv".
SurfacePatch read_surface(const std::string& path);
InvariantFile read_invariants(const std::string& path);

}  // namespace tsurf
