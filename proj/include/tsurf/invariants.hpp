#pragma once

// The six-function invariant sets (f, nu, lambda1, lambda2, mu1, mu2), their
// derived coefficients (gamma1, gamma2, beta1, beta2), the surface-type case
// split and the residuals of every integrability / theorem condition.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsurf/grid.hpp"

namespace tsurf {

enum class SurfaceType { FirstType, SecondType, ThirdType, InflectionDegenerate, Minimal };

std::string_view to_string(SurfaceType type);
/// Accepts "first", "second", "third", "inflection", "minimal" and the
/// CamelCase names; throws TypeMismatch otherwise.
SurfaceType surface_type_from_string(std::string_view name);

struct InvariantSet {
  ScalarField f;
  ScalarField nu;
  ScalarField lambda1;
  ScalarField lambda2;
  ScalarField mu1;
  ScalarField mu2;

  const GridDomain& domain() const { return f.domain; }
  /// Shared domain and f > 0 everywhere; throws InvalidField.
  void validate() const;
};

struct DerivedCoefficients {
  ScalarField gamma1;
  ScalarField gamma2;
  ScalarField beta1;
  ScalarField beta2;
};

/// All ten coefficient values at a single (u, v).
struct PointInvariants {
  double f = 1.0;
  double nu = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

PointInvariants point_values(const InvariantSet& inv, const DerivedCoefficients& dc, Index i, Index j);
/// Bilinear interpolation of every field at (u, v).
PointInvariants interpolate(const InvariantSet& inv, const DerivedCoefficients& dc, double u, double v);

/// Samples an analytic (u, v) -> PointInvariants closure.
InvariantSet sample_invariants(const GridDomain& domain,
                               const std::function<PointInvariants(double, double)>& fn);
DerivedCoefficients sample_derived(const GridDomain& domain,
                                   const std::function<PointInvariants(double, double)>& fn);

struct ResidualEntry {
  std::string condition;
  double max_norm = 0.0;
  double l2_norm = 0.0;
  std::optional<double> order;
};

struct ResidualReport {
  Index margin = 0;
  std::vector<ResidualEntry> entries;

  double max_norm() const;
  const ResidualEntry& at(std::string_view condition) const;
};

struct NamedField {
  std::string name;
  GridArray values;
};

/// Residual fields on the full grid; norms are taken on the interior only.
struct ResidualFields {
  GridDomain domain;
  Index margin = 0;
  std::vector<NamedField> fields;

  ResidualReport report() const;
  const GridArray& at(std::string_view name) const;
};

/// Attaches log2(max_coarse / max_fine) to every entry of `coarse`. The two
/// reports must list the same conditions; the fine one should have been
/// evaluated on the same physical interior (margin doubled).
ResidualReport with_convergence(const ResidualReport& coarse, const ResidualReport& fine);

/// max |field| over nu, lambda1, lambda2, mu1, mu2.
double curvature_scale(const InvariantSet& inv);

/// Case split with "== 0" tested as max|.| < tol * scale and "!= 0" as
/// min|.| > tol * scale over the whole grid, scale = curvature_scale(inv).
/// Minimal, then InflectionDegenerate, take precedence. Grids that are partly
/// zero and partly not throw AmbiguousType, as does mu1 == 0 with mu2 != 0
/// (apply swap_parameters first).
SurfaceType classify(const InvariantSet& inv, double tol = 1e-7);

struct MeanCurvatureFlags {
  bool parallel_mean_curvature = false;             // beta1 = beta2 = 0, nu const
  bool parallel_normalized_mean_curvature = false;  // beta1 = beta2 = 0, nu not const
};

MeanCurvatureFlags mean_curvature_flags(const InvariantSet& inv, const DerivedCoefficients& dc,
                                        double tol, Index margin = 0);

/// u <-> v relabelling: transposes the grid and swaps the 1/2 indices. The
/// orientation convention det(x, y, n1, n2) > 0 flips n2 under x <-> y, so
/// mu1, mu2 (and beta1, beta2) also change sign.
InvariantSet swap_parameters(const InvariantSet& inv);
DerivedCoefficients swap_parameters(const DerivedCoefficients& dc);

/// gamma_i from f; beta_i from the case formula of the given type. Throws
/// DivisionGuard where a denominator drops below `guard`, TypeMismatch for
/// Minimal / InflectionDegenerate.
DerivedCoefficients derived_coefficients(const InvariantSet& inv, SurfaceType type,
                                         StencilOrder order = StencilOrder::Second,
                                         double guard = 1e-9);

/// The six raw integrability conditions with x = (1/f) d/du, y = (1/f) d/dv.
ResidualFields integrability_residual_fields(const InvariantSet& inv, const DerivedCoefficients& dc,
                                             StencilOrder order = StencilOrder::Second,
                                             std::optional<Index> margin = std::nullopt);
ResidualReport integrability_residuals(const InvariantSet& inv, const DerivedCoefficients& dc,
                                       StencilOrder order = StencilOrder::Second,
                                       std::optional<Index> margin = std::nullopt);

/// The condition set of the fundamental theorem for `type` (four for first
/// and second type, three plus the nu-consistency check for third type).
ResidualFields theorem_condition_fields(const InvariantSet& inv, SurfaceType type,
                                        StencilOrder order = StencilOrder::Second,
                                        std::optional<Index> margin = std::nullopt,
                                        double zero_tol = 1e-7);
ResidualReport theorem_conditions_residuals(const InvariantSet& inv, SurfaceType type,
                                            StencilOrder order = StencilOrder::Second,
                                            std::optional<Index> margin = std::nullopt,
                                            double zero_tol = 1e-7);

}  // namespace tsurf
