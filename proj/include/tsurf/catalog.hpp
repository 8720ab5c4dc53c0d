#pragma once

// Analytic test surfaces and invariant-set families with closed-form
// invariants, used as oracles throughout the tests.
//
// Null-coordinate conventions (all chosen so that <z_u, z_v> < 0):
//   product          a phi = (u - v) / 2,  b psi = (u + v) / 2
//   cylinder         r theta = (u - v) / 2,  t = (u + v) / 2
//   plane            z = ((u - v) / 2, 0, 0, (u + v) / 2)
//   warped product   the product chart composed with u -> sinh(k u) / k, v -> sinh(k v) / k

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsurf/invariants.hpp"
#include "tsurf/surface.hpp"

namespace tsurf {

/// Closed-form immersion with its first derivatives and the mixed second derivative.
struct AnalyticChart {
  std::function<Vec4(double, double)> z;
  std::function<Vec4(double, double)> z_u;
  std::function<Vec4(double, double)> z_v;
  std::function<Vec4(double, double)> z_uv;
};

AnalyticChart warped_product_chart(double a, double b, double kappa);
AnalyticChart product_chart(double a, double b);
AnalyticChart cylinder_chart(double r);
AnalyticChart plane_chart();

SurfacePatch sample_chart(const AnalyticChart& chart, const GridDomain& domain);

SurfacePatch product_surface(double a, double b, const GridDomain& domain);
SurfacePatch warped_product_surface(double a, double b, double kappa, const GridDomain& domain);
SurfacePatch cylinder_surface(double r, const GridDomain& domain);
SurfacePatch plane_surface(const GridDomain& domain);

using InvariantClosure = std::function<PointInvariants(double, double)>;

/// An invariant family with its closed-form gamma and beta.
struct InvariantFamily {
  SurfaceType type = SurfaceType::FirstType;
  InvariantClosure fn;

  InvariantSet sample(const GridDomain& domain) const { return sample_invariants(domain, fn); }
  DerivedCoefficients sample_derived(const GridDomain& domain) const { return tsurf::sample_derived(domain, fn); }
};

/// Invariants of the (warped) product surface, n2 oriented positively.
InvariantFamily warped_product_family(double a, double b, double kappa);
InvariantFamily product_family(double a, double b);

/// f = 1, nu = c + nu_shift, lambda = 0, mu1 = mu2 = c. Compatible only for nu_shift = 0.
InvariantFamily constant_first_type_family(double c, double nu_shift = 0.0);
InvariantSet constant_first_type(double c, const GridDomain& domain);

/// s = u + v > 0: f = 1/s, nu = sqrt 2, lambda1 = Cc s^2, mu1 = A s + B s^2 + mu1_shift,
/// lambda2 = mu2 = 0. Compatible only for mu1_shift = 0.
InvariantFamily third_type(double Cc, double A, double B, double mu1_shift = 0.0);
/// InvalidField unless u + v >= delta on the whole grid.
InvariantSet third_type_family(double Cc, double A, double B, const GridDomain& domain, double mu1_shift = 0.0,
                               double delta = 0.5);

/// f = 1, lambda2 = L, mu1 = g, mu2 = 0, nu = nu0 + slope u - g^2 L u^2 / 2,
/// lambda1 = nu^2 / L.
InvariantFamily second_type(double nu0, double slope, double g, double L = 1.0);

struct ProbeSeeds {
  double nu0 = 1.0;
  double slope = 0.5;
  double g = 1.0;
  double lambda2 = 1.0;
  /// Added to lambda1 = nu^2 / lambda2; any nonzero value breaks conditions (iii)-(iv).
  double lambda1_offset = 0.0;
  /// Absolute max-norm threshold for the a-posteriori (iii), (iv) check.
  double threshold = 1e-3;
  StencilOrder order = StencilOrder::Second;
};

struct ProbeResult {
  InvariantSet invariants;
  ResidualReport conditions;
};

/// SecondType data with f, nu, lambda1, lambda2 from the seeds and mu1 solved
/// from condition (ii) along every v-line (RK4, mu1 = g on v = v0).
/// ProbeInfeasible if the (iii) or (iv) residual exceeds the threshold.
ProbeResult second_type_probe(const GridDomain& domain, const ProbeSeeds& seeds = {});

/// Registry for the command line.
struct CatalogEntry {
  std::string name;
  bool is_surface = true;
  std::string description;
  std::map<std::string, double> defaults;
  GridDomain domain;
};

const std::vector<CatalogEntry>& catalog_entries();

struct CatalogItem {
  std::optional<SurfacePatch> surface;
  std::optional<InvariantSet> invariants;
  std::optional<SurfaceType> type;
};

/// Unknown names or parameters throw InvalidField.
CatalogItem catalog_emit(const std::string& name, const std::map<std::string, double>& params = {},
                         const std::optional<GridDomain>& domain = std::nullopt);

}  // namespace tsurf
