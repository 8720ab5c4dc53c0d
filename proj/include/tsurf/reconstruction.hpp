#pragma once

// The frame system W_u = A W, W_v = B W (legs as rows of W), its
// compatibility residual, and the one-step integrators that rebuild frames
// and position from invariant data.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsurf/invariants.hpp"
#include "tsurf/surface.hpp"

namespace tsurf {

struct CoefficientMatrices {
  Mat4 A = Mat4::Zero();
  Mat4 B = Mat4::Zero();
};

/// The matrices of the frame system at one point. SecondType drops the mu2
/// entries; ThirdType also drops lambda2 and beta2, so (n2)_v = 0.
CoefficientMatrices build_coefficient_matrices(const PointInvariants& p, SurfaceType type);
CoefficientMatrices build_coefficient_matrices(const InvariantSet& inv, const DerivedCoefficients& dc,
                                               SurfaceType type, Index i, Index j);

/// Squared largest entry of A, B over the grid (at least 1e-300); the
/// flatness thresholds are relative to it.
double flatness_scale(const InvariantSet& inv, const DerivedCoefficients& dc, SurfaceType type);

/// The sixteen entries of A_v - B_u + A B - B A, named "flat_ik".
ResidualFields flatness_residual_fields(const InvariantSet& inv, const DerivedCoefficients& dc,
                                        SurfaceType type, StencilOrder order = StencilOrder::Second,
                                        std::optional<Index> margin = std::nullopt);
ResidualReport flatness_residual(const InvariantSet& inv, const DerivedCoefficients& dc, SurfaceType type,
                                 StencilOrder order = StencilOrder::Second,
                                 std::optional<Index> margin = std::nullopt);

/// Coefficient matrices at an arbitrary (u, v).
using CoefficientSource = std::function<CoefficientMatrices(double, double)>;

enum class Interpolation { Linear, Cubic };

/// Interpolates the sampled fields: bilinear, or tensor-product cubic
/// Lagrange on the 4x4 node block around the point.
CoefficientSource sampled_source(const InvariantSet& inv, const DerivedCoefficients& dc, SurfaceType type,
                                 Interpolation interp = Interpolation::Linear);
/// Evaluates an analytic closure (gamma and beta included).
CoefficientSource analytic_source(std::function<PointInvariants(double, double)> fn, SurfaceType type);

enum class PathStrategy { UThenV, VThenU };

std::string_view to_string(PathStrategy p);
/// "uv", "u-then-v", "vu", "v-then-u".
PathStrategy path_from_string(std::string_view name);

struct IntegrationOptions {
  PathStrategy path = PathStrategy::UThenV;
  /// Re-project onto exact frames every k steps; 0 disables.
  int reproject_every = 1;
  /// Steps per grid cell; coefficients are taken from the source in between.
  int substeps = 1;
  /// StepUnstable once any frame entry exceeds this magnitude.
  double max_component = 1e8;
};

/// Classical RK4 sweep from the grid origin. max_gram_drift records the
/// largest Gram residual seen before any re-projection.
FrameField integrate_frame(const CoefficientSource& source, const GridDomain& domain, const Frame& F0,
                           const IntegrationOptions& options = {});

/// z_u = f x, z_v = f y along the same sweep, with the fourth-order
/// quadrature of the cubic interpolant of the integrand on each cell.
Vec4Field integrate_position(const ScalarField& f, const FrameField& frames, const Vec4& z0,
                             PathStrategy path = PathStrategy::UThenV);

struct ReconstructionOptions {
  std::optional<SurfaceType> type;
  double classify_tol = 1e-7;
  StencilOrder order = StencilOrder::Second;
  double guard = 1e-9;
  /// Flatness max-norm thresholds relative to flatness_scale.
  double refuse_threshold = 1e-2;
  double warn_threshold = 1e-6;
  /// Integrate even when the refuse threshold is exceeded.
  bool force = false;
  Interpolation interpolation = Interpolation::Linear;
  /// Overrides the interpolated sampled data (e.g. a catalog closure).
  std::optional<CoefficientSource> source;
  IntegrationOptions integration;
  /// Also run the opposite sweep and record the largest frame difference.
  bool path_check = false;
};

struct Reconstruction {
  SurfacePatch patch;
  SurfaceType type = SurfaceType::FirstType;
  DerivedCoefficients derived;
  ResidualReport flatness;
  double flatness_scale = 1.0;
  std::vector<std::string> warnings;
  /// Far-corner and whole-grid frame discrepancy between the two sweeps.
  std::optional<double> path_discrepancy_corner;
  std::optional<double> path_discrepancy_max;
};

/// derived_coefficients -> flatness check -> integrate_frame -> integrate_position.
/// IncompatibleData when flatness max-norm > refuse_threshold * scale (unless force).
Reconstruction reconstruct(const InvariantSet& inv, const Vec4& p0, const Frame& F0,
                           const ReconstructionOptions& options = {});

struct PathDiscrepancy {
  double corner = 0.0;
  double max = 0.0;
};

/// Largest entry of the frame difference between the u-then-v and v-then-u sweeps.
PathDiscrepancy path_discrepancy(const CoefficientSource& source, const GridDomain& domain, const Frame& F0,
                                 const IntegrationOptions& options = {});

}  // namespace tsurf
