#pragma once

// Sampled timelike surfaces in isotropic parameters and extraction of their
// geometric frame field and invariant set.

#include <optional>
#include <vector>

#include "tsurf/grid.hpp"
#include "tsurf/invariants.hpp"

namespace tsurf {

/// One pseudo-orthonormal frame per grid sample, row-major like the fields.
struct FrameField {
  GridDomain domain;
  std::vector<Frame> frames;
  /// Largest Gram residual seen before any re-projection (0 for extracted frames).
  double max_gram_drift = 0.0;

  FrameField() = default;
  explicit FrameField(const GridDomain& d) : domain(d), frames(static_cast<size_t>(d.size())) {}

  Frame& at(Index i, Index j) { return frames[static_cast<size_t>(i * domain.nv + j)]; }
  const Frame& at(Index i, Index j) const { return frames[static_cast<size_t>(i * domain.nv + j)]; }

  /// max over samples of frame_gram_residual.
  double max_gram_residual() const;
};

struct SurfacePatch {
  Vec4Field z;
  std::optional<FrameField> frames;
  std::optional<ScalarField> f;

  const GridDomain& domain() const { return z.domain; }
};

/// p -> L p + t on every sample; frames transform by L only.
SurfacePatch apply_motion(const LorentzMotion& motion, const SurfacePatch& patch);

/// Coefficients of the first fundamental form, sampled with the grid stencils.
struct MetricSamples {
  ScalarField E, F, G;
};

MetricSamples first_fundamental_form(const SurfacePatch& patch, StencilOrder order = StencilOrder::Second);

/// Checks |E|, |G| < tol and F < -tol at every sample, returns f = sqrt(-F).
/// NotIsotropic names the worst offending sample and coefficient.
ScalarField check_isotropic(const SurfacePatch& patch, double tol = 1e-3,
                            StencilOrder order = StencilOrder::Second);

struct GeometricFrame {
  FrameField frames;
  ScalarField f;
  ScalarField nu;
  /// Samples where a slightly negative <H,H> had to be clamped to 0.
  Index clamped_radicands = 0;
  /// Whether x at the origin sample points to the future (x4 > 0).
  bool x_future_pointing = true;
};

struct AnalysisOptions {
  double isotropy_tol = 1e-3;
  double minimal_tol = 1e-9;
  StencilOrder order = StencilOrder::Second;
  /// +1 orients n2 with det(x, y, n1, n2) > 0, -1 with the opposite sign.
  int n2_orientation = +1;
};

/// x = z_u / f, y = z_v / f, H = -(normal part of z_uv) / f^2, nu = |H|,
/// n1 = H / nu, n2 completes the normal frame. Throws MinimalPoint where nu < tol.
GeometricFrame geometric_frame(const SurfacePatch& patch, const AnalysisOptions& options = {});

struct Extraction {
  InvariantSet invariants;
  DerivedCoefficients derived;
  GeometricFrame geometry;
};

/// lambda_i, mu_i by projecting (1/f) d_u x and (1/f) d_v y on n1, n2;
/// beta_i by projecting the derivatives of n1 on n2; gamma_i from f.
Extraction extract_invariants(const SurfacePatch& patch, const AnalysisOptions& options = {});

/// The input patch with the geometric frames and f attached.
SurfacePatch with_geometry(const SurfacePatch& patch, const GeometricFrame& geometry);

struct DegeneracyFlags {
  GridDomain domain;
  /// 1 where the flag holds; row-major.
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> minimal;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> inflection;

  /// Fraction of flagged samples over the interior block.
  double minimal_fraction(Index margin) const;
  double inflection_fraction(Index margin) const;
};

/// minimal where nu < tol; inflection where mu1^2 + mu2^2 < tol^2 (evaluated
/// only at non-minimal samples). Never throws on minimal points.
DegeneracyFlags detect_degeneracies(const SurfacePatch& patch, double tol = 1e-6,
                                    const AnalysisOptions& options = {});

/// Restricts a patch / invariant data to the block that drops `margin` samples per side.
SurfacePatch crop(const SurfacePatch& patch, Index margin);
ScalarField crop(const ScalarField& field, Index margin);
InvariantSet crop(const InvariantSet& inv, Index margin);
DerivedCoefficients crop(const DerivedCoefficients& dc, Index margin);

}  // namespace tsurf
