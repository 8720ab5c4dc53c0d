#pragma once

// Congruence of sampled patches up to a Lorentz motion, decided by aligning
// the origin frames.

#include "tsurf/surface.hpp"

namespace tsurf {

/// The motion carrying S2's origin point and frame onto S1's. Both origin
/// frames are re-projected first, so extracted frames are accepted.
LorentzMotion origin_alignment(const SurfacePatch& s1, const SurfacePatch& s2);

/// max over samples of the Euclidean 4-norm of z1 - M(z2), M = origin_alignment(s1, s2).
/// DomainMismatch for different grids, MissingFrames without attached frames.
double congruence_distance(const SurfacePatch& s1, const SurfacePatch& s2);

}  // namespace tsurf
