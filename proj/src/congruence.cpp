#include "tsurf/congruence.hpp"

#include <algorithm>

namespace tsurf {

namespace {

void require_frames(const SurfacePatch& s, const char* which) {
  if (!s.frames || s.frames->frames.empty())
    throw Error(ErrorKind::MissingFrames, std::string(which) + " has no attached frame field");
}

}  // namespace

LorentzMotion origin_alignment(const SurfacePatch& s1, const SurfacePatch& s2) {
  if (!(s1.domain() == s2.domain())) throw Error(ErrorKind::DomainMismatch, "patches live on different grids");
  require_frames(s1, "first patch");
  require_frames(s2, "second patch");
  // Identical origin data means the identity, without rounding.
  if (s1.z.at(0, 0) == s2.z.at(0, 0) && s1.frames->at(0, 0).legs == s2.frames->at(0, 0).legs)
    return LorentzMotion::identity();
  // Extracted frames carry a stencil-sized Gram error; the projection is
  // Lorentz-equivariant, so aligning the projected frames is consistent.
  return motion_from_frames(s2.z.at(0, 0), reorthonormalize(s2.frames->at(0, 0)), s1.z.at(0, 0),
                            reorthonormalize(s1.frames->at(0, 0)));
}

double congruence_distance(const SurfacePatch& s1, const SurfacePatch& s2) {
  const LorentzMotion m = origin_alignment(s1, s2);
  const GridDomain& d = s1.domain();
  double dist = 0.0;
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j)
      dist = std::max(dist, (s1.z.at(i, j) - m.apply_point(s2.z.at(i, j))).norm());
  return dist;
}

}  // namespace tsurf
