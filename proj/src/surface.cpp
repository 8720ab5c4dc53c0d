#include "tsurf/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tsurf {

double FrameField::max_gram_residual() const {
  double m = 0.0;
  for (const auto& fr : frames) m = std::max(m, frame_gram_residual(fr));
  return m;
}

SurfacePatch apply_motion(const LorentzMotion& motion, const SurfacePatch& patch) {
  SurfacePatch out = patch;
  const GridDomain& d = patch.domain();
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j) out.z.set(i, j, motion.apply_point(patch.z.at(i, j)));
  if (out.frames)
    for (auto& fr : out.frames->frames) fr = motion.apply(fr);
  return out;
}

MetricSamples first_fundamental_form(const SurfacePatch& patch, StencilOrder order) {
  const Vec4Field zu = d_du(patch.z, order);
  const Vec4Field zv = d_dv(patch.z, order);
  const GridDomain& d = patch.domain();
  return {{d, minkowski_dot(zu, zu)}, {d, minkowski_dot(zu, zv)}, {d, minkowski_dot(zv, zv)}};
}

ScalarField check_isotropic(const SurfacePatch& patch, double tol, StencilOrder order) {
  const MetricSamples m = first_fundamental_form(patch, order);
  const GridDomain& d = patch.domain();

  // Excess over the tolerance per coefficient; the largest positive one is reported.
  double worst = 0.0;
  Index wi = 0, wj = 0;
  const char* which = "";
  auto consider = [&](double excess, Index i, Index j, const char* name) {
    if (excess > worst) {
      worst = excess;
      wi = i;
      wj = j;
      which = name;
    }
  };
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j) {
      consider(std::abs(m.E(i, j)) - tol, i, j, "E");
      consider(std::abs(m.G(i, j)) - tol, i, j, "G");
      consider(m.F(i, j) + tol, i, j, "F");
    }
  if (*which != '\0') {
    std::ostringstream os;
    os << "coefficient " << which << " fails at sample (" << wi << ", " << wj << "), (u, v) = ("
       << d.u(wi) << ", " << d.v(wj) << "): E = " << m.E(wi, wj) << ", F = " << m.F(wi, wj)
       << ", G = " << m.G(wi, wj) << ", tol = " << tol;
    throw Error(ErrorKind::NotIsotropic, os.str());
  }
  return {d, GridArray((-m.F.values).sqrt())};
}

namespace {

// Normal vector completing (x, y, n1): the Euclidean cofactor vector c with
// c . w = det(x, y, n1, w) is Euclidean-orthogonal to all three, so eta c is
// Minkowski-orthogonal; normalizing it makes det(x, y, n1, n2) = |eta c| > 0.
Vec4 completing_normal(const Vec4& x, const Vec4& y, const Vec4& n1) {
  Mat4 m;
  m.row(0) = x.transpose();
  m.row(1) = y.transpose();
  m.row(2) = n1.transpose();
  Vec4 c;
  for (int k = 0; k < 4; ++k) {
    m.row(3) = Vec4::Unit(k).transpose();
    c(k) = m.determinant();
  }
  Vec4 n2 = minkowski_metric() * c;
  const double sq = minkowski_square(n2);
  if (!(sq > 0.0)) throw Error(ErrorKind::DegenerateFrame, "normal plane is not spacelike");
  return n2 / std::sqrt(sq);
}

struct RawGeometry {
  ScalarField f;
  Vec4Field x, y, n1, n2;
  GridArray nu;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> minimal;
  Index clamped = 0;
};

RawGeometry raw_geometry(const SurfacePatch& patch, const AnalysisOptions& opt) {
  const GridDomain& d = patch.domain();
  RawGeometry g;
  g.f = check_isotropic(patch, opt.isotropy_tol, opt.order);
  const Vec4Field zu = d_du(patch.z, opt.order);
  const Vec4Field zv = d_dv(patch.z, opt.order);
  const Vec4Field zuv = d2_dudv(patch.z, opt.order);

  g.x = Vec4Field(d);
  g.y = Vec4Field(d);
  g.n1 = Vec4Field(d);
  g.n2 = Vec4Field(d);
  g.nu = GridArray::Zero(d.nu, d.nv);
  g.minimal.setConstant(d.nu, d.nv, false);

  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j) {
      const double f = g.f(i, j);
      const Vec4 x = zu.at(i, j) / f;
      const Vec4 y = zv.at(i, j) / f;
      g.x.set(i, j, x);
      g.y.set(i, j, y);

      // sigma(x, y) is the normal part of z_uv / f^2; H = -sigma(x, y).
      const Vec4 w = zuv.at(i, j) / (f * f);
      // The tangent projection uses the sampled Gram matrix of (x, y), which is
      // only approximately [[0, -1], [-1, 0]], so that n1 is exactly normal.
      const double gxx = minkowski_square(x), gyy = minkowski_square(y), gxy = minkowski_dot(x, y);
      const double wx = minkowski_dot(w, x), wy = minkowski_dot(w, y);
      const double det = gxx * gyy - gxy * gxy;
      const double a = (gyy * wx - gxy * wy) / det;
      const double b = (gxx * wy - gxy * wx) / det;
      const Vec4 H = -(w - a * x - b * y);
      double h2 = minkowski_square(H);
      if (h2 < 0.0) {
        ++g.clamped;
        h2 = 0.0;
      }
      const double nu = std::sqrt(h2);
      g.nu(i, j) = nu;
      if (!(nu >= opt.minimal_tol)) {
        g.minimal(i, j) = true;
        continue;
      }
      const Vec4 n1 = H / nu;
      g.n1.set(i, j, n1);
      g.n2.set(i, j, static_cast<double>(opt.n2_orientation >= 0 ? 1 : -1) * completing_normal(x, y, n1));
    }
  return g;
}

}  // namespace

GeometricFrame geometric_frame(const SurfacePatch& patch, const AnalysisOptions& options) {
  const RawGeometry g = raw_geometry(patch, options);
  const GridDomain& d = patch.domain();
  if (g.minimal.any()) {
    Index bi = 0, bj = 0;
    g.nu.minCoeff(&bi, &bj);
    std::ostringstream os;
    os << g.minimal.count() << " minimal sample(s); nu = " << g.nu(bi, bj) << " at (u, v) = ("
       << d.u(bi) << ", " << d.v(bj) << ")";
    throw Error(ErrorKind::MinimalPoint, os.str());
  }
  GeometricFrame out;
  out.frames = FrameField(d);
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j)
      out.frames.at(i, j) = Frame(g.x.at(i, j), g.y.at(i, j), g.n1.at(i, j), g.n2.at(i, j));
  out.f = g.f;
  out.nu = ScalarField(d, g.nu);
  out.clamped_radicands = g.clamped;
  out.x_future_pointing = g.x.at(0, 0)(3) > 0.0;
  return out;
}

Extraction extract_invariants(const SurfacePatch& patch, const AnalysisOptions& options) {
  GeometricFrame geo = geometric_frame(patch, options);
  const GridDomain& d = patch.domain();
  const StencilOrder order = options.order;

  Vec4Field x(d), y(d), n1(d), n2(d);
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j) {
      const Frame& fr = geo.frames.at(i, j);
      x.set(i, j, fr.x());
      y.set(i, j, fr.y());
      n1.set(i, j, fr.n1());
      n2.set(i, j, fr.n2());
    }

  const GridArray& f = geo.f.values;
  const Vec4Field xu = d_du(x, order);
  const Vec4Field yv = d_dv(y, order);
  const Vec4Field n1u = d_du(n1, order);
  const Vec4Field n1v = d_dv(n1, order);

  InvariantSet inv{geo.f,
                   geo.nu,
                   {d, GridArray(minkowski_dot(xu, n1) / f)},
                   {d, GridArray(minkowski_dot(yv, n1) / f)},
                   {d, GridArray(minkowski_dot(xu, n2) / f)},
                   {d, GridArray(minkowski_dot(yv, n2) / f)}};
  const GridArray f2 = f.square();
  DerivedCoefficients dc{{d, GridArray(d_du(f, d, order) / f2)},
                         {d, GridArray(d_dv(f, d, order) / f2)},
                         {d, GridArray(minkowski_dot(n1u, n2) / f)},
                         {d, GridArray(minkowski_dot(n1v, n2) / f)}};
  return {std::move(inv), std::move(dc), std::move(geo)};
}

SurfacePatch with_geometry(const SurfacePatch& patch, const GeometricFrame& geometry) {
  SurfacePatch out = patch;
  out.frames = geometry.frames;
  out.f = geometry.f;
  return out;
}

namespace {
double fraction(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& a, Index m) {
  const auto block = a.block(m, m, a.rows() - 2 * m, a.cols() - 2 * m);
  return static_cast<double>(block.count()) / static_cast<double>(block.size());
}
}  // namespace

double DegeneracyFlags::minimal_fraction(Index margin) const { return fraction(minimal, margin); }
double DegeneracyFlags::inflection_fraction(Index margin) const { return fraction(inflection, margin); }

DegeneracyFlags detect_degeneracies(const SurfacePatch& patch, double tol, const AnalysisOptions& options) {
  AnalysisOptions opt = options;
  opt.minimal_tol = tol;
  const RawGeometry g = raw_geometry(patch, opt);
  const GridDomain& d = patch.domain();
  const Vec4Field xu = d_du(g.x, opt.order);
  const Vec4Field yv = d_dv(g.y, opt.order);
  const GridArray mu1 = minkowski_dot(xu, g.n2) / g.f.values;
  const GridArray mu2 = minkowski_dot(yv, g.n2) / g.f.values;

  DegeneracyFlags flags{d, g.minimal, {}};
  flags.inflection = (!g.minimal) && (mu1.square() + mu2.square() < tol * tol);
  return flags;
}

ScalarField crop(const ScalarField& field, Index m) {
  const GridDomain& d = field.domain;
  GridDomain c{d.u(m), d.v(m), d.hu, d.hv, d.nu - 2 * m, d.nv - 2 * m};
  c.validate();
  return {c, GridArray(field.values.block(m, m, c.nu, c.nv))};
}

InvariantSet crop(const InvariantSet& inv, Index m) {
  return {crop(inv.f, m),       crop(inv.nu, m),  crop(inv.lambda1, m),
          crop(inv.lambda2, m), crop(inv.mu1, m), crop(inv.mu2, m)};
}

DerivedCoefficients crop(const DerivedCoefficients& dc, Index m) {
  return {crop(dc.gamma1, m), crop(dc.gamma2, m), crop(dc.beta1, m), crop(dc.beta2, m)};
}

SurfacePatch crop(const SurfacePatch& patch, Index m) {
  const GridDomain& d = patch.domain();
  GridDomain c{d.u(m), d.v(m), d.hu, d.hv, d.nu - 2 * m, d.nv - 2 * m};
  c.validate();
  SurfacePatch out;
  std::array<GridArray, 4> comps;
  for (int k = 0; k < 4; ++k) comps[k] = patch.z.components[k].block(m, m, c.nu, c.nv);
  out.z = Vec4Field(c, std::move(comps));
  if (patch.f) out.f = crop(*patch.f, m);
  if (patch.frames) {
    FrameField ff(c);
    for (Index i = 0; i < c.nu; ++i)
      for (Index j = 0; j < c.nv; ++j) ff.at(i, j) = patch.frames->at(i + m, j + m);
    ff.max_gram_drift = patch.frames->max_gram_drift;
    out.frames = std::move(ff);
  }
  return out;
}

}  // namespace tsurf
