#include "tsurf/reconstruction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace tsurf {

CoefficientMatrices build_coefficient_matrices(const PointInvariants& p, SurfaceType type) {
  const double mu2 = type == SurfaceType::FirstType ? p.mu2 : 0.0;
  const double lambda2 = type == SurfaceType::ThirdType ? 0.0 : p.lambda2;
  const double beta2 = type == SurfaceType::ThirdType ? 0.0 : p.beta2;

  CoefficientMatrices m;
  // clang-format off
  m.A << p.gamma1, 0.0,        p.lambda1, p.mu1,
         0.0,      -p.gamma1,  -p.nu,     0.0,
         -p.nu,    p.lambda1,  0.0,       p.beta1,
         0.0,      p.mu1,      -p.beta1,  0.0;
  m.B << -p.gamma2, 0.0,       -p.nu,     0.0,
         0.0,       p.gamma2,  lambda2,   mu2,
         lambda2,   -p.nu,     0.0,       beta2,
         mu2,       0.0,       -beta2,    0.0;
  // clang-format on
  m.A *= p.f;
  m.B *= p.f;
  return m;
}

CoefficientMatrices build_coefficient_matrices(const InvariantSet& inv, const DerivedCoefficients& dc,
                                               SurfaceType type, Index i, Index j) {
  const GridDomain& d = inv.domain();
  if (i < 0 || j < 0 || i >= d.nu || j >= d.nv)
    throw Error(ErrorKind::InvalidField, "grid index out of range");
  return build_coefficient_matrices(point_values(inv, dc, i, j), type);
}

namespace {

// Entry (r, c) of A and of B as grid arrays.
struct MatrixFields {
  std::array<GridArray, 16> A, B;
};

MatrixFields matrix_fields(const InvariantSet& inv, const DerivedCoefficients& dc, SurfaceType type) {
  inv.validate();
  const GridDomain& d = inv.domain();
  MatrixFields mf;
  for (int k = 0; k < 16; ++k) {
    mf.A[k].resize(d.nu, d.nv);
    mf.B[k].resize(d.nu, d.nv);
  }
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j) {
      const CoefficientMatrices m = build_coefficient_matrices(point_values(inv, dc, i, j), type);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          mf.A[4 * r + c](i, j) = m.A(r, c);
          mf.B[4 * r + c](i, j) = m.B(r, c);
        }
    }
  return mf;
}

}  // namespace

double flatness_scale(const InvariantSet& inv, const DerivedCoefficients& dc, SurfaceType type) {
  const MatrixFields mf = matrix_fields(inv, dc, type);
  double m = 0.0;
  for (int k = 0; k < 16; ++k) m = std::max({m, mf.A[k].abs().maxCoeff(), mf.B[k].abs().maxCoeff()});
  return std::max(m * m, 1e-300);
}

ResidualFields flatness_residual_fields(const InvariantSet& inv, const DerivedCoefficients& dc,
                                        SurfaceType type, StencilOrder order, std::optional<Index> margin) {
  const MatrixFields mf = matrix_fields(inv, dc, type);
  const Differ D{inv.domain(), order};
  ResidualFields out{inv.domain(), margin.value_or(default_margin(order)), {}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      GridArray res = D.v(mf.A[4 * r + c]) - D.u(mf.B[4 * r + c]);
      for (int k = 0; k < 4; ++k)
        res += mf.A[4 * r + k] * mf.B[4 * k + c] - mf.B[4 * r + k] * mf.A[4 * k + c];
      out.fields.push_back({"flat_" + std::to_string(r + 1) + std::to_string(c + 1), std::move(res)});
    }
  return out;
}

ResidualReport flatness_residual(const InvariantSet& inv, const DerivedCoefficients& dc, SurfaceType type,
                                 StencilOrder order, std::optional<Index> margin) {
  return flatness_residual_fields(inv, dc, type, order, margin).report();
}

namespace {

// Interpolation weights along one axis: nodes base .. base + count - 1.
struct AxisWeights {
  Index base = 0;
  int count = 2;
  std::array<double, 4> w{};
};

AxisWeights axis_weights(double s, Index n, Interpolation interp) {
  s = std::clamp(s, 0.0, static_cast<double>(n - 1));
  AxisWeights a;
  if (interp == Interpolation::Cubic && n >= 4) {
    a.count = 4;
    a.base = std::clamp<Index>(static_cast<Index>(std::floor(s)) - 1, 0, n - 4);
    const double t = s - static_cast<double>(a.base);
    for (int k = 0; k < 4; ++k) {
      double w = 1.0;
      for (int m = 0; m < 4; ++m)
        if (m != k) w *= (t - m) / static_cast<double>(k - m);
      a.w[k] = w;
    }
  } else {
    a.base = std::min<Index>(static_cast<Index>(s), n - 2);
    const double t = s - static_cast<double>(a.base);
    a.w[0] = 1.0 - t;
    a.w[1] = t;
  }
  return a;
}

}  // namespace

CoefficientSource sampled_source(const InvariantSet& inv, const DerivedCoefficients& dc, SurfaceType type,
                                 Interpolation interp) {
  inv.validate();
  const GridDomain d = inv.domain();
  // Ten fields packed per sample so each lookup touches one weight set.
  std::vector<std::array<double, 10>> packed(static_cast<size_t>(d.size()));
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j) {
      const PointInvariants p = point_values(inv, dc, i, j);
      packed[static_cast<size_t>(i * d.nv + j)] = {p.f,      p.nu,     p.lambda1, p.lambda2, p.mu1,
                                                   p.mu2,    p.gamma1, p.gamma2,  p.beta1,   p.beta2};
    }
  return [d, type, interp, packed = std::move(packed)](double u, double v) {
    const AxisWeights wu = axis_weights((u - d.u0) / d.hu, d.nu, interp);
    const AxisWeights wv = axis_weights((v - d.v0) / d.hv, d.nv, interp);
    std::array<double, 10> acc{};
    for (int a = 0; a < wu.count; ++a)
      for (int b = 0; b < wv.count; ++b) {
        const double w = wu.w[a] * wv.w[b];
        const auto& s = packed[static_cast<size_t>((wu.base + a) * d.nv + wv.base + b)];
        for (int k = 0; k < 10; ++k) acc[k] += w * s[k];
      }
    const PointInvariants p{acc[0], acc[1], acc[2], acc[3], acc[4],
                            acc[5], acc[6], acc[7], acc[8], acc[9]};
    return build_coefficient_matrices(p, type);
  };
}

CoefficientSource analytic_source(std::function<PointInvariants(double, double)> fn, SurfaceType type) {
  return [fn = std::move(fn), type](double u, double v) { return build_coefficient_matrices(fn(u, v), type); };
}

std::string_view to_string(PathStrategy p) { return p == PathStrategy::UThenV ? "u-then-v" : "v-then-u"; }

PathStrategy path_from_string(std::string_view name) {
  if (name == "uv" || name == "u-then-v") return PathStrategy::UThenV;
  if (name == "vu" || name == "v-then-u") return PathStrategy::VThenU;
  throw Error(ErrorKind::InvalidField, "unknown path strategy '" + std::string(name) + "'");
}

namespace {

class LineIntegrator {
 public:
  LineIntegrator(const CoefficientSource& source, const IntegrationOptions& options)
      : source_(source), opt_(options) {
    if (opt_.substeps < 1) throw Error(ErrorKind::InvalidField, "substeps must be >= 1");
    if (opt_.reproject_every < 0) throw Error(ErrorKind::InvalidField, "reproject_every must be >= 0");
  }

  // Integrates from (u, v) along u (or v) over `cells` grid cells of size h,
  // writing the node frames into out[0 .. cells].
  void run(Mat4 W, double u, double v, double h, Index cells, bool along_u, std::vector<Mat4>& out) {
    out.resize(static_cast<size_t>(cells + 1));
    out[0] = W;
    const double dt = h / opt_.substeps;
    long steps = 0;
    for (Index c = 0; c < cells; ++c) {
      for (int s = 0; s < opt_.substeps; ++s) {
        const double t = static_cast<double>(c) * h + s * dt;
        W = step(W, u, v, t, dt, along_u);
        ++steps;
        const double drift = frame_gram_residual(Frame(W));
        max_drift_ = std::max(max_drift_, drift);
        if (opt_.reproject_every > 0 && steps % opt_.reproject_every == 0) W = reorthonormalize(Frame(W)).legs;
        if (!W.allFinite() || W.cwiseAbs().maxCoeff() > opt_.max_component) {
          std::ostringstream os;
          os << "frame entries exceed " << opt_.max_component << " near (u, v) = ("
             << (along_u ? u + t + dt : u) << ", " << (along_u ? v : v + t + dt) << ")";
          throw Error(ErrorKind::StepUnstable, os.str());
        }
      }
      out[static_cast<size_t>(c + 1)] = W;
    }
  }

  double max_drift() const { return max_drift_; }

 private:
  Mat4 coeff(double u, double v, double t, bool along_u) const {
    return along_u ? source_(u + t, v).A : source_(u, v + t).B;
  }

  Mat4 step(const Mat4& W, double u, double v, double t, double dt, bool along_u) const {
    const Mat4 M0 = coeff(u, v, t, along_u);
    const Mat4 Mh = coeff(u, v, t + dt / 2, along_u);
    const Mat4 M1 = coeff(u, v, t + dt, along_u);
    const Mat4 k1 = M0 * W;
    const Mat4 k2 = Mh * (W + dt / 2 * k1);
    const Mat4 k3 = Mh * (W + dt / 2 * k2);
    const Mat4 k4 = M1 * (W + dt * k3);
    return W + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }

  const CoefficientSource& source_;
  IntegrationOptions opt_;
  double max_drift_ = 0.0;
};

}  // namespace

FrameField integrate_frame(const CoefficientSource& source, const GridDomain& domain, const Frame& F0,
                           const IntegrationOptions& options) {
  domain.validate();
  if (!(frame_gram_residual(F0) < 1e-10))
    throw Error(ErrorKind::DegenerateFrame, "initial frame is not pseudo-orthonormal to 1e-10");

  LineIntegrator line(source, options);
  FrameField out(domain);
  std::vector<Mat4> axis, cross;
  if (options.path == PathStrategy::UThenV) {
    line.run(F0.legs, domain.u0, domain.v0, domain.hu, domain.nu - 1, true, axis);
    for (Index i = 0; i < domain.nu; ++i) {
      line.run(axis[static_cast<size_t>(i)], domain.u(i), domain.v0, domain.hv, domain.nv - 1, false, cross);
      for (Index j = 0; j < domain.nv; ++j) out.at(i, j) = Frame(cross[static_cast<size_t>(j)]);
    }
  } else {
    line.run(F0.legs, domain.u0, domain.v0, domain.hv, domain.nv - 1, false, axis);
    for (Index j = 0; j < domain.nv; ++j) {
      line.run(axis[static_cast<size_t>(j)], domain.u0, domain.v(j), domain.hu, domain.nu - 1, true, cross);
      for (Index i = 0; i < domain.nu; ++i) out.at(i, j) = Frame(cross[static_cast<size_t>(i)]);
    }
  }
  out.max_gram_drift = line.max_drift();
  return out;
}

namespace {

// Cumulative integral of sampled g along a line of n nodes with spacing h,
// cell by cell with the quadrature of the local cubic interpolant.
std::vector<Vec4> cumulative(const std::vector<Vec4>& g, double h, const Vec4& start) {
  const size_t n = g.size();
  std::vector<Vec4> z(n);
  z[0] = start;
  for (size_t k = 0; k + 1 < n; ++k) {
    Vec4 inc;
    if (n >= 4) {
      if (k == 0)
        inc = 9 * g[0] + 19 * g[1] - 5 * g[2] + g[3];
      else if (k == n - 2)
        inc = 9 * g[n - 1] + 19 * g[n - 2] - 5 * g[n - 3] + g[n - 4];
      else
        inc = -g[k - 1] + 13 * g[k] + 13 * g[k + 1] - g[k + 2];
      inc *= h / 24;
    } else if (k == 0) {
      inc = h / 12 * (5 * g[0] + 8 * g[1] - g[2]);
    } else {
      inc = h / 12 * (5 * g[2] + 8 * g[1] - g[0]);
    }
    z[k + 1] = z[k] + inc;
  }
  return z;
}

}  // namespace

Vec4Field integrate_position(const ScalarField& f, const FrameField& frames, const Vec4& z0, PathStrategy path) {
  const GridDomain& d = frames.domain;
  if (!(f.domain == d)) throw Error(ErrorKind::DomainMismatch, "f and frames live on different grids");
  if (frames.frames.size() != static_cast<size_t>(d.size()))
    throw Error(ErrorKind::MissingFrames, "frame field does not cover the grid");

  Vec4Field z(d);
  auto g_x = [&](Index i, Index j) -> Vec4 { return f(i, j) * frames.at(i, j).x(); };
  auto g_y = [&](Index i, Index j) -> Vec4 { return f(i, j) * frames.at(i, j).y(); };
  std::vector<Vec4> g;

  if (path == PathStrategy::UThenV) {
    g.clear();
    for (Index i = 0; i < d.nu; ++i) g.push_back(g_x(i, 0));
    const std::vector<Vec4> axis = cumulative(g, d.hu, z0);
    for (Index i = 0; i < d.nu; ++i) {
      g.clear();
      for (Index j = 0; j < d.nv; ++j) g.push_back(g_y(i, j));
      const std::vector<Vec4> line = cumulative(g, d.hv, axis[static_cast<size_t>(i)]);
      for (Index j = 0; j < d.nv; ++j) z.set(i, j, line[static_cast<size_t>(j)]);
    }
  } else {
    g.clear();
    for (Index j = 0; j < d.nv; ++j) g.push_back(g_y(0, j));
    const std::vector<Vec4> axis = cumulative(g, d.hv, z0);
    for (Index j = 0; j < d.nv; ++j) {
      g.clear();
      for (Index i = 0; i < d.nu; ++i) g.push_back(g_x(i, j));
      const std::vector<Vec4> line = cumulative(g, d.hu, axis[static_cast<size_t>(j)]);
      for (Index i = 0; i < d.nu; ++i) z.set(i, j, line[static_cast<size_t>(i)]);
    }
  }
  return z;
}

PathDiscrepancy path_discrepancy(const CoefficientSource& source, const GridDomain& domain, const Frame& F0,
                                 const IntegrationOptions& options) {
  IntegrationOptions a = options, b = options;
  a.path = PathStrategy::UThenV;
  b.path = PathStrategy::VThenU;
  const FrameField fa = integrate_frame(source, domain, F0, a);
  const FrameField fb = integrate_frame(source, domain, F0, b);
  PathDiscrepancy out;
  for (size_t k = 0; k < fa.frames.size(); ++k)
    out.max = std::max(out.max, (fa.frames[k].legs - fb.frames[k].legs).cwiseAbs().maxCoeff());
  out.corner = (fa.frames.back().legs - fb.frames.back().legs).cwiseAbs().maxCoeff();
  return out;
}

Reconstruction reconstruct(const InvariantSet& inv, const Vec4& p0, const Frame& F0,
                           const ReconstructionOptions& options) {
  inv.validate();
  if (!p0.allFinite()) throw Error(ErrorKind::InvalidField, "initial point must be finite");
  Reconstruction r;
  r.type = options.type ? *options.type : classify(inv, options.classify_tol);
  r.derived = derived_coefficients(inv, r.type, options.order, options.guard);
  r.flatness = flatness_residual(inv, r.derived, r.type, options.order);
  r.flatness_scale = flatness_scale(inv, r.derived, r.type);

  const double relative = r.flatness.max_norm() / r.flatness_scale;
  if (relative > options.refuse_threshold) {
    std::ostringstream os;
    os << "flatness residual " << r.flatness.max_norm() << " is " << relative
       << " of the coefficient scale (threshold " << options.refuse_threshold << ")";
    if (!options.force) throw Error(ErrorKind::IncompatibleData, os.str());
    r.warnings.push_back(os.str() + "; integrating anyway");
  } else if (relative > options.warn_threshold) {
    std::ostringstream os;
    os << "flatness residual " << r.flatness.max_norm() << " exceeds the warning level "
       << options.warn_threshold << " relative to scale " << r.flatness_scale;
    r.warnings.push_back(os.str());
  }

  const CoefficientSource source =
      options.source ? *options.source : sampled_source(inv, r.derived, r.type, options.interpolation);
  FrameField frames = integrate_frame(source, inv.domain(), F0, options.integration);
  Vec4Field z = integrate_position(inv.f, frames, p0, options.integration.path);

  if (options.path_check) {
    const PathDiscrepancy pd = path_discrepancy(source, inv.domain(), F0, options.integration);
    r.path_discrepancy_corner = pd.corner;
    r.path_discrepancy_max = pd.max;
  }
  r.patch = SurfacePatch{std::move(z), std::move(frames), inv.f};
  return r;
}

}  // namespace tsurf
