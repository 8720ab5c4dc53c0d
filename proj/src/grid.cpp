#include "tsurf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tsurf {

void GridDomain::validate() const {
  if (nu < 3 || nv < 3)
    throw Error(ErrorKind::GridTooSmall, "grid needs at least 3x3 samples, got " +
                                             std::to_string(nu) + "x" + std::to_string(nv));
  if (!(hu > 0.0) || !(hv > 0.0) || !std::isfinite(hu) || !std::isfinite(hv))
    throw Error(ErrorKind::GridTooSmall, "grid steps must be positive");
  if (!std::isfinite(u0) || !std::isfinite(v0))
    throw Error(ErrorKind::InvalidField, "grid origin must be finite");
}

GridDomain GridDomain::refined() const {
  return {u0, v0, hu / 2.0, hv / 2.0, 2 * nu - 1, 2 * nv - 1};
}

GridDomain make_domain(double u0, double u1, double v0, double v1, Index nu, Index nv) {
  if (nu < 2 || nv < 2) throw Error(ErrorKind::GridTooSmall, "make_domain needs n >= 2");
  GridDomain d{u0, v0, (u1 - u0) / static_cast<double>(nu - 1),
               (v1 - v0) / static_cast<double>(nv - 1), nu, nv};
  d.validate();
  return d;
}

Index default_margin(StencilOrder order) { return order == StencilOrder::Fourth ? 6 : 3; }

bool all_finite(const GridArray& f) { return f.isFinite().all(); }

GridArray minkowski_dot(const Vec4Field& a, const Vec4Field& b) {
  if (!(a.domain == b.domain)) throw Error(ErrorKind::DomainMismatch, "vector fields on different grids");
  return a.components[0] * b.components[0] + a.components[1] * b.components[1] +
         a.components[2] * b.components[2] - a.components[3] * b.components[3];
}

ScalarField::ScalarField(const GridDomain& d, GridArray v) : domain(d), values(std::move(v)) {
  domain.validate();
  if (values.rows() != domain.nu || values.cols() != domain.nv)
    throw Error(ErrorKind::InvalidField, "field shape does not match its domain");
  if (!all_finite(values)) throw Error(ErrorKind::InvalidField, "field contains NaN or Inf");
}

ScalarField ScalarField::sample(const GridDomain& domain,
                                const std::function<double(double, double)>& fn) {
  GridArray a(domain.nu, domain.nv);
  for (Index i = 0; i < domain.nu; ++i)
    for (Index j = 0; j < domain.nv; ++j) a(i, j) = fn(domain.u(i), domain.v(j));
  return {domain, std::move(a)};
}

ScalarField ScalarField::constant(const GridDomain& domain, double value) {
  return {domain, GridArray::Constant(domain.nu, domain.nv, value)};
}

Vec4Field::Vec4Field(const GridDomain& d) : domain(d) {
  domain.validate();
  for (auto& c : components) c = GridArray::Zero(d.nu, d.nv);
}

Vec4Field::Vec4Field(const GridDomain& d, std::array<GridArray, 4> comps)
    : domain(d), components(std::move(comps)) {
  domain.validate();
  for (const auto& c : components) {
    if (c.rows() != d.nu || c.cols() != d.nv)
      throw Error(ErrorKind::InvalidField, "vector field shape does not match its domain");
    if (!all_finite(c)) throw Error(ErrorKind::InvalidField, "vector field contains NaN or Inf");
  }
}

Vec4Field Vec4Field::sample(const GridDomain& domain,
                            const std::function<Vec4(double, double)>& fn) {
  Vec4Field out(domain);
  for (Index i = 0; i < domain.nu; ++i)
    for (Index j = 0; j < domain.nv; ++j) out.set(i, j, fn(domain.u(i), domain.v(j)));
  for (const auto& c : out.components)
    if (!all_finite(c)) throw Error(ErrorKind::InvalidField, "vector field contains NaN or Inf");
  return out;
}

namespace {

void require_samples(Index n, StencilOrder order) {
  if (n < 3) throw Error(ErrorKind::GridTooSmall, "difference stencil needs >= 3 samples");
  if (order == StencilOrder::Fourth && n < 5)
    throw Error(ErrorKind::GridTooSmall, "fourth-order stencil needs >= 5 samples");
}

// First derivative along the slow (row) index.
GridArray diff_rows(const GridArray& f, double h, StencilOrder order) {
  const Index n = f.rows();
  require_samples(n, order);
  GridArray out(n, f.cols());
  const double c2 = 1.0 / (2.0 * h);
  const double c4 = 1.0 / (12.0 * h);
  out.row(0) = (-3.0 * f.row(0) + 4.0 * f.row(1) - f.row(2)) * c2;
  out.row(n - 1) = (3.0 * f.row(n - 1) - 4.0 * f.row(n - 2) + f.row(n - 3)) * c2;
  if (order == StencilOrder::Fourth && n >= 6) {
    // Fourth-order one-sided closures on the two outer rows.
    out.row(0) = (-25.0 * f.row(0) + 48.0 * f.row(1) - 36.0 * f.row(2) + 16.0 * f.row(3) - 3.0 * f.row(4)) * c4;
    out.row(1) = (-3.0 * f.row(0) - 10.0 * f.row(1) + 18.0 * f.row(2) - 6.0 * f.row(3) + f.row(4)) * c4;
    out.row(n - 1) = (25.0 * f.row(n - 1) - 48.0 * f.row(n - 2) + 36.0 * f.row(n - 3) - 16.0 * f.row(n - 4) +
                      3.0 * f.row(n - 5)) * c4;
    out.row(n - 2) = (3.0 * f.row(n - 1) + 10.0 * f.row(n - 2) - 18.0 * f.row(n - 3) + 6.0 * f.row(n - 4) -
                      f.row(n - 5)) * c4;
    for (Index i = 2; i < n - 2; ++i)
      out.row(i) = (f.row(i - 2) - 8.0 * f.row(i - 1) + 8.0 * f.row(i + 1) - f.row(i + 2)) * c4;
    return out;
  }
  for (Index i = 1; i < n - 1; ++i) {
    if (order == StencilOrder::Fourth && i >= 2 && i <= n - 3)
      out.row(i) = (f.row(i - 2) - 8.0 * f.row(i - 1) + 8.0 * f.row(i + 1) - f.row(i + 2)) * c4;
    else
      out.row(i) = (f.row(i + 1) - f.row(i - 1)) * c2;
  }
  return out;
}

GridArray diff2_rows(const GridArray& f, double h, StencilOrder order) {
  const Index n = f.rows();
  require_samples(n, order);
  GridArray out(n, f.cols());
  const double c2 = 1.0 / (h * h);
  const double c4 = 1.0 / (12.0 * h * h);
  if (n >= 4) {
    out.row(0) = (2.0 * f.row(0) - 5.0 * f.row(1) + 4.0 * f.row(2) - f.row(3)) * c2;
    out.row(n - 1) =
        (2.0 * f.row(n - 1) - 5.0 * f.row(n - 2) + 4.0 * f.row(n - 3) - f.row(n - 4)) * c2;
  } else {
    out.row(0) = out.row(n - 1) = (f.row(0) - 2.0 * f.row(1) + f.row(2)) * c2;
  }
  if (order == StencilOrder::Fourth && n >= 6) {
    auto r = [&](Index k) { return f.row(k); };
    auto l = [&](Index k) { return f.row(n - 1 - k); };
    out.row(0) = (45.0 * r(0) - 154.0 * r(1) + 214.0 * r(2) - 156.0 * r(3) + 61.0 * r(4) - 10.0 * r(5)) * c4;
    out.row(1) = (10.0 * r(0) - 15.0 * r(1) - 4.0 * r(2) + 14.0 * r(3) - 6.0 * r(4) + r(5)) * c4;
    out.row(n - 1) = (45.0 * l(0) - 154.0 * l(1) + 214.0 * l(2) - 156.0 * l(3) + 61.0 * l(4) - 10.0 * l(5)) * c4;
    out.row(n - 2) = (10.0 * l(0) - 15.0 * l(1) - 4.0 * l(2) + 14.0 * l(3) - 6.0 * l(4) + l(5)) * c4;
    for (Index i = 2; i < n - 2; ++i)
      out.row(i) = (-f.row(i - 2) + 16.0 * f.row(i - 1) - 30.0 * f.row(i) + 16.0 * f.row(i + 1) - f.row(i + 2)) * c4;
    return out;
  }
  for (Index i = 1; i < n - 1; ++i) {
    if (order == StencilOrder::Fourth && i >= 2 && i <= n - 3)
      out.row(i) = (-f.row(i - 2) + 16.0 * f.row(i - 1) - 30.0 * f.row(i) + 16.0 * f.row(i + 1) -
                    f.row(i + 2)) *
                   c4;
    else
      out.row(i) = (f.row(i - 1) - 2.0 * f.row(i) + f.row(i + 1)) * c2;
  }
  return out;
}

GridArray transposed(const GridArray& f) { return f.transpose(); }

void check_shape(const GridArray& f, const GridDomain& d) {
  if (f.rows() != d.nu || f.cols() != d.nv)
    throw Error(ErrorKind::InvalidField, "array shape does not match domain");
}

}  // namespace

GridArray d_du(const GridArray& f, const GridDomain& d, StencilOrder order) {
  check_shape(f, d);
  return diff_rows(f, d.hu, order);
}

GridArray d_dv(const GridArray& f, const GridDomain& d, StencilOrder order) {
  check_shape(f, d);
  return transposed(diff_rows(transposed(f), d.hv, order));
}

GridArray d2_duu(const GridArray& f, const GridDomain& d, StencilOrder order) {
  check_shape(f, d);
  return diff2_rows(f, d.hu, order);
}

GridArray d2_dvv(const GridArray& f, const GridDomain& d, StencilOrder order) {
  check_shape(f, d);
  return transposed(diff2_rows(transposed(f), d.hv, order));
}

GridArray d2_dudv(const GridArray& f, const GridDomain& d, StencilOrder order) {
  return d_du(d_dv(f, d, order), d, order);
}

ScalarField d_du(const ScalarField& f, StencilOrder order) {
  return {f.domain, d_du(f.values, f.domain, order)};
}
ScalarField d_dv(const ScalarField& f, StencilOrder order) {
  return {f.domain, d_dv(f.values, f.domain, order)};
}
ScalarField d2_duu(const ScalarField& f, StencilOrder order) {
  return {f.domain, d2_duu(f.values, f.domain, order)};
}
ScalarField d2_dvv(const ScalarField& f, StencilOrder order) {
  return {f.domain, d2_dvv(f.values, f.domain, order)};
}
ScalarField d2_dudv(const ScalarField& f, StencilOrder order) {
  return {f.domain, d2_dudv(f.values, f.domain, order)};
}

Vec4Field d_du(const Vec4Field& f, StencilOrder order) {
  Vec4Field out(f.domain);
  for (int k = 0; k < 4; ++k) out.components[k] = d_du(f.components[k], f.domain, order);
  return out;
}
Vec4Field d_dv(const Vec4Field& f, StencilOrder order) {
  Vec4Field out(f.domain);
  for (int k = 0; k < 4; ++k) out.components[k] = d_dv(f.components[k], f.domain, order);
  return out;
}
Vec4Field d2_dudv(const Vec4Field& f, StencilOrder order) {
  Vec4Field out(f.domain);
  for (int k = 0; k < 4; ++k) out.components[k] = d2_dudv(f.components[k], f.domain, order);
  return out;
}

double interpolate(const GridArray& f, const GridDomain& d, double u, double v) {
  const double su = std::clamp((u - d.u0) / d.hu, 0.0, static_cast<double>(d.nu - 1));
  const double sv = std::clamp((v - d.v0) / d.hv, 0.0, static_cast<double>(d.nv - 1));
  const Index i = std::min<Index>(static_cast<Index>(su), d.nu - 2);
  const Index j = std::min<Index>(static_cast<Index>(sv), d.nv - 2);
  const double a = su - static_cast<double>(i);
  const double b = sv - static_cast<double>(j);
  return (1 - a) * ((1 - b) * f(i, j) + b * f(i, j + 1)) +
         a * ((1 - b) * f(i + 1, j) + b * f(i + 1, j + 1));
}

namespace {
auto interior(const GridArray& f, Index margin) {
  if (2 * margin >= f.rows() || 2 * margin >= f.cols())
    throw Error(ErrorKind::GridTooSmall, "grid has no interior for margin " + std::to_string(margin));
  return f.block(margin, margin, f.rows() - 2 * margin, f.cols() - 2 * margin);
}
}  // namespace

double interior_max(const GridArray& f, Index margin) {
  return interior(f, margin).abs().maxCoeff();
}

double interior_l2(const GridArray& f, const GridDomain& d, Index margin) {
  return std::sqrt(d.hu * d.hv * interior(f, margin).square().sum());
}

double interior_min_abs(const GridArray& f, Index margin) {
  return interior(f, margin).abs().minCoeff();
}

}  // namespace tsurf
