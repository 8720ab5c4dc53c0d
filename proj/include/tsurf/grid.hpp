#pragma once

// Rectangular (u, v) grids, fields sampled on them and the finite-difference
// operators shared by extraction and residual evaluation.
//
// Storage is row-major with u as the slow index: sample (i, j) sits at
// (u0 + i hu, v0 + j hv) and flat offset i * nv + j.

#include <Eigen/Dense>

#include <array>
#include <functional>

#include "tsurf/minkowski.hpp"

namespace tsurf {

using Index = Eigen::Index;
using GridArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GridDomain {
  double u0 = 0.0;
  double v0 = 0.0;
  double hu = 0.01;
  double hv = 0.01;
  Index nu = 3;
  Index nv = 3;

  double u(Index i) const { return u0 + static_cast<double>(i) * hu; }
  double v(Index j) const { return v0 + static_cast<double>(j) * hv; }
  double u_end() const { return u(nu - 1); }
  double v_end() const { return v(nv - 1); }
  Index size() const { return nu * nv; }

  /// Throws GridTooSmall for nu, nv < 3 or non-positive steps.
  void validate() const;

  /// Same rectangle, steps halved.
  GridDomain refined() const;

  bool operator==(const GridDomain&) const = default;
};

/// Grid covering [u0, u1] x [v0, v1] with n samples per axis.
GridDomain make_domain(double u0, double u1, double v0, double v1, Index nu, Index nv);

enum class StencilOrder { Second = 2, Fourth = 4 };

/// Index margin on which every composed stencil (up to third derivatives)
/// is purely central: 3 for the second-order stencils, 6 for fourth-order.
Index default_margin(StencilOrder order);

struct ScalarField {
  GridDomain domain;
  GridArray values;

  ScalarField() = default;
  /// Rejects mismatched shapes and non-finite samples (InvalidField).
  ScalarField(const GridDomain& domain, GridArray values);

  static ScalarField sample(const GridDomain& domain,
                            const std::function<double(double, double)>& fn);
  static ScalarField constant(const GridDomain& domain, double value);

  double operator()(Index i, Index j) const { return values(i, j); }
};

struct Vec4Field {
  GridDomain domain;
  std::array<GridArray, 4> components;

  Vec4Field() = default;
  explicit Vec4Field(const GridDomain& domain);
  Vec4Field(const GridDomain& domain, std::array<GridArray, 4> components);

  static Vec4Field sample(const GridDomain& domain,
                          const std::function<Vec4(double, double)>& fn);

  Vec4 at(Index i, Index j) const {
    return {components[0](i, j), components[1](i, j), components[2](i, j), components[3](i, j)};
  }
  void set(Index i, Index j, const Vec4& p) {
    for (int k = 0; k < 4; ++k) components[k](i, j) = p(k);
  }
};

// Array-level difference operators. Second order: central in the interior,
// one-sided on the boundary rows. Fourth order: five-point central stencils
// with fourth-order one-sided closures on the two outer rows (n >= 6).
GridArray d_du(const GridArray& f, const GridDomain& domain, StencilOrder order = StencilOrder::Second);
GridArray d_dv(const GridArray& f, const GridDomain& domain, StencilOrder order = StencilOrder::Second);
GridArray d2_duu(const GridArray& f, const GridDomain& domain, StencilOrder order = StencilOrder::Second);
GridArray d2_dvv(const GridArray& f, const GridDomain& domain, StencilOrder order = StencilOrder::Second);
/// d_du(d_dv f); exact for bilinear data.
GridArray d2_dudv(const GridArray& f, const GridDomain& domain, StencilOrder order = StencilOrder::Second);

ScalarField d_du(const ScalarField& f, StencilOrder order = StencilOrder::Second);
ScalarField d_dv(const ScalarField& f, StencilOrder order = StencilOrder::Second);
ScalarField d2_duu(const ScalarField& f, StencilOrder order = StencilOrder::Second);
ScalarField d2_dvv(const ScalarField& f, StencilOrder order = StencilOrder::Second);
ScalarField d2_dudv(const ScalarField& f, StencilOrder order = StencilOrder::Second);

Vec4Field d_du(const Vec4Field& f, StencilOrder order = StencilOrder::Second);
Vec4Field d_dv(const Vec4Field& f, StencilOrder order = StencilOrder::Second);
Vec4Field d2_dudv(const Vec4Field& f, StencilOrder order = StencilOrder::Second);

/// Bundles a domain and a stencil order so residual formulas read compactly:
/// `D.u(nu) + D.v(lambda1)`.
struct Differ {
  GridDomain domain;
  StencilOrder order = StencilOrder::Second;

  GridArray u(const GridArray& f) const { return d_du(f, domain, order); }
  GridArray v(const GridArray& f) const { return d_dv(f, domain, order); }
  GridArray uu(const GridArray& f) const { return d2_duu(f, domain, order); }
  GridArray vv(const GridArray& f) const { return d2_dvv(f, domain, order); }
  GridArray uv(const GridArray& f) const { return d2_dudv(f, domain, order); }
};

/// Bilinear interpolation, clamped to the grid rectangle.
double interpolate(const GridArray& f, const GridDomain& domain, double u, double v);

double interior_max(const GridArray& f, Index margin);
/// sqrt(hu hv sum r^2) over the interior block.
double interior_l2(const GridArray& f, const GridDomain& domain, Index margin);
/// min |f| over the interior block.
double interior_min_abs(const GridArray& f, Index margin);

bool all_finite(const GridArray& f);

/// Sample-wise Minkowski product of two vector fields on the same grid.
GridArray minkowski_dot(const Vec4Field& a, const Vec4Field& b);

}  // namespace tsurf
