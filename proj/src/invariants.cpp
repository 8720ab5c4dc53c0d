#include "tsurf/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsurf {

std::string_view to_string(SurfaceType type) {
  switch (type) {
    case SurfaceType::FirstType: return "FirstType";
    case SurfaceType::SecondType: return "SecondType";
    case SurfaceType::ThirdType: return "ThirdType";
    case SurfaceType::InflectionDegenerate: return "InflectionDegenerate";
    case SurfaceType::Minimal: return "Minimal";
  }
  return "Unknown";
}

SurfaceType surface_type_from_string(std::string_view name) {
  if (name == "first" || name == "FirstType" || name == "1") return SurfaceType::FirstType;
  if (name == "second" || name == "SecondType" || name == "2") return SurfaceType::SecondType;
  if (name == "third" || name == "ThirdType" || name == "3") return SurfaceType::ThirdType;
  if (name == "inflection" || name == "InflectionDegenerate")
    return SurfaceType::InflectionDegenerate;
  if (name == "minimal" || name == "Minimal") return SurfaceType::Minimal;
  throw Error(ErrorKind::TypeMismatch, "unknown surface type '" + std::string(name) + "'");
}

void InvariantSet::validate() const {
  const GridDomain& d = f.domain;
  for (const ScalarField* s : {&nu, &lambda1, &lambda2, &mu1, &mu2})
    if (!(s->domain == d)) throw Error(ErrorKind::InvalidField, "invariant fields must share one domain");
  if (!(f.values > 0.0).all()) throw Error(ErrorKind::InvalidField, "f must be positive everywhere");
}

PointInvariants point_values(const InvariantSet& inv, const DerivedCoefficients& dc, Index i, Index j) {
  return {inv.f(i, j),      inv.nu(i, j),     inv.lambda1(i, j), inv.lambda2(i, j),
          inv.mu1(i, j),    inv.mu2(i, j),    dc.gamma1(i, j),   dc.gamma2(i, j),
          dc.beta1(i, j),   dc.beta2(i, j)};
}

PointInvariants interpolate(const InvariantSet& inv, const DerivedCoefficients& dc, double u, double v) {
  const GridDomain& d = inv.domain();
  auto at = [&](const ScalarField& s) { return interpolate(s.values, d, u, v); };
  return {at(inv.f),   at(inv.nu),  at(inv.lambda1), at(inv.lambda2), at(inv.mu1),
          at(inv.mu2), at(dc.gamma1), at(dc.gamma2), at(dc.beta1),    at(dc.beta2)};
}

namespace {

template <typename Member>
ScalarField sample_member(const GridDomain& domain, const std::vector<PointInvariants>& pts, Member m) {
  GridArray a(domain.nu, domain.nv);
  for (Index i = 0; i < domain.nu; ++i)
    for (Index j = 0; j < domain.nv; ++j) a(i, j) = pts[static_cast<size_t>(i * domain.nv + j)].*m;
  return {domain, std::move(a)};
}

std::vector<PointInvariants> sample_points(const GridDomain& domain,
                                           const std::function<PointInvariants(double, double)>& fn) {
  domain.validate();
  std::vector<PointInvariants> pts(static_cast<size_t>(domain.size()));
  for (Index i = 0; i < domain.nu; ++i)
    for (Index j = 0; j < domain.nv; ++j)
      pts[static_cast<size_t>(i * domain.nv + j)] = fn(domain.u(i), domain.v(j));
  return pts;
}

}  // namespace

InvariantSet sample_invariants(const GridDomain& domain,
                               const std::function<PointInvariants(double, double)>& fn) {
  const auto pts = sample_points(domain, fn);
  InvariantSet inv{sample_member(domain, pts, &PointInvariants::f),
                   sample_member(domain, pts, &PointInvariants::nu),
                   sample_member(domain, pts, &PointInvariants::lambda1),
                   sample_member(domain, pts, &PointInvariants::lambda2),
                   sample_member(domain, pts, &PointInvariants::mu1),
                   sample_member(domain, pts, &PointInvariants::mu2)};
  inv.validate();
  return inv;
}

DerivedCoefficients sample_derived(const GridDomain& domain,
                                   const std::function<PointInvariants(double, double)>& fn) {
  const auto pts = sample_points(domain, fn);
  return {sample_member(domain, pts, &PointInvariants::gamma1),
          sample_member(domain, pts, &PointInvariants::gamma2),
          sample_member(domain, pts, &PointInvariants::beta1),
          sample_member(domain, pts, &PointInvariants::beta2)};
}

double ResidualReport::max_norm() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.max_norm);
  return m;
}

const ResidualEntry& ResidualReport::at(std::string_view condition) const {
  for (const auto& e : entries)
    if (e.condition == condition) return e;
  throw Error(ErrorKind::InvalidField, "no residual named '" + std::string(condition) + "'");
}

ResidualReport ResidualFields::report() const {
  ResidualReport r;
  r.margin = margin;
  for (const auto& nf : fields)
    r.entries.push_back({nf.name, interior_max(nf.values, margin), interior_l2(nf.values, domain, margin), {}});
  return r;
}

const GridArray& ResidualFields::at(std::string_view name) const {
  for (const auto& nf : fields)
    if (nf.name == name) return nf.values;
  throw Error(ErrorKind::InvalidField, "no residual field named '" + std::string(name) + "'");
}

ResidualReport with_convergence(const ResidualReport& coarse, const ResidualReport& fine) {
  if (coarse.entries.size() != fine.entries.size())
    throw Error(ErrorKind::DomainMismatch, "refinement reports list different conditions");
  ResidualReport out = coarse;
  for (size_t k = 0; k < out.entries.size(); ++k) {
    if (out.entries[k].condition != fine.entries[k].condition)
      throw Error(ErrorKind::DomainMismatch, "refinement reports list different conditions");
    const double a = coarse.entries[k].max_norm;
    const double b = fine.entries[k].max_norm;
    if (a > 0.0 && b > 0.0) out.entries[k].order = std::log2(a / b);
  }
  return out;
}

double curvature_scale(const InvariantSet& inv) {
  double s = 0.0;
  for (const ScalarField* f : {&inv.nu, &inv.lambda1, &inv.lambda2, &inv.mu1, &inv.mu2})
    s = std::max(s, f->values.abs().maxCoeff());
  return s;
}

namespace {

enum class ZeroTest { Zero, NonZero, Mixed };

ZeroTest zero_test(const GridArray& a, double threshold) {
  const GridArray m = a.abs();
  if (m.maxCoeff() < threshold) return ZeroTest::Zero;
  if (m.minCoeff() > threshold) return ZeroTest::NonZero;
  return ZeroTest::Mixed;
}

[[noreturn]] void ambiguous(const std::string& field) {
  throw Error(ErrorKind::AmbiguousType,
              field + " is neither uniformly zero nor uniformly nonzero on the grid; crop to a "
                      "single-type sub-domain");
}

}  // namespace

SurfaceType classify(const InvariantSet& inv, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidField, "classification tolerance must be positive");
  inv.validate();
  const double scale = curvature_scale(inv);
  if (scale == 0.0) return SurfaceType::Minimal;
  const double thr = tol * scale;

  const ZeroTest nu = zero_test(inv.nu.values, thr);
  if (nu == ZeroTest::Zero) return SurfaceType::Minimal;
  if (nu == ZeroTest::Mixed) ambiguous("nu");

  const ZeroTest mu1 = zero_test(inv.mu1.values, thr);
  const ZeroTest mu2 = zero_test(inv.mu2.values, thr);
  if (mu1 == ZeroTest::Zero && mu2 == ZeroTest::Zero) return SurfaceType::InflectionDegenerate;
  if (mu1 == ZeroTest::Mixed) ambiguous("mu1");
  if (mu2 == ZeroTest::Mixed) ambiguous("mu2");
  if (mu1 == ZeroTest::Zero)
    throw Error(ErrorKind::AmbiguousType, "mu1 vanishes while mu2 does not; apply swap_parameters");
  if (mu2 == ZeroTest::NonZero) return SurfaceType::FirstType;

  const ZeroTest lambda2 = zero_test(inv.lambda2.values, thr);
  if (lambda2 == ZeroTest::NonZero) return SurfaceType::SecondType;
  if (lambda2 == ZeroTest::Zero) return SurfaceType::ThirdType;
  ambiguous("lambda2");
}

MeanCurvatureFlags mean_curvature_flags(const InvariantSet& inv, const DerivedCoefficients& dc,
                                        double tol, Index margin) {
  const bool beta_zero = interior_max(dc.beta1.values, margin) < tol &&
                         interior_max(dc.beta2.values, margin) < tol;
  const GridArray& nu = inv.nu.values;
  const auto block = nu.block(margin, margin, nu.rows() - 2 * margin, nu.cols() - 2 * margin);
  const bool nu_const = block.maxCoeff() - block.minCoeff() < tol;
  return {beta_zero && nu_const, beta_zero && !nu_const};
}

namespace {

ScalarField transpose_field(const ScalarField& s, double sign = 1.0) {
  const GridDomain& d = s.domain;
  GridDomain t{d.v0, d.u0, d.hv, d.hu, d.nv, d.nu};
  return {t, GridArray(sign * s.values.transpose())};
}

}  // namespace

InvariantSet swap_parameters(const InvariantSet& inv) {
  return {transpose_field(inv.f),        transpose_field(inv.nu),
          transpose_field(inv.lambda2),  transpose_field(inv.lambda1),
          transpose_field(inv.mu2, -1.0), transpose_field(inv.mu1, -1.0)};
}

DerivedCoefficients swap_parameters(const DerivedCoefficients& dc) {
  return {transpose_field(dc.gamma2), transpose_field(dc.gamma1),
          transpose_field(dc.beta2, -1.0), transpose_field(dc.beta1, -1.0)};
}

namespace {

void guard_nonzero(const GridArray& a, const GridDomain& d, double guard, const char* what) {
  Index bi = 0, bj = 0;
  const double m = a.abs().minCoeff(&bi, &bj);
  if (!(m >= guard)) {
    std::ostringstream os;
    os << what << " drops to " << m << " at (u, v) = (" << d.u(bi) << ", " << d.v(bj)
       << "), below the guard " << guard;
    throw Error(ErrorKind::DivisionGuard, os.str());
  }
}

// Pieces shared by the beta formulas: P = (lambda2)_u + nu_v + lambda2 (ln f^2)_u,
// Q = nu_u + (lambda1)_v + lambda1 (ln f^2)_v, with ln f^2 computed as 2 ln f.
struct Shared {
  Differ D;
  GridArray f, nu, l1, l2, m1, m2;
  GridArray ell, ell_u, ell_v;

  Shared(const InvariantSet& inv, StencilOrder order)
      : D{inv.domain(), order},
        f(inv.f.values),
        nu(inv.nu.values),
        l1(inv.lambda1.values),
        l2(inv.lambda2.values),
        m1(inv.mu1.values),
        m2(inv.mu2.values),
        ell(2.0 * inv.f.values.log()),
        ell_u(D.u(ell)),
        ell_v(D.v(ell)) {}

  GridArray P() const { return D.u(l2) + D.v(nu) + l2 * ell_u; }
  GridArray Q() const { return D.u(nu) + D.v(l1) + l1 * ell_v; }
};

}  // namespace

DerivedCoefficients derived_coefficients(const InvariantSet& inv, SurfaceType type,
                                         StencilOrder order, double guard) {
  inv.validate();
  const GridDomain& d = inv.domain();
  const Shared s(inv, order);
  const GridArray f2 = s.f.square();
  GridArray gamma1 = s.D.u(s.f) / f2;
  GridArray gamma2 = s.D.v(s.f) / f2;
  GridArray beta1, beta2;

  switch (type) {
    case SurfaceType::FirstType:
      guard_nonzero(s.m1, d, guard, "mu1");
      guard_nonzero(s.m2, d, guard, "mu2");
      beta1 = s.P() / (s.f * s.m2);
      beta2 = s.Q() / (s.f * s.m1);
      break;
    case SurfaceType::SecondType:
      guard_nonzero(s.m1, d, guard, "mu1");
      guard_nonzero(s.l2, d, guard, "lambda2");
      beta2 = s.Q() / (s.f * s.m1);
      beta1 = -s.nu * beta2 / s.l2;
      break;
    case SurfaceType::ThirdType:
      guard_nonzero(s.m1, d, guard, "mu1");
      guard_nonzero(s.nu, d, guard, "nu");
      beta2 = GridArray::Zero(d.nu, d.nv);
      beta1 = -(s.D.v(s.m1) + s.m1 * s.ell_v) / (s.nu * s.f);
      break;
    default:
      throw Error(ErrorKind::TypeMismatch, "no derived coefficients for " + std::string(to_string(type)));
  }
  return {{d, std::move(gamma1)}, {d, std::move(gamma2)}, {d, std::move(beta1)}, {d, std::move(beta2)}};
}

ResidualFields integrability_residual_fields(const InvariantSet& inv, const DerivedCoefficients& dc,
                                             StencilOrder order, std::optional<Index> margin) {
  inv.validate();
  const Differ D{inv.domain(), order};
  const GridArray& f = inv.f.values;
  const GridArray& nu = inv.nu.values;
  const GridArray& l1 = inv.lambda1.values;
  const GridArray& l2 = inv.lambda2.values;
  const GridArray& m1 = inv.mu1.values;
  const GridArray& m2 = inv.mu2.values;
  const GridArray& g1 = dc.gamma1.values;
  const GridArray& g2 = dc.gamma2.values;
  const GridArray& b1 = dc.beta1.values;
  const GridArray& b2 = dc.beta2.values;
  auto X = [&](const GridArray& a) -> GridArray { return D.u(a) / f; };
  auto Y = [&](const GridArray& a) -> GridArray { return D.v(a) / f; };

  ResidualFields out{inv.domain(), margin.value_or(default_margin(order)), {}};
  out.fields.push_back({"integrability_1", X(l2) + Y(nu) + 2.0 * g1 * l2 - m2 * b1});
  out.fields.push_back({"integrability_2", X(nu) + Y(l1) + 2.0 * g2 * l1 - m1 * b2});
  out.fields.push_back({"integrability_3", X(m2) + 2.0 * g1 * m2 + nu * b2 + l2 * b1});
  out.fields.push_back({"integrability_4", Y(m1) + 2.0 * g2 * m1 + nu * b1 + l1 * b2});
  out.fields.push_back(
      {"integrability_5", X(g2) + Y(g1) + 2.0 * g1 * g2 - nu.square() + l1 * l2 + m1 * m2});
  out.fields.push_back(
      {"integrability_6", X(b2) - Y(b1) + m1 * l2 - l1 * m2 + g1 * b2 - g2 * b1});
  return out;
}

ResidualReport integrability_residuals(const InvariantSet& inv, const DerivedCoefficients& dc,
                                       StencilOrder order, std::optional<Index> margin) {
  return integrability_residual_fields(inv, dc, order, margin).report();
}

namespace {

void require_zero(const GridArray& a, double thr, const char* what, SurfaceType type) {
  if (!(a.abs().maxCoeff() <= thr))
    throw Error(ErrorKind::TypeMismatch,
                std::string(what) + " must vanish for " + std::string(to_string(type)));
}

void require_nonzero(const GridArray& a, const char* what, SurfaceType type) {
  if (!(a.abs().minCoeff() > 0.0))
    throw Error(ErrorKind::TypeMismatch,
                std::string(what) + " must be nonzero for " + std::string(to_string(type)));
}

}  // namespace

ResidualFields theorem_condition_fields(const InvariantSet& inv, SurfaceType type, StencilOrder order,
                                        std::optional<Index> margin, double zero_tol) {
  inv.validate();
  const Shared s(inv, order);
  const Differ& D = s.D;
  const GridArray& f = s.f;
  const GridArray& nu = s.nu;
  const GridArray& l1 = s.l1;
  const GridArray& l2 = s.l2;
  const GridArray& m1 = s.m1;
  const GridArray& m2 = s.m2;
  const GridArray& ell_u = s.ell_u;
  const GridArray& ell_v = s.ell_v;
  const double thr = zero_tol * std::max(curvature_scale(inv), 1e-300);

  // (2 f f_uv - 2 f_u f_v) / f^4, shared by every theorem.
  const GridArray f_u = D.u(f), f_v = D.v(f);
  const GridArray gauss = (2.0 * f * D.uv(f) - 2.0 * f_u * f_v) / f.pow(4);

  ResidualFields out{inv.domain(), margin.value_or(default_margin(order)), {}};
  switch (type) {
    case SurfaceType::FirstType: {
      require_nonzero(m1, "mu1", type);
      require_nonzero(m2, "mu2", type);
      const GridArray P = s.P(), Q = s.Q();
      const GridArray ell_uv = D.uv(s.ell);
      const GridArray a2 = l2.square() + m2.square();
      const GridArray a1 = l1.square() + m1.square();
      out.fields.push_back({"i", D.u(a2) + 2.0 * ell_u * a2 + 2.0 * l2 * D.v(nu) + 2.0 * nu * m2 / m1 * Q});
      out.fields.push_back({"ii", D.v(a1) + 2.0 * ell_v * a1 + 2.0 * l1 * D.u(nu) + 2.0 * nu * m1 / m2 * P});
      out.fields.push_back({"iii", gauss + l1 * l2 + m1 * m2 - nu.square()});
      out.fields.push_back(
          {"iv", (m1 * l2 - m2 * l1) * (f.square() * m1 * m2 - ell_uv) + D.uu(nu) * m2 -
                     D.vv(nu) * m1 + D.uv(l1) * m2 - D.uv(l2) * m1 + m2 * D.u(l1) * ell_v -
                     m1 * D.v(l2) * ell_u - m2 * D.u(m1) / m1 * Q + m1 * D.v(m2) / m2 * P});
      break;
    }
    case SurfaceType::SecondType: {
      require_zero(m2, thr, "mu2", type);
      require_nonzero(m1, "mu1", type);
      require_nonzero(l2, "lambda2", type);
      const GridArray Q = s.Q();
      const GridArray ell_uv = D.uv(s.ell), ell_vv = D.vv(s.ell);
      const GridArray curv = nu.square() - l1 * l2;
      const GridArray l1_v = D.v(l1);
      const GridArray Q_u = D.uu(nu) + D.uv(l1) + D.u(l1) * ell_v + l1 * ell_uv;
      const GridArray Q_v = D.uv(nu) + D.vv(l1) + l1_v * ell_v + l1 * ell_vv;
      const GridArray log_m1_u = D.u(m1) / m1, log_m1_v = D.v(m1) / m1;
      const GridArray log_l2_v = D.v(l2) / l2;
      out.fields.push_back({"i", s.P()});
      out.fields.push_back({"ii", D.v(m1) + ell_v * m1 - curv / (l2 * m1) * Q});
      out.fields.push_back({"iii", gauss - curv});
      // Sign of the last bracket fixed against the flatness condition.
      out.fields.push_back({"iv", l2 * Q_u + nu * Q_v + f.square() * m1.square() * l2.square() -
                                      Q * (l2 * log_m1_u - D.v(nu) + nu * log_m1_v + nu * log_l2_v)});
      break;
    }
    case SurfaceType::ThirdType: {
      require_zero(m2, thr, "mu2", type);
      require_zero(l2, thr, "lambda2", type);
      require_nonzero(m1, "mu1", type);
      const GridArray ell_uv = D.uv(s.ell);
      if (!(ell_uv > 0.0).all())
        throw Error(ErrorKind::DivisionGuard, "(ln f^2)_uv must be positive for ThirdType");
      const GridArray nu_from_f = ell_uv.sqrt() / f;
      out.fields.push_back({"i", D.v(ell_uv / f.square())});
      out.fields.push_back({"ii", D.v(l1) + l1 * ell_v + D.u(nu_from_f)});
      out.fields.push_back({"iii", D.vv(m1) + D.v(m1) * ell_v + m1 * D.vv(s.ell)});
      out.fields.push_back({"nu_consistency", nu.square() - ell_uv / f.square()});
      break;
    }
    default:
      throw Error(ErrorKind::TypeMismatch,
                  "no fundamental theorem covers " + std::string(to_string(type)));
  }
  return out;
}

ResidualReport theorem_conditions_residuals(const InvariantSet& inv, SurfaceType type,
                                            StencilOrder order, std::optional<Index> margin,
                                            double zero_tol) {
  return theorem_condition_fields(inv, type, order, margin, zero_tol).report();
}

}  // namespace tsurf
