#include <doctest.h>

#include <cmath>
#include <random>

#include "tsurf/catalog.hpp"
#include "tsurf/reconstruction.hpp"
#include "tsurf/surface.hpp"

using namespace tsurf;

namespace {

// nu from the exact chart: H = -(normal part of z_uv) / f^2 with the tangent
// projection written in the null basis z_u, z_v.
double oracle_nu(const AnalyticChart& c, double u, double v) {
  const Vec4 zu = c.z_u(u, v), zv = c.z_v(u, v), w = c.z_uv(u, v);
  const double F = minkowski_dot(zu, zv);
  const Vec4 normal = w - (minkowski_dot(w, zv) * zu + minkowski_dot(w, zu) * zv) / F;
  const Vec4 H = -normal / (-F);
  return std::sqrt(minkowski_square(H));
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("analytic charts are isotropic") {
  const GridDomain d = make_domain(-0.5, 0.5, -0.5, 0.5, 7, 7);
  for (const AnalyticChart& c : {product_chart(1, 2), warped_product_chart(1, 2, 0.5), cylinder_chart(1), plane_chart()}) {
    for (Index i = 0; i < d.nu; ++i)
      for (Index j = 0; j < d.nv; ++j) {
        const Vec4 zu = c.z_u(d.u(i), d.v(j)), zv = c.z_v(d.u(i), d.v(j));
        CHECK(std::abs(minkowski_square(zu)) < 1e-12);
        CHECK(std::abs(minkowski_square(zv)) < 1e-12);
        CHECK(minkowski_dot(zu, zv) < 0.0);
      }
  }
}

TEST_CASE("isotropy check") {
  const GridDomain d = make_domain(0, 1, 0, 1, 51, 51);
  const ScalarField f = check_isotropic(product_surface(1, 2, d));
  CHECK(interior_max(f.values - 1 / std::sqrt(2.0), 0) < 1e-3);

  // Euclidean-style parametrization (u, v) -> (u, v, 0, 0) is not isotropic.
  SurfacePatch flat{Vec4Field::sample(d, [](double u, double v) { return Vec4(u, v, 0, 0); }), {}, {}};
  CHECK(kind_of([&] { check_isotropic(flat); }) == ErrorKind::NotIsotropic);
  try {
    check_isotropic(flat);
  } catch (const Error& e) {
    CHECK(e.detail().find("E") != std::string::npos);
  }
}

TEST_CASE("product surface invariants converge to the chart oracle") {
  const AnalyticChart chart = product_chart(1, 2);
  const double nu_exact = oracle_nu(chart, 0.3, 0.7);
  CHECK(nu_exact == doctest::Approx(std::sqrt(5.0) / 4).epsilon(1e-14));
  double prev = 0.0;
  for (Index n : {51, 101}) {
    const GridDomain d = make_domain(0, 1, 0, 1, n, n);
    const Extraction ex = extract_invariants(product_surface(1, 2, d));
    const double err = interior_max(ex.invariants.nu.values - nu_exact, 3 * (n - 1) / 50);
    if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
    prev = err;
    CHECK(err < 1e-5);
    // x = z_u / f with f from the same stencils: the Gram error is O(h^2).
    CHECK(ex.geometry.frames.max_gram_residual() < 1e-4);
    CHECK(ex.geometry.clamped_radicands == 0);
  }
}

TEST_CASE("warped product extraction matches the family closure") {
  const GridDomain d = make_domain(0, 1, 0, 1, 101, 101);
  const Extraction ex = extract_invariants(warped_product_surface(1, 2, 0.5, d), {1e-3, 1e-9, StencilOrder::Fourth, 1});
  const InvariantFamily fam = warped_product_family(1, 2, 0.5);
  const InvariantSet exact = fam.sample(d);
  const DerivedCoefficients dexact = fam.sample_derived(d);
  const Index m = 6;
  CHECK(interior_max(ex.invariants.f.values - exact.f.values, m) < 1e-7);
  CHECK(interior_max(ex.invariants.nu.values - exact.nu.values, m) < 1e-6);
  CHECK(interior_max(ex.invariants.lambda1.values - exact.lambda1.values, m) < 1e-6);
  CHECK(interior_max(ex.invariants.lambda2.values - exact.lambda2.values, m) < 1e-6);
  CHECK(interior_max(ex.invariants.mu1.values - exact.mu1.values, m) < 1e-6);
  CHECK(interior_max(ex.invariants.mu2.values - exact.mu2.values, m) < 1e-6);
  CHECK(interior_max(ex.derived.gamma1.values - dexact.gamma1.values, m) < 1e-6);
  CHECK(interior_max(ex.derived.beta1.values - dexact.beta1.values, m) < 1e-5);
  CHECK(interior_max(ex.derived.beta2.values - dexact.beta2.values, m) < 1e-5);
}

TEST_CASE("frames are positively oriented and flip with the orientation option") {
  const GridDomain d = make_domain(0, 1, 0, 1, 21, 21);
  const SurfacePatch p = product_surface(1, 2, d);
  const Extraction pos = extract_invariants(p);
  AnalysisOptions o;
  o.n2_orientation = -1;
  const Extraction neg = extract_invariants(p, o);
  CHECK(pos.geometry.frames.at(5, 5).orientation() > 0.0);
  CHECK(neg.geometry.frames.at(5, 5).orientation() < 0.0);
  CHECK(interior_max(pos.invariants.mu1.values + neg.invariants.mu1.values, 0) < 1e-12);
  CHECK(interior_max(pos.invariants.mu2.values + neg.invariants.mu2.values, 0) < 1e-12);
  CHECK(interior_max(pos.invariants.nu.values - neg.invariants.nu.values, 0) == 0.0);

  // beta vanishes on the (warped) product surfaces; a patch rebuilt from
  // third-type data has beta1 != 0.
  const InvariantSet third = third_type_family(1, 1, 1, make_domain(0.25, 1.25, 0.25, 1.25, 51, 51));
  ReconstructionOptions ro;
  ro.order = StencilOrder::Fourth;
  ro.interpolation = Interpolation::Cubic;
  const SurfacePatch w = reconstruct(third, Vec4::Zero(), standard_frame(), ro).patch;
  AnalysisOptions wo;
  wo.isotropy_tol = 1e-2;
  const Extraction wp = extract_invariants(w, wo);
  wo.n2_orientation = -1;
  const Extraction wn = extract_invariants(w, wo);
  CHECK(interior_max(wp.derived.beta1.values, 3) > 0.1);
  CHECK(interior_max(wp.derived.beta1.values + wn.derived.beta1.values, 0) < 1e-12);
  CHECK(interior_max(wp.derived.beta2.values + wn.derived.beta2.values, 0) < 1e-12);
  const auto rp = integrability_residuals(wp.invariants, wp.derived);
  const auto rn = integrability_residuals(wn.invariants, wn.derived);
  for (size_t k = 0; k < rp.entries.size(); ++k)
    CHECK(rp.entries[k].max_norm == doctest::Approx(rn.entries[k].max_norm).epsilon(1e-9));
}

TEST_CASE("n1 is unit spacelike and orthogonal to the null tangents") {
  const GridDomain d = make_domain(0, 1, 0, 1, 41, 41);
  const GeometricFrame g = geometric_frame(warped_product_surface(1, 2, 0.5, d));
  for (const Frame& F : g.frames.frames) {
    CHECK(std::abs(minkowski_square(F.n1()) - 1.0) < 1e-12);
    CHECK(std::abs(minkowski_dot(F.n1(), F.x())) < 1e-12);
    CHECK(std::abs(minkowski_dot(F.n1(), F.y())) < 1e-12);
  }
}

TEST_CASE("extracted sets satisfy the integrability conditions in the limit") {
  ResidualReport coarse, fine;
  for (Index n : {41, 81}) {
    const GridDomain d = make_domain(0, 1, 0, 1, n, n);
    const Extraction ex = extract_invariants(warped_product_surface(1, 2, 0.5, d));
    (n == 41 ? coarse : fine) = integrability_residuals(ex.invariants, ex.derived, StencilOrder::Second, 3 * (n - 1) / 40);
  }
  for (const auto& e : with_convergence(coarse, fine).entries) {
    CAPTURE(e.condition);
    REQUIRE(e.order.has_value());
    CHECK(*e.order > 1.7);
  }
}

TEST_CASE("extracted frame Gram residual is second order") {
  auto res = [](Index n) {
    return geometric_frame(product_surface(1, 2, make_domain(0, 1, 0, 1, n, n))).frames.max_gram_residual();
  };
  CHECK(res(41) / res(81) > 3.4);
}

TEST_CASE("extraction is equivariant under Lorentz motions") {
  const GridDomain d = make_domain(0, 1, 0, 1, 41, 41);
  const SurfacePatch p = product_surface(1, 2, d);
  const Extraction base = extract_invariants(p);
  std::mt19937_64 rng(21);
  for (int k = 0; k < 5; ++k) {
    const LorentzMotion M = random_motion(rng, 1.0, 1.0);
    const Extraction moved = extract_invariants(apply_motion(M, p));
    for (auto [a, b] : {std::pair{&base.invariants.nu, &moved.invariants.nu},
                        std::pair{&base.invariants.mu1, &moved.invariants.mu1},
                        std::pair{&base.invariants.lambda2, &moved.invariants.lambda2}})
      CHECK(interior_max(a->values - b->values, 0) < 1e-10);
    const Frame expected = M.apply(base.geometry.frames.at(3, 4));
    CHECK((moved.geometry.frames.at(3, 4).legs - expected.legs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("degeneracies") {
  const GridDomain d = make_domain(0, 1, 0, 1, 41, 41);
  const DegeneracyFlags cyl = detect_degeneracies(cylinder_surface(1, d));
  CHECK(cyl.inflection_fraction(3) == 1.0);
  CHECK(cyl.minimal_fraction(3) == 0.0);
  CHECK(classify(crop(extract_invariants(cylinder_surface(1, d)).invariants, 3)) ==
        SurfaceType::InflectionDegenerate);

  const DegeneracyFlags plane = detect_degeneracies(plane_surface(d));
  CHECK(plane.minimal_fraction(0) == 1.0);
  CHECK(plane.inflection_fraction(0) == 0.0);
  CHECK(kind_of([&] { geometric_frame(plane_surface(d)); }) == ErrorKind::MinimalPoint);

  const DegeneracyFlags prod = detect_degeneracies(product_surface(1, 2, d));
  CHECK(prod.inflection_fraction(0) == 0.0);
  CHECK(prod.minimal_fraction(0) == 0.0);
}

TEST_CASE("with_geometry and crop") {
  const GridDomain d = make_domain(0, 1, 0, 1, 21, 21);
  const SurfacePatch p = product_surface(1, 2, d);
  const SurfacePatch g = with_geometry(p, geometric_frame(p));
  REQUIRE(g.frames.has_value());
  REQUIRE(g.f.has_value());
  const SurfacePatch c = crop(g, 2);
  CHECK(c.domain().nu == 17);
  CHECK(c.domain().u0 == doctest::Approx(0.1));
  CHECK((c.z.at(0, 0) - g.z.at(2, 2)).norm() == 0.0);
  CHECK((c.frames->at(1, 1).legs - g.frames->at(3, 3).legs).norm() == 0.0);
}

TEST_CASE("apply_motion on patches") {
  const GridDomain d = make_domain(0, 1, 0, 1, 21, 21);
  const SurfacePatch p0 = product_surface(1, 2, d);
  const SurfacePatch p = with_geometry(p0, geometric_frame(p0));

  const Vec4 t(0.5, -1, 2, 3);
  const SurfacePatch shifted = apply_motion(LorentzMotion::translation_by(t), p);
  CHECK((shifted.z.at(4, 7) - (p.z.at(4, 7) + t)).norm() < 1e-15);
  CHECK((shifted.frames->at(4, 7).legs - p.frames->at(4, 7).legs).norm() == 0.0);

  const Frame& F = p.frames->at(0, 0);
  const SurfacePatch same = apply_motion(motion_from_frames(p.z.at(0, 0), reorthonormalize(F), p.z.at(0, 0),
                                                            reorthonormalize(F)), p);
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j) CHECK((same.z.at(i, j) - p.z.at(i, j)).norm() < 1e-12);

  std::mt19937_64 rng(31);
  const LorentzMotion M = random_motion(rng);
  const SurfacePatch moved = apply_motion(M, p);
  const MetricSamples a = first_fundamental_form(p), b = first_fundamental_form(moved);
  CHECK(interior_max(a.F.values - b.F.values, 0) < 1e-12);
  CHECK(interior_max(a.E.values - b.E.values, 0) < 1e-12);
}
