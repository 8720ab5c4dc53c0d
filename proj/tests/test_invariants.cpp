#include <doctest.h>

#include <cmath>

#include "tsurf/catalog.hpp"
#include "tsurf/invariants.hpp"

using namespace tsurf;

namespace {

InvariantSet constant_set(const GridDomain& d, double f, double nu, double l1, double l2, double m1, double m2) {
  return {ScalarField::constant(d, f),  ScalarField::constant(d, nu), ScalarField::constant(d, l1),
          ScalarField::constant(d, l2), ScalarField::constant(d, m1), ScalarField::constant(d, m2)};
}

SurfaceType classify_kind(const InvariantSet& inv, ErrorKind* kind) {
  try {
    return classify(inv);
  } catch (const Error& e) {
    *kind = e.kind();
    throw;
  }
}

}  // namespace

TEST_CASE("surface type names roundtrip") {
  for (SurfaceType t : {SurfaceType::FirstType, SurfaceType::SecondType, SurfaceType::ThirdType,
                        SurfaceType::InflectionDegenerate, SurfaceType::Minimal})
    CHECK(surface_type_from_string(to_string(t)) == t);
  CHECK(surface_type_from_string("second") == SurfaceType::SecondType);
  CHECK_THROWS_AS(surface_type_from_string("fourth"), Error);
}

TEST_CASE("classification case split") {
  const GridDomain d = make_domain(0, 1, 0, 1, 5, 5);
  CHECK(classify(constant_set(d, 1, 1, 0, 0, 1, 1)) == SurfaceType::FirstType);
  CHECK(classify(constant_set(d, 1, 1, 0, 2, 1, 0)) == SurfaceType::SecondType);
  CHECK(classify(constant_set(d, 1, 1, 3, 0, 1, 0)) == SurfaceType::ThirdType);
  CHECK(classify(constant_set(d, 1, 1, 3, 0, 0, 0)) == SurfaceType::InflectionDegenerate);
  CHECK(classify(constant_set(d, 1, 0, 3, 1, 1, 1)) == SurfaceType::Minimal);
  CHECK(classify(constant_set(d, 1, 0, 0, 0, 0, 0)) == SurfaceType::Minimal);

  ErrorKind kind{};
  CHECK_THROWS(classify_kind(constant_set(d, 1, 1, 0, 0, 0, 1), &kind));
  CHECK(kind == ErrorKind::AmbiguousType);
  CHECK(classify(swap_parameters(constant_set(d, 1, 1, 0, 0, 0, 1))) == SurfaceType::ThirdType);

  InvariantSet mixed = constant_set(d, 1, 1, 0, 0, 1, 1);
  mixed.mu2.values(2, 2) = 0.0;
  kind = {};
  CHECK_THROWS(classify_kind(mixed, &kind));
  CHECK(kind == ErrorKind::AmbiguousType);
}

TEST_CASE("classification tolerance is relative to the curvature scale") {
  const GridDomain d = make_domain(0, 1, 0, 1, 5, 5);
  // The same shape at two very different scales classifies identically.
  CHECK(classify(constant_set(d, 1, 1e-6, 0, 0, 1e-6, 1e-14)) == SurfaceType::ThirdType);
  CHECK(classify(constant_set(d, 1, 1e6, 0, 0, 1e6, 1e-2)) == SurfaceType::ThirdType);
  CHECK(classify(constant_set(d, 1, 1e-6, 0, 0, 1e-6, 1e-8)) == SurfaceType::FirstType);
}

TEST_CASE("invalid invariant sets are rejected") {
  const GridDomain d = make_domain(0, 1, 0, 1, 5, 5);
  InvariantSet bad = constant_set(d, 1, 1, 0, 0, 1, 1);
  bad.f.values(1, 1) = -0.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  InvariantSet other = constant_set(d, 1, 1, 0, 0, 1, 1);
  other.nu = ScalarField::constant(make_domain(0, 2, 0, 1, 5, 5), 1.0);
  CHECK_THROWS_AS(other.validate(), Error);
}

TEST_CASE("swap_parameters is an involution") {
  const GridDomain d = make_domain(0, 1, 2, 4, 6, 9);
  const InvariantSet inv = sample_invariants(d, [](double u, double v) {
    PointInvariants p;
    p.f = 1 + u * u;
    p.nu = 2 + v;
    p.lambda1 = u * v;
    p.lambda2 = u - v;
    p.mu1 = 1 + u;
    p.mu2 = -2 + v * v;
    return p;
  });
  const InvariantSet s = swap_parameters(inv);
  CHECK(s.domain().nu == 9);
  CHECK(s.domain().u0 == 2.0);
  CHECK(s.lambda1(3, 1) == inv.lambda2(1, 3));
  CHECK(s.mu1(3, 1) == -inv.mu2(1, 3));
  const InvariantSet back = swap_parameters(s);
  CHECK((back.mu2.values - inv.mu2.values).abs().maxCoeff() == 0.0);
  CHECK(back.domain() == inv.domain());
}

TEST_CASE("gamma from f = exp(uv)") {
  const GridDomain d = make_domain(0, 1, 0, 1, 81, 81);
  InvariantSet inv = constant_set(d, 1, 1, 0, 0, 1, 1);
  inv.f = ScalarField::sample(d, [](double u, double v) { return std::exp(u * v); });
  const GridArray g1 = ScalarField::sample(d, [](double u, double v) { return v * std::exp(-u * v); }).values;
  const GridArray g2 = ScalarField::sample(d, [](double u, double v) { return u * std::exp(-u * v); }).values;
  const double e2 = interior_max(derived_coefficients(inv, SurfaceType::FirstType).gamma1.values - g1, 0);
  const double e4 =
      interior_max(derived_coefficients(inv, SurfaceType::FirstType, StencilOrder::Fourth).gamma1.values - g1, 0);
  CHECK(e2 < 1e-3);
  CHECK(e4 < 1e-6);
  CHECK(interior_max(derived_coefficients(inv, SurfaceType::FirstType).gamma2.values - g2, 0) < 1e-3);
}

TEST_CASE("first-type beta on a hand-expanded example") {
  // f = e^{uv}, nu = uv, lambda1 = v, lambda2 = u^2, mu1 = 2, mu2 = 3:
  //   P = (lambda2)_u + nu_v + 2 lambda2 v = 3u + 2u^2 v
  //   Q = nu_u + (lambda1)_v + 2 lambda1 u = v + 1 + 2uv
  const GridDomain d = make_domain(0.1, 0.9, 0.2, 1.0, 41, 41);
  const InvariantSet inv = sample_invariants(d, [](double u, double v) {
    PointInvariants p;
    p.f = std::exp(u * v);
    p.nu = u * v;
    p.lambda1 = v;
    p.lambda2 = u * u;
    p.mu1 = 2;
    p.mu2 = 3;
    return p;
  });
  const auto dc = derived_coefficients(inv, SurfaceType::FirstType, StencilOrder::Fourth);
  const GridArray b1 = ScalarField::sample(d, [](double u, double v) {
                         return (3 * u + 2 * u * u * v) / (3 * std::exp(u * v));
                       }).values;
  const GridArray b2 = ScalarField::sample(d, [](double u, double v) {
                         return (v + 1 + 2 * u * v) / (2 * std::exp(u * v));
                       }).values;
  CHECK(interior_max(dc.beta1.values - b1, 0) < 1e-6);
  CHECK(interior_max(dc.beta2.values - b2, 0) < 1e-6);
}

TEST_CASE("derived coefficients match the closed forms of the families") {
  const GridDomain d = make_domain(0, 1, 0, 1, 81, 81);
  const GridDomain t = make_domain(0.25, 1.25, 0.25, 1.25, 81, 81);
  struct Case {
    InvariantFamily fam;
    GridDomain dom;
  };
  for (const Case& c : {Case{warped_product_family(1, 2, 0.5), d}, Case{product_family(1, 3), d},
                        Case{second_type(1, 0.5, 1, 1), d}, Case{third_type(1, 1, 1), t}}) {
    const InvariantSet inv = c.fam.sample(c.dom);
    const DerivedCoefficients exact = c.fam.sample_derived(c.dom);
    const DerivedCoefficients dc = derived_coefficients(inv, c.fam.type, StencilOrder::Fourth);
    CAPTURE(to_string(c.fam.type));
    CHECK(interior_max(dc.gamma1.values - exact.gamma1.values, 0) < 1e-5);
    CHECK(interior_max(dc.gamma2.values - exact.gamma2.values, 0) < 1e-5);
    CHECK(interior_max(dc.beta1.values - exact.beta1.values, 0) < 1e-5);
    CHECK(interior_max(dc.beta2.values - exact.beta2.values, 0) < 1e-5);
  }
}

TEST_CASE("division guard and type mismatch") {
  const GridDomain d = make_domain(0, 1, 0, 1, 5, 5);
  try {
    derived_coefficients(constant_set(d, 1, 1, 0, 0, 1, 0), SurfaceType::FirstType);
    FAIL("expected DivisionGuard");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DivisionGuard);
  }
  CHECK_THROWS_AS(derived_coefficients(constant_set(d, 1, 1, 0, 0, 0, 0), SurfaceType::Minimal), Error);
}

TEST_CASE("integrability residuals vanish at second order on compatible families") {
  for (const InvariantFamily& fam :
       {warped_product_family(1, 2, 0.5), second_type(1, 0.5, 1, 1), third_type(1, 1, 1)}) {
    const bool third = fam.type == SurfaceType::ThirdType;
    const GridDomain c = third ? make_domain(0.25, 1.25, 0.25, 1.25, 41, 41) : make_domain(0, 1, 0, 1, 41, 41);
    const GridDomain f = c.refined();
    const InvariantSet ic = fam.sample(c), iff = fam.sample(f);
    const auto rc = integrability_residuals(ic, derived_coefficients(ic, fam.type), StencilOrder::Second, 3);
    const auto rf = integrability_residuals(iff, derived_coefficients(iff, fam.type), StencilOrder::Second, 6);
    const auto conv = with_convergence(rc, rf);
    CHECK(conv.entries.size() == 6);
    for (const auto& e : conv.entries) {
      CAPTURE(e.condition);
      CAPTURE(e.max_norm);
      CHECK(e.max_norm < 5e-2);
      // Entries that vanish identically carry no order.
      if (e.max_norm > 1e-10) {
        REQUIRE(e.order.has_value());
        CHECK(*e.order > 1.7);
      }
    }
  }
}

TEST_CASE("a shifted mu1 leaves a residual floor of 2 |gamma2| times the shift") {
  const GridDomain d = make_domain(0.25, 1.25, 0.25, 1.25, 81, 81);
  const InvariantSet shifted = third_type(1, 1, 1, 0.1).sample(d);
  const DerivedCoefficients exact = third_type(1, 1, 1).sample_derived(d);
  const auto r = integrability_residuals(shifted, exact, StencilOrder::Fourth, 6);
  CHECK(r.at("integrability_4").max_norm == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("theorem conditions hold on the compatible families") {
  for (const InvariantFamily& fam : {product_family(1, 2), second_type(1, 0.5, 1, 1), third_type(1, 1, 1)}) {
    const bool third = fam.type == SurfaceType::ThirdType;
    const GridDomain d = third ? make_domain(0.25, 1.25, 0.25, 1.25, 101, 101) : make_domain(0, 1, 0, 1, 101, 101);
    const auto r = theorem_conditions_residuals(fam.sample(d), fam.type, StencilOrder::Second, 3);
    CHECK(r.entries.size() == 4);
    CAPTURE(to_string(fam.type));
    CHECK(r.max_norm() < 1e-2);
  }
  const GridDomain d = make_domain(0, 1, 0, 1, 41, 41);
  const auto bad = theorem_conditions_residuals(constant_first_type_family(1, 0.05).sample(d),
                                                SurfaceType::FirstType, StencilOrder::Second, 3);
  CHECK(bad.at("iii").max_norm > 0.05);
}

TEST_CASE("mean curvature flags") {
  const GridDomain d = make_domain(0, 1, 0, 1, 21, 21);
  const InvariantSet inv = constant_first_type(1, d);
  const auto flags = mean_curvature_flags(inv, derived_coefficients(inv, SurfaceType::FirstType), 1e-8);
  CHECK(flags.parallel_mean_curvature);
  CHECK_FALSE(flags.parallel_normalized_mean_curvature);
  // The warped product keeps nu constant and beta = 0 up to stencil error.
  const InvariantSet w = warped_product_family(1, 2, 0.5).sample(d);
  CHECK(mean_curvature_flags(w, derived_coefficients(w, SurfaceType::FirstType), 1e-3, 3).parallel_mean_curvature);
  const GridDomain t = make_domain(0.25, 1.25, 0.25, 1.25, 21, 21);
  const InvariantSet third = third_type_family(1, 1, 1, t);
  const auto tf = mean_curvature_flags(third, derived_coefficients(third, SurfaceType::ThirdType), 1e-3, 3);
  CHECK_FALSE(tf.parallel_mean_curvature);
  CHECK_FALSE(tf.parallel_normalized_mean_curvature);
}

TEST_CASE("residual report lookup") {
  ResidualReport r;
  r.entries.push_back({"i", 2.0, 1.0, {}});
  r.entries.push_back({"ii", 3.0, 1.0, {}});
  CHECK(r.max_norm() == 3.0);
  CHECK(r.at("ii").max_norm == 3.0);
  CHECK_THROWS_AS(r.at("v"), Error);
}
