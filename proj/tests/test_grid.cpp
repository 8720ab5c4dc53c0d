#include <doctest.h>

#include <cmath>

#include "tsurf/grid.hpp"

using namespace tsurf;

namespace {

ScalarField sample(const GridDomain& d, double (*fn)(double, double)) { return ScalarField::sample(d, fn); }

double max_error(const GridArray& a, const GridDomain& d, double (*fn)(double, double), Index margin) {
  return interior_max(a - ScalarField::sample(d, fn).values, margin);
}

}  // namespace

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(make_domain(0, 1, 0, 1, 2, 5), Error);
  GridDomain d{0, 0, -0.1, 0.1, 5, 5};
  try {
    d.validate();
    FAIL("expected GridTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridTooSmall);
  }
  const GridDomain g = make_domain(0, 1, -1, 1, 11, 21);
  CHECK(g.hu == doctest::Approx(0.1));
  CHECK(g.hv == doctest::Approx(0.1));
  CHECK(g.u_end() == doctest::Approx(1.0));
  const GridDomain r = g.refined();
  CHECK(r.nu == 21);
  CHECK(r.u_end() == doctest::Approx(g.u_end()));
}

TEST_CASE("fields reject bad data") {
  const GridDomain d = make_domain(0, 1, 0, 1, 4, 4);
  GridArray a = GridArray::Zero(4, 4);
  a(1, 2) = std::nan("");
  CHECK_THROWS_AS(ScalarField(d, a), Error);
  CHECK_THROWS_AS(ScalarField(d, GridArray::Zero(3, 4)), Error);
  CHECK_NOTHROW(ScalarField(d, GridArray::Zero(4, 4)));
}

TEST_CASE("second-order stencils are exact on quadratics, boundary included") {
  const GridDomain d = make_domain(-1, 2, 0.5, 1.5, 9, 7);
  const ScalarField f = sample(d, [](double u, double v) { return 3 * u * u - 2 * u * v + v * v + u - 4; });
  CHECK(max_error(d_du(f).values, d, [](double u, double v) { return 6 * u - 2 * v + 1; }, 0) < 1e-12);
  CHECK(max_error(d_dv(f).values, d, [](double u, double v) { return -2 * u + 2 * v; }, 0) < 1e-12);
  CHECK(max_error(d2_duu(f).values, d, [](double, double) { return 6.0; }, 0) < 1e-9);
  CHECK(max_error(d2_dvv(f).values, d, [](double, double) { return 2.0; }, 0) < 1e-9);
  CHECK(max_error(d2_dudv(f).values, d, [](double, double) { return -2.0; }, 0) < 1e-9);
}

TEST_CASE("fourth-order stencils are exact on quartics, boundary included") {
  const GridDomain d = make_domain(0, 1, 0, 1, 11, 11);
  const StencilOrder o = StencilOrder::Fourth;
  const ScalarField f = sample(d, [](double u, double v) { return u * u * u * u - 2 * u * u * u * v + v * v * v * v; });
  CHECK(max_error(d_du(f, o).values, d, [](double u, double v) { return 4 * u * u * u - 6 * u * u * v; }, 0) < 1e-10);
  CHECK(max_error(d_dv(f, o).values, d, [](double u, double v) { return -2 * u * u * u + 4 * v * v * v; }, 0) < 1e-10);
  CHECK(max_error(d2_duu(f, o).values, d, [](double u, double v) { return 12 * u * u - 12 * u * v; }, 0) < 1e-8);
  CHECK(max_error(d2_dvv(f, o).values, d, [](double, double v) { return 12 * v * v; }, 0) < 1e-8);
}

TEST_CASE("observed convergence orders") {
  auto fn = [](double u, double v) { return std::sin(2 * u) * std::cos(v); };
  auto fu = [](double u, double v) { return 2 * std::cos(2 * u) * std::cos(v); };
  auto fuv = [](double u, double v) { return -2 * std::cos(2 * u) * std::sin(v); };
  auto fvv = [](double u, double v) { return -std::sin(2 * u) * std::cos(v); };
  for (StencilOrder o : {StencilOrder::Second, StencilOrder::Fourth}) {
    const double expected = o == StencilOrder::Second ? 4.0 : 16.0;
    const GridDomain c = make_domain(0, 1, 0, 1, 21, 21), f = c.refined();
    const Index m = default_margin(o);
    for (auto [op, exact] : {std::pair{0, +fu}, std::pair{1, +fuv}, std::pair{2, +fvv}}) {
      auto apply = [&](const GridDomain& d) {
        const ScalarField s = ScalarField::sample(d, fn);
        return op == 0 ? d_du(s, o).values : op == 1 ? d2_dudv(s, o).values : d2_dvv(s, o).values;
      };
      // Same physical interior on both grids: double the index margin on the fine one.
      const double ec = max_error(apply(c), c, exact, m);
      const double ef = max_error(apply(f), f, exact, 2 * m);
      CAPTURE(op);
      CHECK(ec / ef == doctest::Approx(expected).epsilon(0.15));
    }
  }
}

TEST_CASE("bilinear interpolation") {
  const GridDomain d = make_domain(0, 2, 0, 1, 5, 3);
  const ScalarField f = ScalarField::sample(d, [](double u, double v) { return 1 + 2 * u - v + 3 * u * v; });
  CHECK(interpolate(f.values, d, 0.37, 0.81) == doctest::Approx(1 + 0.74 - 0.81 + 3 * 0.37 * 0.81));
  CHECK(interpolate(f.values, d, 2.0, 1.0) == doctest::Approx(1 + 4 - 1 + 6));
  CHECK(interpolate(f.values, d, 5.0, -1.0) == doctest::Approx(f(4, 0)));
}

TEST_CASE("interior norms") {
  const GridDomain d = make_domain(0, 1, 0, 1, 5, 5);
  GridArray a = GridArray::Zero(5, 5);
  a(0, 0) = 100;
  a(2, 2) = -3;
  CHECK(interior_max(a, 1) == 3.0);
  CHECK(interior_max(a, 0) == 100.0);
  CHECK(interior_l2(a, d, 1) == doctest::Approx(std::sqrt(d.hu * d.hv * 9)));
  CHECK(interior_min_abs(a, 1) == 0.0);
  CHECK_THROWS_AS(interior_max(a, 3), Error);
}

TEST_CASE("Minkowski product of vector fields") {
  const GridDomain d = make_domain(0, 1, 0, 1, 3, 3);
  const Vec4Field a = Vec4Field::sample(d, [](double u, double v) { return Vec4(u, v, 1, 2); });
  const GridArray p = minkowski_dot(a, a);
  CHECK(p(2, 1) == doctest::Approx(1 + 0.25 + 1 - 4));
}

TEST_CASE("difference operators are linear") {
  const GridDomain d = make_domain(0, 1, 0, 1, 17, 13);
  const ScalarField F = ScalarField::sample(d, [](double u, double v) { return std::sin(3 * u) + v * v * u; });
  const ScalarField G = ScalarField::sample(d, [](double u, double v) { return std::exp(u - v); });
  const double a = 0.7, b = -1.3;
  const ScalarField H(d, GridArray(a * F.values + b * G.values));
  for (StencilOrder o : {StencilOrder::Second, StencilOrder::Fourth}) {
    CHECK(interior_max(d_du(H, o).values - (a * d_du(F, o).values + b * d_du(G, o).values), 0) < 1e-13);
    CHECK(interior_max(d_dv(H, o).values - (a * d_dv(F, o).values + b * d_dv(G, o).values), 0) < 1e-13);
  }
}

TEST_CASE("mixed partials commute") {
  // The one-dimensional stencils act on different axes, so the composed
  // operators commute up to rounding, boundary rows included.
  for (StencilOrder o : {StencilOrder::Second, StencilOrder::Fourth})
    for (Index n : {21, 41}) {
      const GridDomain d = make_domain(0, 1, 0, 1, n, n);
      const ScalarField F = ScalarField::sample(d, [](double u, double v) { return std::sin(2 * u * v) + u * u * v; });
      CHECK(interior_max(d_du(d_dv(F, o), o).values - d_dv(d_du(F, o), o).values, 0) < 1e-9);
    }
}

TEST_CASE("exp(u + v) derivative converges at second order") {
  auto err = [](Index n) {
    const GridDomain d = make_domain(0, 1, 0, 1, n, n);
    const ScalarField F = ScalarField::sample(d, [](double u, double v) { return std::exp(u + v); });
    return interior_max(d_du(F).values - F.values, 0);
  };
  const double order = std::log2(err(21) / err(41));
  CHECK(order > 1.7);
  CHECK(order < 2.3);
}
