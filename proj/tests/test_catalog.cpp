#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "tsurf/catalog.hpp"
#include "tsurf/io.hpp"

using namespace tsurf;

#ifndef TSURF_TEST_DATA
#define TSURF_TEST_DATA "tests/data"
#endif

namespace {

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

TEST_CASE("surfaces classify as documented") {
  const GridDomain d = make_domain(0, 1, 0, 1, 41, 41);
  CHECK(classify(crop(extract_invariants(product_surface(1, 2, d)).invariants, 3)) == SurfaceType::FirstType);
  CHECK(classify(crop(extract_invariants(warped_product_surface(1, 2, 0.5, d)).invariants, 3)) ==
        SurfaceType::FirstType);
}

TEST_CASE("invariant families classify as documented") {
  const GridDomain d = make_domain(0, 1, 0, 1, 21, 21);
  CHECK(classify(constant_first_type(1, d)) == SurfaceType::FirstType);
  CHECK(classify(product_family(1, 2).sample(d)) == SurfaceType::FirstType);
  CHECK(classify(second_type(1, 0.5, 1, 1).sample(d)) == SurfaceType::SecondType);
  CHECK(classify(third_type_family(1, 1, 1, make_domain(0.25, 1.25, 0.25, 1.25, 21, 21))) == SurfaceType::ThirdType);
}

TEST_CASE("product family values") {
  const PointInvariants p = product_family(1, 2).fn(0.4, 0.1);
  const double k = std::sqrt(1.0 + 0.25);
  CHECK(p.f == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(p.nu == doctest::Approx(k / 2));
  CHECK(p.nu == doctest::Approx(std::sqrt(5.0) / 4));
  CHECK(p.lambda1 == doctest::Approx(0.75 / (2 * k)));
  CHECK(p.mu1 == doctest::Approx(1 / (2 * k)));
  CHECK(p.beta1 == 0.0);
}

TEST_CASE("third-type family domain guard") {
  CHECK(kind_of([] { third_type_family(1, 1, 1, make_domain(0, 1, 0, 1, 11, 11)); }) == ErrorKind::InvalidField);
  CHECK_NOTHROW(third_type_family(1, 1, 1, make_domain(0.25, 1.25, 0.25, 1.25, 11, 11)));
}

TEST_CASE("second-type probe") {
  const GridDomain d = make_domain(0, 1, 0, 1, 51, 51);
  const ProbeResult ok = second_type_probe(d);
  CHECK(ok.conditions.entries.size() == 4);
  CHECK(ok.conditions.at("iii").max_norm < 1e-3);
  CHECK(classify(ok.invariants) == SurfaceType::SecondType);
  const InvariantSet closed = second_type(1, 0.5, 1, 1).sample(d);
  CHECK(interior_max(ok.invariants.mu1.values - closed.mu1.values, 0) < 1e-12);
  CHECK(interior_max(ok.invariants.nu.values - closed.nu.values, 0) < 1e-12);

  ProbeSeeds bad;
  bad.lambda1_offset = 0.3;
  CHECK(kind_of([&] { second_type_probe(d, bad); }) == ErrorKind::ProbeInfeasible);
}

TEST_CASE("probe report regression fixture") {
  // Seeds slightly off the compatible family so (iii) and (iv) are nonzero.
  ProbeSeeds seeds;
  seeds.lambda1_offset = 1e-4;
  const ProbeResult r = second_type_probe(make_domain(0, 1, 0, 1, 51, 51), seeds);
  const Json got = to_json(theorem_conditions_residuals(r.invariants, SurfaceType::SecondType, StencilOrder::Second, 3));
  std::ifstream in(std::string(TSURF_TEST_DATA) + "/probe_report.json");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  const Json want = Json::parse(ss.str());
  CHECK(want["margin"] == got["margin"]);
  REQUIRE(want["conditions"].size() == got["conditions"].size());
  for (size_t k = 0; k < want["conditions"].size(); ++k) {
    const auto& w = want["conditions"][k];
    const auto& g = got["conditions"][k];
    CHECK(w["condition"] == g["condition"]);
    for (const char* norm : {"max", "l2"}) {
      const double a = w[norm].get<double>(), b = g[norm].get<double>();
      CAPTURE(norm);
      CHECK(std::abs(a - b) <= 1e-12 + 1e-8 * std::abs(a));
    }
  }
}

TEST_CASE("registry") {
  const auto& entries = catalog_entries();
  CHECK(entries.size() == 9);
  const CatalogItem prod = catalog_emit("product", {{"b", 3.0}}, make_domain(0, 1, 0, 1, 11, 11));
  REQUIRE(prod.surface.has_value());
  CHECK(prod.surface->domain().nu == 11);
  const CatalogItem third = catalog_emit("third-type");
  REQUIRE(third.invariants.has_value());
  CHECK(third.invariants->domain().u0 == 0.25);
  CHECK(third.type == SurfaceType::ThirdType);
  CHECK(kind_of([] { catalog_emit("sphere"); }) == ErrorKind::InvalidField);
  CHECK(kind_of([] { catalog_emit("product", {{"c", 1.0}}); }) == ErrorKind::InvalidField);
  for (const auto& e : entries) CHECK_NOTHROW(catalog_emit(e.name, {}, make_domain(e.domain.u0, e.domain.u0 + 1, e.domain.v0, e.domain.v0 + 1, 11, 11)));
}
