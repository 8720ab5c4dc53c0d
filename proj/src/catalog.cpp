#include "tsurf/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsurf {

AnalyticChart warped_product_chart(double a, double b, double kappa) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::InvalidField, "product surface needs a, b > 0");
  // U(u) = sinh(k u) / k with U' = cosh(k u); k = 0 is the identity.
  auto U = [kappa](double t) { return kappa == 0.0 ? t : std::sinh(kappa * t) / kappa; };
  auto dU = [kappa](double t) { return kappa == 0.0 ? 1.0 : std::cosh(kappa * t); };
  auto angles = [=](double u, double v) {
    const double p = U(u), q = U(v);
    return std::pair<double, double>{(p - q) / (2 * a), (p + q) / (2 * b)};
  };

  AnalyticChart c;
  c.z = [=](double u, double v) {
    const auto [phi, psi] = angles(u, v);
    return Vec4(a * std::cos(phi), a * std::sin(phi), b * std::cosh(psi), b * std::sinh(psi));
  };
  c.z_u = [=](double u, double v) {
    const auto [phi, psi] = angles(u, v);
    return Vec4(0.5 * dU(u) * Vec4(-std::sin(phi), std::cos(phi), std::sinh(psi), std::cosh(psi)));
  };
  c.z_v = [=](double u, double v) {
    const auto [phi, psi] = angles(u, v);
    return Vec4(0.5 * dU(v) * Vec4(std::sin(phi), -std::cos(phi), std::sinh(psi), std::cosh(psi)));
  };
  c.z_uv = [=](double u, double v) {
    const auto [phi, psi] = angles(u, v);
    const Vec4 P(std::cos(phi) / a, std::sin(phi) / a, std::cosh(psi) / b, std::sinh(psi) / b);
    return Vec4(0.25 * dU(u) * dU(v) * P);
  };
  return c;
}

AnalyticChart product_chart(double a, double b) { return warped_product_chart(a, b, 0.0); }

AnalyticChart cylinder_chart(double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidField, "cylinder needs r > 0");
  AnalyticChart c;
  c.z = [r](double u, double v) {
    const double th = (u - v) / (2 * r);
    return Vec4(r * std::cos(th), r * std::sin(th), 0.0, (u + v) / 2);
  };
  c.z_u = [r](double u, double v) {
    const double th = (u - v) / (2 * r);
    return Vec4(-std::sin(th) / 2, std::cos(th) / 2, 0.0, 0.5);
  };
  c.z_v = [r](double u, double v) {
    const double th = (u - v) / (2 * r);
    return Vec4(std::sin(th) / 2, -std::cos(th) / 2, 0.0, 0.5);
  };
  c.z_uv = [r](double u, double v) {
    const double th = (u - v) / (2 * r);
    return Vec4(std::cos(th) / (4 * r), std::sin(th) / (4 * r), 0.0, 0.0);
  };
  return c;
}

AnalyticChart plane_chart() {
  AnalyticChart c;
  c.z = [](double u, double v) { return Vec4((u - v) / 2, 0.0, 0.0, (u + v) / 2); };
  c.z_u = [](double, double) { return Vec4(0.5, 0.0, 0.0, 0.5); };
  c.z_v = [](double, double) { return Vec4(-0.5, 0.0, 0.0, 0.5); };
  c.z_uv = [](double, double) { return Vec4(Vec4::Zero()); };
  return c;
}

SurfacePatch sample_chart(const AnalyticChart& chart, const GridDomain& domain) {
  return SurfacePatch{Vec4Field::sample(domain, chart.z), std::nullopt, std::nullopt};
}

SurfacePatch product_surface(double a, double b, const GridDomain& domain) {
  return sample_chart(product_chart(a, b), domain);
}

SurfacePatch warped_product_surface(double a, double b, double kappa, const GridDomain& domain) {
  return sample_chart(warped_product_chart(a, b, kappa), domain);
}

SurfacePatch cylinder_surface(double r, const GridDomain& domain) { return sample_chart(cylinder_chart(r), domain); }

SurfacePatch plane_surface(const GridDomain& domain) { return sample_chart(plane_chart(), domain); }

InvariantFamily warped_product_family(double a, double b, double kappa) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::InvalidField, "product surface needs a, b > 0");
  const double k = std::sqrt(1 / (a * a) + 1 / (b * b));
  const double nu = k / 2;
  const double lambda = (1 / (a * a) - 1 / (b * b)) / (2 * k);
  const double mu = 1 / (a * b * k);
  InvariantFamily fam;
  fam.type = SurfaceType::FirstType;
  fam.fn = [=](double u, double v) {
    const double cu = kappa == 0.0 ? 1.0 : std::cosh(kappa * u);
    const double cv = kappa == 0.0 ? 1.0 : std::cosh(kappa * v);
    const double tu = kappa == 0.0 ? 0.0 : kappa * std::tanh(kappa * u);
    const double tv = kappa == 0.0 ? 0.0 : kappa * std::tanh(kappa * v);
    PointInvariants p;
    p.f = std::sqrt(cu * cv / 2);
    p.nu = nu;
    p.lambda1 = lambda * cu / cv;
    p.lambda2 = lambda * cv / cu;
    p.mu1 = mu * cu / cv;
    p.mu2 = mu * cv / cu;
    // gamma = (ln f)' / f
    p.gamma1 = tu / (2 * p.f);
    p.gamma2 = tv / (2 * p.f);
    return p;
  };
  return fam;
}

InvariantFamily product_family(double a, double b) { return warped_product_family(a, b, 0.0); }

InvariantFamily constant_first_type_family(double c, double nu_shift) {
  if (c == 0.0) throw Error(ErrorKind::InvalidField, "constant first-type family needs c != 0");
  InvariantFamily fam;
  fam.type = SurfaceType::FirstType;
  fam.fn = [c, nu_shift](double, double) {
    PointInvariants p;
    p.f = 1.0;
    p.nu = c + nu_shift;
    p.mu1 = p.mu2 = c;
    return p;
  };
  return fam;
}

InvariantSet constant_first_type(double c, const GridDomain& domain) {
  return constant_first_type_family(c).sample(domain);
}

InvariantFamily third_type(double Cc, double A, double B, double mu1_shift) {
  InvariantFamily fam;
  fam.type = SurfaceType::ThirdType;
  fam.fn = [=](double u, double v) {
    const double s = u + v;
    PointInvariants p;
    p.f = 1 / s;
    p.nu = std::sqrt(2.0);
    p.lambda1 = Cc * s * s;
    p.mu1 = A * s + B * s * s + mu1_shift;
    p.gamma1 = p.gamma2 = -1.0;
    // -((mu1)_v + mu1 (ln f^2)_v) / (nu f) with (ln f^2)_v = -2 / s
    p.beta1 = -((A + 2 * B * s) - 2 * p.mu1 / s) * s / p.nu;
    return p;
  };
  return fam;
}

InvariantSet third_type_family(double Cc, double A, double B, const GridDomain& domain, double mu1_shift,
                               double delta) {
  domain.validate();
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidField, "third-type family needs delta > 0");
  if (domain.u0 + domain.v0 < delta - 1e-12) {
    std::ostringstream os;
    os << "third-type family needs u + v >= " << delta << ", grid starts at u + v = " << domain.u0 + domain.v0;
    throw Error(ErrorKind::InvalidField, os.str());
  }
  return third_type(Cc, A, B, mu1_shift).sample(domain);
}

InvariantFamily second_type(double nu0, double slope, double g, double L) {
  if (g == 0.0 || L == 0.0) throw Error(ErrorKind::InvalidField, "second-type family needs g, L != 0");
  InvariantFamily fam;
  fam.type = SurfaceType::SecondType;
  fam.fn = [=](double u, double) {
    PointInvariants p;
    p.f = 1.0;
    p.nu = nu0 + slope * u - g * g * L * u * u / 2;
    p.lambda1 = p.nu * p.nu / L;
    p.lambda2 = L;
    p.mu1 = g;
    p.beta2 = (slope - g * g * L * u) / g;
    p.beta1 = -p.nu * p.beta2 / L;
    return p;
  };
  return fam;
}

ProbeResult second_type_probe(const GridDomain& domain, const ProbeSeeds& seeds) {
  domain.validate();
  const double L = seeds.lambda2, g = seeds.g;
  if (L == 0.0 || g == 0.0) throw Error(ErrorKind::InvalidField, "probe seeds need lambda2, g != 0");
  auto nu = [&](double u) { return seeds.nu0 + seeds.slope * u - g * g * L * u * u / 2; };
  auto nu_u = [&](double u) { return seeds.slope - g * g * L * u; };
  auto lambda1 = [&](double u) { return nu(u) * nu(u) / L + seeds.lambda1_offset; };

  // Condition (ii) with f = 1 and lambda1 independent of v:
  // (mu1)_v = (nu^2 - lambda1 lambda2) Q / (lambda2 mu1), Q = nu_u.
  GridArray mu1(domain.nu, domain.nv);
  for (Index i = 0; i < domain.nu; ++i) {
    const double u = domain.u(i);
    const double c = (nu(u) * nu(u) - lambda1(u) * L) * nu_u(u) / L;
    auto rhs = [c](double m) { return c / m; };
    double m = g;
    mu1(i, 0) = m;
    const double h = domain.hv;
    for (Index j = 1; j < domain.nv; ++j) {
      const double k1 = rhs(m), k2 = rhs(m + h / 2 * k1), k3 = rhs(m + h / 2 * k2), k4 = rhs(m + h * k3);
      m += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      mu1(i, j) = m;
    }
  }
  if (!mu1.isFinite().all() || !(mu1.abs() > 1e-9).all())
    throw Error(ErrorKind::ProbeInfeasible, "mu1 solve left the admissible range for these seeds");

  ProbeResult out{InvariantSet{ScalarField::constant(domain, 1.0),
                               ScalarField::sample(domain, [&](double u, double) { return nu(u); }),
                               ScalarField::sample(domain, [&](double u, double) { return lambda1(u); }),
                               ScalarField::constant(domain, L),
                               ScalarField(domain, std::move(mu1)),
                               ScalarField::constant(domain, 0.0)},
                  {}};
  out.conditions = theorem_conditions_residuals(out.invariants, SurfaceType::SecondType, seeds.order);
  for (const char* name : {"iii", "iv"}) {
    const double r = out.conditions.at(name).max_norm;
    if (!(r <= seeds.threshold)) {
      std::ostringstream os;
      os << "condition (" << name << ") residual " << r << " exceeds " << seeds.threshold;
      throw Error(ErrorKind::ProbeInfeasible, os.str());
    }
  }
  return out;
}

namespace {

double param(const std::map<std::string, double>& given, const CatalogEntry& e, const std::string& key) {
  auto it = given.find(key);
  return it != given.end() ? it->second : e.defaults.at(key);
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = [] {
    const GridDomain unit = make_domain(0.0, 1.0, 0.0, 1.0, 101, 101);
    const GridDomain shifted = make_domain(0.25, 1.25, 0.25, 1.25, 101, 101);
    return std::vector<CatalogEntry>{
        {"product", true, "(a cos phi, a sin phi, b cosh psi, b sinh psi), FirstType", {{"a", 1.0}, {"b", 2.0}}, unit},
        {"warped-product", true, "product chart with u, v -> sinh(k u)/k, sinh(k v)/k",
         {{"a", 1.0}, {"b", 2.0}, {"kappa", 0.5}}, unit},
        {"cylinder", true, "(r cos theta, r sin theta, 0, t), InflectionDegenerate", {{"r", 1.0}}, unit},
        {"plane", true, "timelike plane, Minimal", {}, unit},
        {"constant-first-type", false, "f = 1, nu = c + nu_shift, lambda = 0, mu1 = mu2 = c",
         {{"c", 1.0}, {"nu_shift", 0.0}}, unit},
        {"product-invariants", false, "invariants of the warped product surface",
         {{"a", 1.0}, {"b", 2.0}, {"kappa", 0.0}}, unit},
        {"third-type", false, "f = 1/(u+v), nu = sqrt 2, lambda1 = C s^2, mu1 = A s + B s^2 + mu1_shift",
         {{"C", 1.0}, {"A", 1.0}, {"B", 1.0}, {"mu1_shift", 0.0}}, shifted},
        {"second-type", false, "f = 1, lambda2 = L, mu1 = g, nu = nu0 + slope u - g^2 L u^2 / 2, lambda1 = nu^2 / L",
         {{"nu0", 1.0}, {"slope", 0.5}, {"g", 1.0}, {"L", 1.0}}, unit},
        {"second-type-probe", false, "SecondType data with mu1 solved from condition (ii)",
         {{"nu0", 1.0}, {"slope", 0.5}, {"g", 1.0}, {"lambda2", 1.0}, {"lambda1_offset", 0.0}}, unit},
    };
  }();
  return entries;
}

CatalogItem catalog_emit(const std::string& name, const std::map<std::string, double>& params,
                         const std::optional<GridDomain>& domain) {
  const auto& entries = catalog_entries();
  auto it = std::find_if(entries.begin(), entries.end(), [&](const CatalogEntry& e) { return e.name == name; });
  if (it == entries.end()) throw Error(ErrorKind::InvalidField, "unknown catalog entry '" + name + "'");
  const CatalogEntry& e = *it;
  for (const auto& [key, value] : params)
    if (!e.defaults.count(key)) throw Error(ErrorKind::InvalidField, "entry '" + name + "' has no parameter '" + key + "'");
  const GridDomain d = domain.value_or(e.domain);
  auto p = [&](const std::string& key) { return param(params, e, key); };

  CatalogItem item;
  if (name == "product") {
    item.surface = product_surface(p("a"), p("b"), d);
  } else if (name == "warped-product") {
    item.surface = warped_product_surface(p("a"), p("b"), p("kappa"), d);
  } else if (name == "cylinder") {
    item.surface = cylinder_surface(p("r"), d);
  } else if (name == "plane") {
    item.surface = plane_surface(d);
  } else if (name == "constant-first-type") {
    item.invariants = constant_first_type_family(p("c"), p("nu_shift")).sample(d);
    item.type = SurfaceType::FirstType;
  } else if (name == "product-invariants") {
    item.invariants = warped_product_family(p("a"), p("b"), p("kappa")).sample(d);
    item.type = SurfaceType::FirstType;
  } else if (name == "third-type") {
    item.invariants = third_type_family(p("C"), p("A"), p("B"), d, p("mu1_shift"));
    item.type = SurfaceType::ThirdType;
  } else if (name == "second-type") {
    item.invariants = second_type(p("nu0"), p("slope"), p("g"), p("L")).sample(d);
    item.type = SurfaceType::SecondType;
  } else if (name == "second-type-probe") {
    ProbeSeeds seeds;
    seeds.nu0 = p("nu0");
    seeds.slope = p("slope");
    seeds.g = p("g");
    seeds.lambda2 = p("lambda2");
    seeds.lambda1_offset = p("lambda1_offset");
    item.invariants = second_type_probe(d, seeds).invariants;
    item.type = SurfaceType::SecondType;
  }
  return item;
}

}  // namespace tsurf
