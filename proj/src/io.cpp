#include "tsurf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace tsurf {

namespace {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool is_leaf(const Json& j) { return !j.is_object() && !j.is_array(); }

void dump_into(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(key).dump() + ": ";
        dump_into(value, indent, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), is_leaf);
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump_into(value, indent, depth + 1, out);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    default:
      out += j.dump();
  }
}

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorKind::Io, what); }

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) format_error(std::string("missing key '") + key + "'");
  return j.at(key);
}

GridArray array_from_json(const Json& j, const GridDomain& d, const std::string& what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != d.size())
    format_error(what + ": expected an array of " + std::to_string(d.size()) + " numbers");
  GridArray a(d.nu, d.nv);
  Index k = 0;
  for (const auto& x : j) {
    if (!x.is_number()) format_error(what + ": non-numeric entry");
    a(k / d.nv, k % d.nv) = x.get<double>();
    ++k;
  }
  return a;
}

Json array_to_json(const GridArray& a) {
  Json out = Json::array();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.push_back(a(i, j));
  return out;
}

Json vec4_components(const Vec4Field& f) {
  Json out = Json::object();
  for (int k = 0; k < 4; ++k) out["x" + std::to_string(k + 1)] = array_to_json(f.components[k]);
  return out;
}

Vec4Field vec4_from_components(const Json& j, const GridDomain& d, const std::string& what) {
  std::array<GridArray, 4> comps;
  for (int k = 0; k < 4; ++k) {
    const std::string key = "x" + std::to_string(k + 1);
    comps[k] = array_from_json(member(j, key.c_str()), d, what + "." + key);
  }
  return Vec4Field(d, std::move(comps));
}

constexpr const char* kInvariantNames[] = {"f", "nu", "lambda1", "lambda2", "mu1", "mu2"};

std::vector<const ScalarField*> invariant_fields(const InvariantSet& inv) {
  return {&inv.f, &inv.nu, &inv.lambda1, &inv.lambda2, &inv.mu1, &inv.mu2};
}

// Runs a reader, turning malformed content into Io errors.
template <typename Fn>
auto guarded(const std::string& context, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Io, context + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidField || e.kind() == ErrorKind::GridTooSmall ||
        e.kind() == ErrorKind::TypeMismatch)
      throw Error(ErrorKind::Io, context + ": " + e.detail());
    throw;
  }
}

}  // namespace

std::string dump_stable(const Json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  out += "\n";
  return out;
}

Json to_json(const GridDomain& d) {
  return {{"u0", d.u0}, {"v0", d.v0}, {"hu", d.hu}, {"hv", d.hv}, {"nu", d.nu}, {"nv", d.nv}, {"order", "row-major"}};
}

GridDomain domain_from_json(const Json& j) {
  if (j.contains("order") && j.at("order") != "row-major") format_error("only row-major storage is supported");
  GridDomain d{member(j, "u0").get<double>(), member(j, "v0").get<double>(), member(j, "hu").get<double>(),
               member(j, "hv").get<double>(), member(j, "nu").get<Index>(),  member(j, "nv").get<Index>()};
  d.validate();
  return d;
}

Json to_json(const ScalarField& f) { return {{"domain", to_json(f.domain)}, {"values", array_to_json(f.values)}}; }

ScalarField scalar_field_from_json(const Json& j) {
  return guarded("scalar field", [&] {
    const GridDomain d = domain_from_json(member(j, "domain"));
    return ScalarField(d, array_from_json(member(j, "values"), d, "values"));
  });
}

Json to_json(const Vec4Field& f) {
  Json out = vec4_components(f);
  out["domain"] = to_json(f.domain);
  return out;
}

Vec4Field vec4_field_from_json(const Json& j) {
  return guarded("vector field", [&] { return vec4_from_components(j, domain_from_json(member(j, "domain")), "field"); });
}

Json to_json(const InvariantSet& inv, std::optional<SurfaceType> type) {
  Json fields = Json::object();
  const auto ptrs = invariant_fields(inv);
  for (size_t k = 0; k < ptrs.size(); ++k) fields[kInvariantNames[k]] = array_to_json(ptrs[k]->values);
  Json out = {{"kind", "invariants"}, {"domain", to_json(inv.domain())}, {"fields", fields}};
  if (type) out["type"] = std::string(to_string(*type));
  return out;
}

InvariantFile invariants_from_json(const Json& j) {
  return guarded("invariant set", [&] {
    const GridDomain d = domain_from_json(member(j, "domain"));
    const Json& fields = member(j, "fields");
    std::array<ScalarField, 6> f;
    for (size_t k = 0; k < 6; ++k)
      f[k] = ScalarField(d, array_from_json(member(fields, kInvariantNames[k]), d, kInvariantNames[k]));
    InvariantFile out{InvariantSet{f[0], f[1], f[2], f[3], f[4], f[5]}, std::nullopt};
    out.invariants.validate();
    if (j.contains("type") && !j.at("type").is_null())
      out.type = surface_type_from_string(j.at("type").get<std::string>());
    return out;
  });
}

Json to_json(const DerivedCoefficients& dc) {
  return {{"kind", "derived"},
          {"domain", to_json(dc.gamma1.domain)},
          {"fields",
           {{"gamma1", array_to_json(dc.gamma1.values)},
            {"gamma2", array_to_json(dc.gamma2.values)},
            {"beta1", array_to_json(dc.beta1.values)},
            {"beta2", array_to_json(dc.beta2.values)}}}};
}

Json to_json(const SurfacePatch& patch) {
  Json out = {{"kind", "surface"}, {"domain", to_json(patch.domain())}, {"z", vec4_components(patch.z)}};
  if (patch.f) out["f"] = array_to_json(patch.f->values);
  if (patch.frames) {
    const GridDomain& d = patch.domain();
    const char* legs[] = {"x", "y", "n1", "n2"};
    Json frames = Json::object();
    for (int l = 0; l < 4; ++l) {
      Vec4Field leg(d);
      for (Index i = 0; i < d.nu; ++i)
        for (Index j = 0; j < d.nv; ++j) leg.set(i, j, patch.frames->at(i, j).leg(l));
      frames[legs[l]] = vec4_components(leg);
    }
    frames["max_gram_drift"] = patch.frames->max_gram_drift;
    out["frames"] = frames;
  }
  return out;
}

SurfacePatch surface_from_json(const Json& j) {
  return guarded("surface", [&] {
    const GridDomain d = domain_from_json(member(j, "domain"));
    SurfacePatch p{vec4_from_components(member(j, "z"), d, "z"), std::nullopt, std::nullopt};
    if (j.contains("f")) p.f = ScalarField(d, array_from_json(j.at("f"), d, "f"));
    if (j.contains("frames")) {
      const Json& fr = j.at("frames");
      const char* legs[] = {"x", "y", "n1", "n2"};
      std::array<Vec4Field, 4> leg;
      for (int l = 0; l < 4; ++l) leg[l] = vec4_from_components(member(fr, legs[l]), d, std::string("frames.") + legs[l]);
      FrameField ff(d);
      for (Index i = 0; i < d.nu; ++i)
        for (Index k = 0; k < d.nv; ++k)
          ff.at(i, k) = Frame(leg[0].at(i, k), leg[1].at(i, k), leg[2].at(i, k), leg[3].at(i, k));
      if (fr.contains("max_gram_drift")) ff.max_gram_drift = fr.at("max_gram_drift").get<double>();
      p.frames = std::move(ff);
    }
    return p;
  });
}

Json to_json(const ResidualReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json item = {{"condition", e.condition}, {"max", e.max_norm}, {"l2", e.l2_norm}};
    item["order"] = e.order ? Json(*e.order) : Json(nullptr);
    entries.push_back(item);
  }
  return {{"margin", r.margin}, {"conditions", entries}};
}

std::string surface_csv(const SurfacePatch& patch) {
  const GridDomain& d = patch.domain();
  std::string out = "u,v,x1,x2,x3,x4\n";
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j) {
      out += format_double(d.u(i)) + "," + format_double(d.v(j));
      for (int k = 0; k < 4; ++k) out += "," + format_double(patch.z.components[k](i, j));
      out += "\n";
    }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t\r");
    const auto e = cur.find_last_not_of(" \t\r");
    parts.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return parts;
}

// Sorted distinct values, merging those closer than tol.
std::vector<double> distinct(std::vector<double> xs, double tol) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  return out;
}

}  // namespace

SurfacePatch surface_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) format_error("empty CSV");
  const std::vector<std::string> header = split(line, ',');
  if (header != std::vector<std::string>{"u", "v", "x1", "x2", "x3", "x4"})
    format_error("CSV header must be u,v,x1,x2,x3,x4");

  std::vector<std::array<double, 6>> rows;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 6) format_error("CSV row with " + std::to_string(parts.size()) + " columns: " + line);
    std::array<double, 6> r;
    for (size_t k = 0; k < 6; ++k) {
      size_t used = 0;
      try {
        r[k] = std::stod(parts[k], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != parts[k].size() || parts[k].empty()) format_error("CSV entry is not a number: '" + parts[k] + "'");
    }
    rows.push_back(r);
  }
  if (rows.empty()) format_error("CSV has no samples");

  std::vector<double> us, vs;
  for (const auto& r : rows) {
    us.push_back(r[0]);
    vs.push_back(r[1]);
  }
  auto axis = [](const std::vector<double>& xs) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    return distinct(xs, 1e-9 * std::max(1.0, *hi - *lo));
  };
  const std::vector<double> ua = axis(us), va = axis(vs);
  if (ua.size() < 3 || va.size() < 3) format_error("CSV grid needs at least 3 distinct u and v values");
  const Index nu = static_cast<Index>(ua.size()), nv = static_cast<Index>(va.size());
  if (static_cast<Index>(rows.size()) != nu * nv) format_error("CSV samples do not form a full rectangular grid");
  GridDomain d{ua.front(), va.front(), (ua.back() - ua.front()) / static_cast<double>(nu - 1),
               (va.back() - va.front()) / static_cast<double>(nv - 1), nu, nv};
  return guarded("surface CSV", [&] {
    d.validate();
    Vec4Field z(d);
    std::vector<bool> seen(static_cast<size_t>(d.size()), false);
    for (const auto& r : rows) {
      const double si = (r[0] - d.u0) / d.hu, sj = (r[1] - d.v0) / d.hv;
      const Index i = static_cast<Index>(std::llround(si)), j = static_cast<Index>(std::llround(sj));
      if (std::abs(si - static_cast<double>(i)) > 1e-6 || std::abs(sj - static_cast<double>(j)) > 1e-6)
        format_error("CSV samples are not uniformly spaced");
      if (seen[static_cast<size_t>(i * nv + j)]) format_error("CSV sample repeated");
      seen[static_cast<size_t>(i * nv + j)] = true;
      z.set(i, j, Vec4(r[2], r[3], r[4], r[5]));
    }
    return SurfacePatch{Vec4Field(d, z.components), std::nullopt, std::nullopt};
  });
}

std::string invariants_csv(const InvariantSet& inv) {
  const GridDomain& d = inv.domain();
  std::string out = "u,v,f,nu,lambda1,lambda2,mu1,mu2\n";
  const auto fields = invariant_fields(inv);
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j) {
      out += format_double(d.u(i)) + "," + format_double(d.v(j));
      for (const ScalarField* f : fields) out += "," + format_double((*f)(i, j));
      out += "\n";
    }
  return out;
}

std::string residual_fields_csv(const ResidualFields& r) {
  const GridDomain& d = r.domain;
  std::string out = "u,v";
  for (const auto& f : r.fields) out += "," + f.name;
  out += "\n";
  for (Index i = 0; i < d.nu; ++i)
    for (Index j = 0; j < d.nv; ++j) {
      out += format_double(d.u(i)) + "," + format_double(d.v(j));
      for (const auto& f : r.fields) out += "," + format_double(f.values(i, j));
      out += "\n";
    }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

Json read_json(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Io, path + ": " + e.what());
  }
}

namespace {
bool ends_with_csv(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}
}  // namespace

SurfacePatch read_surface(const std::string& path) {
  if (ends_with_csv(path)) {
    try {
      return surface_from_csv(read_text(path));
    } catch (const Error& e) {
      throw Error(ErrorKind::Io, path + ": " + e.detail());
    }
  }
  const Json j = read_json(path);
  if (j.contains("kind") && j.at("kind") != "surface") throw Error(ErrorKind::Io, path + ": not a surface file");
  return surface_from_json(j);
}

InvariantFile read_invariants(const std::string& path) {
  const Json j = read_json(path);
  if (j.contains("kind") && j.at("kind") != "invariants")
    throw Error(ErrorKind::Io, path + ": not an invariant-set file");
  return invariants_from_json(j);
}

}  // namespace tsurf
