// Command-line front end: extract, check, reconstruct, roundtrip, catalog.
//
// Exit codes: 0 ok, 1 general failure (including --strict violations),
// 2 NotIsotropic, 3 MinimalPoint, 4 I/O or malformed input, 5 IncompatibleData.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tsurf/catalog.hpp"
#include "tsurf/congruence.hpp"
#include "tsurf/io.hpp"
#include "tsurf/reconstruction.hpp"

using namespace tsurf;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotIsotropic: return 2;
    case ErrorKind::MinimalPoint: return 3;
    case ErrorKind::Io: return 4;
    case ErrorKind::IncompatibleData: return 5;
    default: return 1;
  }
}

struct CommonFlags {
  std::string output;
  std::string format = "json";
  int order = 2;
};

StencilOrder stencil(int order) { return order == 4 ? StencilOrder::Fourth : StencilOrder::Second; }

std::string fmt(double x, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

void print_report(std::ostream& os, const std::string& title, const ResidualReport& r) {
  os << title << " (interior margin " << r.margin << ")\n";
  char line[160];
  std::snprintf(line, sizeof line, "  %-18s %14s %14s %8s\n", "condition", "max", "l2", "order");
  os << line;
  for (const auto& e : r.entries) {
    std::snprintf(line, sizeof line, "  %-18s %14.6e %14.6e %8s\n", e.condition.c_str(), e.max_norm, e.l2_norm,
                  e.order ? fmt(*e.order, 3).c_str() : "-");
    os << line;
  }
}

// Writes `json` (or `csv` when --format csv) to -o, or to stdout when -o is absent.
void emit(const CommonFlags& flags, const Json& json, const std::string& csv) {
  const std::string text = flags.format == "csv" ? csv : dump_stable(json);
  if (flags.output.empty())
    std::cout << text;
  else
    write_text(flags.output, text);
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw Error(ErrorKind::InvalidField, "not a number list: '" + text + "'");
    out.push_back(x);
  }
  return out;
}

Vec4 parse_point(const std::string& text) {
  const auto v = parse_numbers(text);
  if (v.size() != 4) throw Error(ErrorKind::InvalidField, "--origin needs four comma-separated numbers");
  return {v[0], v[1], v[2], v[3]};
}

// "standard", sixteen comma-separated numbers (legs x, y, n1, n2 in order),
// or a JSON file {"x": [...], "y": [...], "n1": [...], "n2": [...]}.
Frame parse_frame(const std::string& text) {
  if (text.empty() || text == "standard") return standard_frame();
  if (text.find(',') != std::string::npos) {
    const auto v = parse_numbers(text);
    if (v.size() != 16) throw Error(ErrorKind::InvalidField, "--frame needs sixteen numbers");
    Mat4 legs;
    for (int k = 0; k < 16; ++k) legs(k / 4, k % 4) = v[static_cast<size_t>(k)];
    return Frame(legs);
  }
  const Json j = read_json(text);
  Mat4 legs;
  const char* names[] = {"x", "y", "n1", "n2"};
  try {
    for (int r = 0; r < 4; ++r) {
      const auto leg = j.at(names[r]).get<std::vector<double>>();
      if (leg.size() != 4) throw Error(ErrorKind::Io, text + ": frame legs need four components");
      for (int c = 0; c < 4; ++c) legs(r, c) = leg[static_cast<size_t>(c)];
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Io, text + ": " + e.what());
  }
  return Frame(legs);
}

GridDomain parse_grid(const std::string& text) {
  const auto v = parse_numbers(text);
  if (v.size() != 6) throw Error(ErrorKind::InvalidField, "--grid needs u0,u1,v0,v1,nu,nv");
  return make_domain(v[0], v[1], v[2], v[3], static_cast<Index>(v[4]), static_cast<Index>(v[5]));
}

std::optional<SurfaceType> parse_theorem(const std::string& s) {
  if (s.empty() || s == "auto") return std::nullopt;
  return surface_type_from_string(s);
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  CommonFlags common;
  std::string input;
  std::string refine;
  std::string report;
  double tol = 1e-3;
  double minimal_tol = 1e-9;
  double classify_tol = 1e-7;
};

int run_extract(const ExtractArgs& a) {
  const SurfacePatch patch = read_surface(a.input);
  AnalysisOptions opt{a.tol, a.minimal_tol, stencil(a.common.order), +1};
  const Extraction ex = extract_invariants(patch, opt);

  std::optional<SurfaceType> type;
  std::string type_name;
  try {
    type = classify(ex.invariants, a.classify_tol);
    type_name = std::string(to_string(*type));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AmbiguousType) throw;
    type_name = "ambiguous";
    std::cerr << "warning: " << e.what() << "\n";
  }

  ResidualReport residuals = integrability_residuals(ex.invariants, ex.derived, opt.order);
  if (!a.refine.empty()) {
    const Extraction fine = extract_invariants(read_surface(a.refine), opt);
    residuals = with_convergence(
        residuals, integrability_residuals(fine.invariants, fine.derived, opt.order, 2 * residuals.margin));
  }

  const Index m = residuals.margin;
  const MeanCurvatureFlags flags = mean_curvature_flags(ex.invariants, ex.derived, 1e-6, m);
  std::cout << "type: " << type_name << "\n"
            << "x future-pointing: " << (ex.geometry.x_future_pointing ? "yes" : "no") << "\n"
            << "clamped radicands: " << ex.geometry.clamped_radicands << "\n";
  for (const auto& [name, field] :
       std::vector<std::pair<const char*, const ScalarField*>>{{"f", &ex.invariants.f},
                                                              {"nu", &ex.invariants.nu},
                                                              {"lambda1", &ex.invariants.lambda1},
                                                              {"lambda2", &ex.invariants.lambda2},
                                                              {"mu1", &ex.invariants.mu1},
                                                              {"mu2", &ex.invariants.mu2},
                                                              {"beta1", &ex.derived.beta1},
                                                              {"beta2", &ex.derived.beta2}}) {
    const auto block = field->values.block(m, m, field->values.rows() - 2 * m, field->values.cols() - 2 * m);
    std::cout << "  " << name << " in [" << fmt(block.minCoeff()) << ", " << fmt(block.maxCoeff()) << "]\n";
  }
  std::cout << "parallel mean curvature: " << (flags.parallel_mean_curvature ? "yes" : "no") << "\n";
  print_report(std::cout, "integrability residuals", residuals);

  if (!a.report.empty()) write_text(a.report, dump_stable(to_json(residuals)));
  if (!a.common.output.empty()) {
    Json j = to_json(ex.invariants, type);
    j["derived"] = to_json(ex.derived)["fields"];
    emit(a.common, j, invariants_csv(ex.invariants));
  }
  return 0;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  CommonFlags common;
  std::string input;
  std::string theorem = "auto";
  std::string refine;
  double tol = 1e-7;
  double zero_tol = 1e-7;
  bool strict = false;
  double strict_tol = 1e-2;
  std::string fields_csv;
};

int run_check(const CheckArgs& a) {
  const InvariantFile file = read_invariants(a.input);
  const StencilOrder order = stencil(a.common.order);
  SurfaceType type;
  if (auto t = parse_theorem(a.theorem))
    type = *t;
  else
    type = file.type ? *file.type : classify(file.invariants, a.tol);

  const ResidualFields fields = theorem_condition_fields(file.invariants, type, order, std::nullopt, a.zero_tol);
  ResidualReport report = fields.report();
  if (!a.refine.empty()) {
    const InvariantFile fine = read_invariants(a.refine);
    report = with_convergence(
        report, theorem_conditions_residuals(fine.invariants, type, order, 2 * report.margin, a.zero_tol));
  }

  std::cout << "type: " << to_string(type) << "\n";
  print_report(std::cout, "theorem conditions", report);
  if (!a.fields_csv.empty()) write_text(a.fields_csv, residual_fields_csv(fields));
  if (!a.common.output.empty()) {
    Json j = to_json(report);
    j["type"] = std::string(to_string(type));
    write_text(a.common.output, dump_stable(j));
  }
  if (a.strict && report.max_norm() > a.strict_tol) {
    std::cerr << "strict: residual max-norm " << report.max_norm() << " exceeds " << a.strict_tol << "\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  CommonFlags common;
  std::string input;
  std::string origin = "0,0,0,0";
  std::string frame = "standard";
  std::string type;
  std::string path = "uv";
  std::string interp = "linear";
  int reproject_every = 1;
  int substeps = 1;
  double tol = 1e-7;
  double refuse = 1e-2;
  double warn = 1e-6;
  double path_factor = 50.0;
  bool force = false;
  bool strict = false;
};

int run_reconstruct(const ReconstructArgs& a) {
  const InvariantFile file = read_invariants(a.input);
  ReconstructionOptions opt;
  opt.type = parse_theorem(a.type);
  if (!opt.type) opt.type = file.type;
  opt.classify_tol = a.tol;
  opt.order = stencil(a.common.order);
  opt.refuse_threshold = a.refuse;
  opt.warn_threshold = a.warn;
  opt.force = a.force;
  opt.interpolation = a.interp == "cubic" ? Interpolation::Cubic : Interpolation::Linear;
  opt.integration.path = path_from_string(a.path);
  opt.integration.reproject_every = a.reproject_every;
  opt.integration.substeps = a.substeps;
  opt.path_check = true;

  const Reconstruction r = reconstruct(file.invariants, parse_point(a.origin), parse_frame(a.frame), opt);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";

  const double flat = r.flatness.max_norm();
  const double bound = a.path_factor * flat;
  std::cout << "type: " << to_string(r.type) << "\n"
            << "path: " << to_string(opt.integration.path) << "\n"
            << "flatness max-norm: " << fmt(flat) << " (scale " << fmt(r.flatness_scale) << ")\n"
            << "max Gram drift: " << fmt(r.patch.frames->max_gram_drift) << "\n"
            << "path discrepancy at far corner: " << fmt(*r.path_discrepancy_corner) << " (bound " << fmt(bound)
            << ")\n";
  emit(a.common, to_json(r.patch), surface_csv(r.patch));
  if (a.strict && *r.path_discrepancy_corner > bound) {
    std::cerr << to_string(ErrorKind::IncompatibleData) << ": sweep discrepancy " << *r.path_discrepancy_corner
              << " exceeds " << a.path_factor << " x flatness residual " << flat << "\n";
    return exit_code(ErrorKind::IncompatibleData);
  }
  return 0;
}

// ---------------------------------------------------------------- roundtrip

struct RoundtripArgs {
  CommonFlags common;
  std::string input;
  unsigned seed = 1;
  double tol = 1e-7;
};

int run_roundtrip(const RoundtripArgs& a) {
  const Json j = read_json(a.input);
  const StencilOrder order = stencil(a.common.order);
  Json summary = Json::object();

  if (j.value("kind", std::string("surface")) == "surface") {
    const SurfacePatch patch = surface_from_json(j);
    const Extraction ex = extract_invariants(patch, {1e-3, 1e-9, order, +1});
    const SurfaceType type = classify(ex.invariants, a.tol);
    if (type == SurfaceType::InflectionDegenerate || type == SurfaceType::Minimal)
      throw Error(ErrorKind::TypeMismatch,
                  "surface is " + std::string(to_string(type)) + "; the reconstruction theorems do not cover it");
    ReconstructionOptions opt;
    opt.type = type;
    opt.order = order;
    opt.interpolation = order == StencilOrder::Fourth ? Interpolation::Cubic : Interpolation::Linear;
    // Sampled frames are pseudo-orthonormal only to stencil accuracy.
    const Frame origin = reorthonormalize(ex.geometry.frames.at(0, 0));
    const Reconstruction r = reconstruct(ex.invariants, patch.z.at(0, 0), origin, opt);
    SurfacePatch input = with_geometry(patch, ex.geometry);
    input.frames->at(0, 0) = origin;
    const double dist = congruence_distance(input, r.patch);
    const ResidualReport res = integrability_residuals(ex.invariants, ex.derived, order);
    std::cout << "type: " << to_string(type) << "\n"
              << "congruence distance (input vs reconstruction): " << fmt(dist) << "\n"
              << "flatness max-norm: " << fmt(r.flatness.max_norm()) << "\n";
    print_report(std::cout, "integrability residuals", res);
    summary = {{"input", "surface"},
               {"type", std::string(to_string(type))},
               {"congruence_distance", dist},
               {"flatness", to_json(r.flatness)},
               {"integrability", to_json(res)}};
  } else {
    const InvariantFile file = invariants_from_json(j);
    ReconstructionOptions opt;
    opt.type = file.type;
    opt.classify_tol = a.tol;
    opt.order = order;
    std::mt19937_64 rng(a.seed);
    const LorentzMotion m1 = random_motion(rng), m2 = random_motion(rng);
    const Reconstruction r1 = reconstruct(file.invariants, m1.translation, m1.apply(standard_frame()), opt);
    const Reconstruction r2 = reconstruct(file.invariants, m2.translation, m2.apply(standard_frame()), opt);
    const double dist = congruence_distance(r1.patch, r2.patch);
    const Extraction ex = extract_invariants(r1.patch, {1e-3, 1e-9, order, +1});

    Json fields = Json::object();
    const InvariantSet& in = file.invariants;
    const InvariantSet& out = ex.invariants;
    std::cout << "type: " << to_string(r1.type) << "\n"
              << "congruence distance (two random initial frames): " << fmt(dist) << "\n"
              << "re-extracted field errors (max-norm):\n";
    for (const auto& [name, pa, pb] : std::vector<std::tuple<const char*, const ScalarField*, const ScalarField*>>{
             {"f", &in.f, &out.f},
             {"nu", &in.nu, &out.nu},
             {"lambda1", &in.lambda1, &out.lambda1},
             {"lambda2", &in.lambda2, &out.lambda2},
             {"mu1", &in.mu1, &out.mu1},
             {"mu2", &in.mu2, &out.mu2}}) {
      const double err = (pa->values - pb->values).abs().maxCoeff();
      fields[name] = err;
      std::cout << "  " << name << " " << fmt(err) << "\n";
    }
    summary = {{"input", "invariants"},
               {"type", std::string(to_string(r1.type))},
               {"congruence_distance", dist},
               {"field_errors", fields},
               {"flatness", to_json(r1.flatness)}};
  }
  if (!a.common.output.empty()) write_text(a.common.output, dump_stable(summary));
  return 0;
}

// ---------------------------------------------------------------- catalog

int run_catalog_list() {
  for (const auto& e : catalog_entries()) {
    std::cout << e.name << " [" << (e.is_surface ? "surface" : "invariants") << "] " << e.description;
    if (!e.defaults.empty()) {
      std::cout << " (";
      bool first = true;
      for (const auto& [k, v] : e.defaults) {
        std::cout << (first ? "" : ", ") << k << "=" << fmt(v);
        first = false;
      }
      std::cout << ")";
    }
    std::cout << "\n";
  }
  return 0;
}

struct EmitArgs {
  CommonFlags common;
  std::string name;
  std::vector<std::string> params;
  std::string grid;
};

int run_catalog_emit(const EmitArgs& a) {
  std::map<std::string, double> params;
  for (const auto& p : a.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidField, "--param expects key=value, got '" + p + "'");
    const auto v = parse_numbers(p.substr(eq + 1));
    if (v.size() != 1) throw Error(ErrorKind::InvalidField, "--param expects one number in '" + p + "'");
    params[p.substr(0, eq)] = v[0];
  }
  std::optional<GridDomain> domain;
  if (!a.grid.empty()) domain = parse_grid(a.grid);
  const CatalogItem item = catalog_emit(a.name, params, domain);
  if (item.surface)
    emit(a.common, to_json(*item.surface), surface_csv(*item.surface));
  else
    emit(a.common, to_json(*item.invariants, item.type), invariants_csv(*item.invariants));
  return 0;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_format = true) {
  cmd->add_option("-o,--output", flags.output, "output file (default: standard output)");
  if (with_format)
    cmd->add_option("--format", flags.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--order", flags.order, "stencil order")->check(CLI::IsMember({2, 4}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Timelike surfaces in Minkowski 4-space: invariants, integrability, reconstruction"};
  app.require_subcommand(1);

  ExtractArgs ea;
  auto* extract = app.add_subcommand("extract", "extract invariants and integrability residuals from a surface");
  extract->add_option("surface", ea.input, "surface file (JSON or CSV)")->required();
  add_common(extract, ea.common);
  extract->add_option("--tol", ea.tol, "isotropy tolerance on |E|, |G| and F");
  extract->add_option("--minimal-tol", ea.minimal_tol, "nu below this is a minimal point");
  extract->add_option("--classify-tol", ea.classify_tol, "relative zero-test tolerance for the type");
  extract->add_option("--refine", ea.refine, "the same surface sampled at half the step; adds orders");
  extract->add_option("--report", ea.report, "write the residual report JSON here");

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "evaluate the fundamental-theorem conditions of an invariant set");
  check->add_option("invariants", ca.input, "invariant-set file")->required();
  add_common(check, ca.common, false);
  check->add_option("--theorem", ca.theorem, "auto, 1, 2 or 3");
  check->add_option("--refine", ca.refine, "the same data at half the step; adds orders");
  check->add_option("--tol", ca.tol, "relative classification tolerance");
  check->add_option("--zero-tol", ca.zero_tol, "tolerance for the structural zero/nonzero checks");
  check->add_flag("--strict", ca.strict, "exit 1 when a residual exceeds --strict-tol");
  check->add_option("--strict-tol", ca.strict_tol, "max-norm accepted under --strict");
  check->add_option("--fields-csv", ca.fields_csv, "write the residual fields as CSV");

  ReconstructArgs ra;
  auto* recon = app.add_subcommand("reconstruct", "integrate the frame and position systems");
  recon->add_option("invariants", ra.input, "invariant-set file")->required();
  add_common(recon, ra.common);
  recon->add_option("--origin", ra.origin, "initial point x1,x2,x3,x4");
  recon->add_option("--frame", ra.frame, "standard, sixteen numbers, or a JSON frame file");
  recon->add_option("--type", ra.type, "override the classified type (first/second/third)");
  recon->add_option("--path", ra.path, "sweep order")->check(CLI::IsMember({"uv", "vu", "u-then-v", "v-then-u"}));
  recon->add_option("--reproject-every", ra.reproject_every, "re-projection cadence in steps (0 = never)");
  recon->add_option("--substeps", ra.substeps, "integration steps per grid cell");
  recon->add_option("--interp", ra.interp, "coefficient interpolation")->check(CLI::IsMember({"linear", "cubic"}));
  recon->add_option("--tol", ra.tol, "relative classification tolerance");
  recon->add_option("--refuse", ra.refuse, "refuse above this relative flatness residual");
  recon->add_option("--warn", ra.warn, "warn above this relative flatness residual");
  recon->add_option("--path-factor", ra.path_factor, "sweep discrepancy bound as a multiple of the flatness residual");
  recon->add_flag("--force", ra.force, "integrate even when the data are refused");
  recon->add_flag("--strict", ra.strict, "exit 5 when the sweeps disagree beyond the bound");

  RoundtripArgs rta;
  auto* round = app.add_subcommand("roundtrip", "extract/reconstruct/compare in one go");
  round->add_option("file", rta.input, "surface or invariant-set JSON")->required();
  add_common(round, rta.common, false);
  round->add_option("--seed", rta.seed, "seed for the random initial frames");
  round->add_option("--tol", rta.tol, "relative classification tolerance");

  auto* catalog = app.add_subcommand("catalog", "analytic surfaces and invariant families");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "list catalog entries");
  EmitArgs em;
  auto* emit_cmd = catalog->add_subcommand("emit", "write a catalog entry");
  emit_cmd->add_option("name", em.name, "entry name")->required();
  emit_cmd->add_option("--param", em.params, "key=value (repeatable)");
  emit_cmd->add_option("--grid", em.grid, "u0,u1,v0,v1,nu,nv");
  add_common(emit_cmd, em.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*extract) return run_extract(ea);
    if (*check) return run_check(ca);
    if (*recon) return run_reconstruct(ra);
    if (*round) return run_roundtrip(rta);
    if (*list) return run_catalog_list();
    if (*emit_cmd) return run_catalog_emit(em);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
