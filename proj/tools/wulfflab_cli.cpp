// wulfflab command-line front end.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/catalog.hpp"
#include "wulfflab/classify_fit.hpp"
#include "wulfflab/errors.hpp"
#include "wulfflab/hypersurface.hpp"
#include "wulfflab/parallel_focal.hpp"
#include "wulfflab/wulff_geometry.hpp"

namespace {

using namespace wulfflab;
using nlohmann::json;

struct RunConfig {
  std::string anisotropy = "isotropic";
  std::string entry;
  int grid = 0;
  double tol = 0.0;
  std::string out;
  std::string format;
  bool complete = false;
  bool strict = false;
  std::uint64_t seed = 0;
  int dim = 3;
  std::vector<double> t;
  double lambda = 0.0;
  int k = 0;
  int degree = 8;
  int restarts = 5;
  double band = 0.0;
};

// Negative verdicts under --strict.
struct StrictFailure {};

void load_config(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Parse, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "anisotropy") c.anisotropy = v.is_string() ? v.get<std::string>() : v.dump();
      else if (key == "entry") c.entry = v.get<std::string>();
      else if (key == "grid") c.grid = v.get<int>();
      else if (key == "tol") c.tol = v.get<double>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "complete") c.complete = v.get<bool>();
      else if (key == "strict") c.strict = v.get<bool>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "dim") c.dim = v.get<int>();
      else if (key == "t") c.t = v.get<std::vector<double>>();
      else if (key == "lambda") c.lambda = v.get<double>();
      else if (key == "k") c.k = v.get<int>();
      else if (key == "degree") c.degree = v.get<int>();
      else if (key == "restarts") c.restarts = v.get<int>();
      else if (key == "band") c.band = v.get<double>();
      else throw Error(ErrorKind::Parse, "unknown config field '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("config: ") + e.what());
  }
}

// --anisotropy takes a JSON document (file path or inline) or a catalog name.
AnisotropyFunction resolve_anisotropy(const RunConfig& c) {
  const std::string& a = c.anisotropy;
  if (!a.empty() && a.front() == '{') return anisotropy_from_json(a);
  if (std::filesystem::is_regular_file(a)) {
    std::ifstream in(a);
    std::stringstream ss;
    ss << in.rdbuf();
    return anisotropy_from_json(ss.str());
  }
  return anisotropy_by_name(a, c.dim);
}

void check_positive(const RunConfig& c) {
  if (c.grid < 0) throw Error(ErrorKind::InvalidArgument, "--grid must be positive");
  if (c.tol < 0 || !std::isfinite(c.tol)) throw Error(ErrorKind::InvalidArgument, "--tol must be positive");
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void require_format(const RunConfig& c, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (c.format == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw Error(ErrorKind::InvalidArgument, "--format '" + c.format + "' not supported here (use " + list + ")");
}

CatalogEntry resolve_entry(const AnisotropyFunction& f, const RunConfig& c, const char* fallback) {
  return make_entry(f, c.entry.empty() ? std::string(fallback) : c.entry);
}

Vec chart_center(const ImmersionPatch& p) { return 0.5 * (p.domain().lo + p.domain().hi); }

int run_audit(const RunConfig& c) {
  const AnisotropyFunction f = resolve_anisotropy(c);
  const ConvexityReport r = convexity_audit(f, c.grid ? c.grid : 32, c.tol > 0 ? c.tol : 1e-8);
  json j;
  j["pass"] = r.pass;
  j["min_eigenvalue"] = r.min_eigenvalue;
  j["argmin"] = std::vector<double>(r.argmin.data(), r.argmin.data() + r.argmin.size());
  j["points"] = r.points;
  Output out(c.out);
  out.stream() << j.dump(2) << '\n';
  if (c.strict && !r.pass) throw StrictFailure{};
  return 0;
}

int run_wulff(RunConfig c) {
  if (c.format.empty()) c.format = "csv";
  require_format(c, {"csv", "obj"});
  const AnisotropyFunction f = resolve_anisotropy(c);
  const int res = c.grid ? c.grid : 64;
  const WulffSample s = c.k > 0 ? sample_sub_wulff(f, coordinate_subsphere(f.ambient_dim(), c.k), res)
                                : sample_wulff(f, res);
  Output out(c.out);
  if (c.format == "obj") write_obj(out.stream(), s);
  else write_csv(out.stream(), s);
  return 0;
}

int run_curvature(RunConfig c) {
  if (c.format.empty()) c.format = "csv";
  require_format(c, {"csv"});
  const AnisotropyFunction f = resolve_anisotropy(c);
  const CatalogEntry e = resolve_entry(f, c, "wulff");
  const auto rows = curvature_batch(f, e.patch, e.patch.grid(c.grid ? c.grid : 15), c.tol > 0 ? c.tol : 1e-6);
  Output out(c.out);
  write_curvature_csv(out.stream(), rows);
  return 0;
}

int run_translate(RunConfig c) {
  if (c.format.empty()) c.format = "csv";
  require_format(c, {"csv"});
  const AnisotropyFunction f = resolve_anisotropy(c);
  const CatalogEntry e = resolve_entry(f, c, "cylinder:k=1,t=0.5");
  std::vector<double> ts = c.t;
  if (ts.empty())
    for (int i = 0; i < 9; ++i) ts.push_back(-1.0 + 0.25 * i);
  const auto rows = translation_sweep(f, e.patch, ts, e.patch.grid(c.grid ? c.grid : 9));
  Output out(c.out);
  write_sweep_csv(out.stream(), rows);
  return 0;
}

int run_focal(RunConfig c) {
  if (c.format.empty()) c.format = "json";
  require_format(c, {"json"});
  const AnisotropyFunction f = resolve_anisotropy(c);
  const CatalogEntry e = resolve_entry(f, c, "cylinder:k=1,t=0.5");
  const Vec seed = chart_center(e.patch);
  double lambda = c.lambda;
  if (lambda == 0.0) {
    const CurvatureSpectrum s = anisotropic_curvatures(f, e.patch, seed);
    for (const auto& g : s.groups)
      if (std::abs(g.value) > 1e-6) {
        lambda = g.value;
        break;
      }
    if (lambda == 0.0) throw Error(ErrorKind::ZeroCurvature, "every curvature vanishes at the chart center");
  }
  const FocalData d = cartan_residual(f, e.patch, lambda, seed);
  Output out(c.out);
  out.stream() << to_json(d) << '\n';
  return 0;
}

int run_classify(RunConfig c) {
  if (c.format.empty()) c.format = "json";
  require_format(c, {"json"});
  const AnisotropyFunction f = resolve_anisotropy(c);
  const CatalogEntry e = resolve_entry(f, c, "wulff");
  ClassifyOptions opt;
  if (c.tol > 0) opt.iso_tol = c.tol;
  const ClassificationVerdict v = classify(f, e.patch, e.patch.grid(c.grid ? c.grid : 15), c.complete, opt);
  Output out(c.out);
  out.stream() << to_json(v) << '\n';
  std::cerr << "verdict: " << to_string(v.label);
  if (v.label == CaseLabel::ProductK) std::cerr << " k=" << v.k;
  std::cerr << " g=" << v.g << " spread=" << v.spread << '\n';
  const bool negative = v.label == CaseLabel::NotIsoparametric ||
                        v.label == CaseLabel::InconsistentCompleteness || !v.cross_check_passed;
  if (c.strict && negative) throw StrictFailure{};
  return 0;
}

int run_fit(RunConfig c) {
  if (c.format.empty()) c.format = "json";
  require_format(c, {"json"});
  const AnisotropyFunction iso = AnisotropyFunction::isotropic(3);
  const CatalogEntry e = resolve_entry(iso, c, "helicoid");
  FitOptions opt;
  opt.seed = c.seed;
  opt.restarts = c.restarts;
  if (c.tol > 0) opt.target_spread = c.tol;
  const FitResult r = fit_anisotropy(e.patch, c.degree, e.patch.grid(c.grid ? c.grid : 15), opt);
  json j = json::parse(to_json(r));
  const AnisotropyFunction fitted = AnisotropyFunction::axisymmetric(e.patch.ambient_dim(), r.coefficients);
  j["anisotropy"] = json::parse(to_json(fitted));
  if (c.band > 0) j["extended_anisotropy"] = json::parse(to_json(extend_axis(fitted, c.band)));
  Output out(c.out);
  out.stream() << j.dump(2) << '\n';
  if (c.strict && r.non_convergence) throw StrictFailure{};
  return 0;
}

int run_catalog(const RunConfig& c) {
  const AnisotropyFunction f = resolve_anisotropy(c);
  json list = json::array();
  for (const auto& e : builtin_patches(f)) {
    json item;
    item["name"] = e.name;
    item["ambient_dim"] = e.patch.ambient_dim();
    if (e.expected_spectrum) {
      json groups = json::array();
      for (const auto& g : *e.expected_spectrum) groups.push_back({{"lambda", g.value}, {"multiplicity", g.multiplicity}});
      item["expected_spectrum"] = groups;
      item["provenance"] = e.provenance;
    }
    if (!e.expected_case.empty()) item["expected_case"] = e.expected_case;
    list.push_back(item);
  }
  json j;
  j["anisotropy"] = json::parse(to_json(f));
  j["entries"] = list;
  Output out(c.out);
  out.stream() << j.dump(2) << '\n';
  return 0;
}

struct Command {
  CLI::App* app;
  std::function<int(const RunConfig&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wulfflab: anisotropic hypersurface toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration (flags override it)");

  RunConfig flags;
  // Options that were given on the command line overwrite the config file.
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;
  auto common = [&](CLI::App* sub) {
    auto add = [&](CLI::Option* opt, std::function<void(RunConfig&)> copy) { overrides.emplace_back(opt, copy); };
    add(sub->add_option("--anisotropy", flags.anisotropy, "anisotropy JSON (file or inline) or catalog name"),
        [&](RunConfig& c) { c.anisotropy = flags.anisotropy; });
    add(sub->add_option("--dim", flags.dim, "ambient dimension for catalog anisotropies"),
        [&](RunConfig& c) { c.dim = flags.dim; });
    add(sub->add_option("--entry", flags.entry, "catalog entry, e.g. cylinder:k=1,t=0.5"),
        [&](RunConfig& c) { c.entry = flags.entry; });
    add(sub->add_option("--grid", flags.grid, "grid resolution"), [&](RunConfig& c) { c.grid = flags.grid; });
    add(sub->add_option("--tol", flags.tol, "tolerance"), [&](RunConfig& c) { c.tol = flags.tol; });
    add(sub->add_option("--out", flags.out, "output file (default stdout)"), [&](RunConfig& c) { c.out = flags.out; });
    add(sub->add_option("--format", flags.format, "json, csv or obj"), [&](RunConfig& c) { c.format = flags.format; });
    add(sub->add_flag("--complete", flags.complete, "assert the hypersurface is complete"),
        [&](RunConfig& c) { c.complete = flags.complete; });
    add(sub->add_flag("--strict", flags.strict, "exit 1 on a negative verdict"),
        [&](RunConfig& c) { c.strict = flags.strict; });
    add(sub->add_option("--seed", flags.seed, "random seed"), [&](RunConfig& c) { c.seed = flags.seed; });
  };

  std::vector<Command> commands;
  auto sub = [&](const char* name, const char* help, std::function<int(const RunConfig&)> run) {
    CLI::App* s = app.add_subcommand(name, help);
    common(s);
    commands.push_back({s, std::move(run)});
    return s;
  };

  sub("audit", "Convexity audit: min eigenvalue of A_F = D^2F + F I over a sphere grid", run_audit);
  CLI::App* wulff = sub("wulff", "Sample the Wulff shape W_F = phi(S^n), or W^k_F with --k", run_wulff);
  overrides.emplace_back(wulff->add_option("--k", flags.k, "sub-Wulff dimension (coordinate S^k)"),
                         [&](RunConfig& c) { c.k = flags.k; });
  sub("curvature", "Anisotropic principal curvatures (eigenvalues of S_F) and H_F over a chart grid", run_curvature);
  CLI::App* tr = sub("translate", "Parallel translation x_t = x + t phi(nu): sweep of lambda/(1 - t lambda)",
                     run_translate);
  overrides.emplace_back(tr->add_option("--t", flags.t, "translation parameters")->delimiter(','),
                         [&](RunConfig& c) { c.t = flags.t; });
  CLI::App* focal = sub("focal", "Focal point q, focal second fundamental form II and the Cartan-type residual",
                        run_focal);
  overrides.emplace_back(focal->add_option("--lambda", flags.lambda, "focal curvature (default: first nonzero)"),
                         [&](RunConfig& c) { c.lambda = flags.lambda; });
  sub("classify", "Classify an anisotropic isoparametric sample: plane, Wulff shape, W^k_F x R^(n-k)",
      run_classify);
  CLI::App* fit = sub("fit", "Fit an axisymmetric F making the target's anisotropic curvatures constant", run_fit);
  overrides.emplace_back(fit->add_option("--degree", flags.degree, "even basis degree <= 8"),
                         [&](RunConfig& c) { c.degree = flags.degree; });
  overrides.emplace_back(fit->add_option("--restarts", flags.restarts, "optimizer restarts"),
                         [&](RunConfig& c) { c.restarts = flags.restarts; });
  overrides.emplace_back(fit->add_option("--band", flags.band, "also extend the fit to one dimension up"),
                         [&](RunConfig& c) { c.band = flags.band; });
  sub("catalog", "List catalog entries with their expected anisotropic principal curvatures", run_catalog);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config(config_path, cfg);
    for (const auto& [opt, copy] : overrides)
      if (opt->count() > 0) copy(cfg);
    check_positive(cfg);
    for (const auto& cmd : commands)
      if (cmd.app->parsed()) return cmd.run(cfg);
  } catch (const StrictFailure&) {
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_input_error(e.kind()) ? 2 : 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
