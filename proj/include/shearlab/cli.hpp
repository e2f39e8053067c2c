#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "shearlab/asymptotics.hpp"
#include "shearlab/error.hpp"
#include "shearlab/fenchel_nielsen.hpp"
#include "shearlab/foliation.hpp"
#include "shearlab/io.hpp"
#include "shearlab/norms.hpp"
#include "shearlab/shear.hpp"
#include "shearlab/svg.hpp"
#include "shearlab/triangulation.hpp"

namespace shearlab::cli {

using io::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitUncertified = 3;
inline constexpr int kExitUsage = 64;

struct OptionSpec {
  std::string name;
  std::string help;
  std::string default_value;
  bool flag = false;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;
};

inline const std::vector<CommandSpec>& command_table() {
  static const std::vector<CommandSpec> table = [] {
    auto common_with_out = [](const std::string& out) {
      return std::vector<OptionSpec>{
          {"seed", "random seed (SHEARLAB_SEED overrides)", "1"},
          {"samples", "Monte Carlo sample count", "1000000"},
          {"threads", "worker threads", "1"},
          {"out", "output directory (empty: standard output only)", out},
      };
    };
    const auto common = common_with_out("");
    const std::vector<OptionSpec> shear_input{
        {"surface", "built-in surface name or SurfaceSpec JSON path", "s_1_1"},
        {"shears", "comma-separated shears, one per edge", ""},
        {"shears-file", "shear JSON file (overrides --surface and --shears)", ""},
    };
    const std::vector<OptionSpec> orbit_limits{
        {"norm", "euclidean, sup or l1", "euclidean"},
        {"max-nodes", "node limit of the enumeration", "5000000"},
        {"margin", "prune margin (0 selects it automatically)", "0"},
    };
    auto join = [](std::vector<OptionSpec> a, const std::vector<OptionSpec>& b) {
      a.insert(a.end(), b.begin(), b.end());
      return a;
    };
    std::vector<CommandSpec> t;
    t.push_back({"length", "hyperbolic length of a closed curve",
                 join(join(shear_input, {{"curve", "a, b, ab, aB, slope:p/q or puncture:k", "a"},
                                         {"require-complete", "reject incomplete shears", "", true}}),
                      common)});
    t.push_back({"shear-from-fn", "shears of a Fenchel-Nielsen point on s_1_1",
                 join({{"surface", "surface name", "s_1_1"},
                       {"length", "pants curve length", "1"},
                       {"twist", "twist in length units", "0"},
                       {"fn-file", "FN JSON file (overrides the other inputs)", ""}},
                      common)});
    t.push_back({"flip", "shears after flipping an edge",
                 join(join(shear_input, {{"edge", "edge id", "0"}}), common)});
    t.push_back({"orbit-count", "count the flip orbit inside norm balls",
                 join(join(join(shear_input, orbit_limits),
                           {{"Lmax", "largest radius", "30"},
                            {"grid", "number of grid radii", "30"},
                            {"fit-lo", "lower end of the fit window (default Lmax/2)", ""},
                            {"fit-hi", "upper end of the fit window (default Lmax)", ""}}),
                      common_with_out("."))});
    t.push_back({"volume", "Monte Carlo volume of a norm ball on the complete subspace",
                 join({{"surface", "built-in surface name or SurfaceSpec JSON path", "s_1_1"},
                       {"norm", "euclidean, sup or l1", "euclidean"},
                       {"radius", "ball radius", "1"}},
                      common)});
    t.push_back({"apl-check", "linear asymptote of a function along a ray",
                 join({{"function", "shear (s_1_1 twist ray) or arccosh-exp", "shear"},
                       {"length", "pants curve length of the twist ray", "1.3"},
                       {"edge", "edge whose shear is tracked", "0"},
                       {"tmin", "first ray parameter", "2"},
                       {"tmax", "last ray parameter", "32"},
                       {"points", "number of ray parameters", "41"},
                       {"tol", "tolerance on the tail residual", "0.001"}},
                      common)});
    t.push_back({"bounding-check", "running supremum of (l + |tau|) / F over the orbit on s_1_1",
                 join(join(join(shear_input, orbit_limits),
                           {{"Lmax", "largest radius", "24"},
                            {"control", "none, or constant for F = 1", "none"}}),
                      common)});
    return t;
  }();
  return table;
}

inline const CommandSpec* find_command(const std::string& name) {
  for (const auto& c : command_table()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

inline std::string usage() {
  std::string s = "usage: shearlab <command> [options]\n"
                  "       shearlab --from-config <artifact or config JSON>\n\ncommands:\n";
  for (const auto& c : command_table()) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-16s%s\n", c.name.c_str(), c.help.c_str());
    s += line;
  }
  s += "\nrun 'shearlab <command> --help' for the options of a command\n";
  return s;
}

/// Command and the full set of option values, defaults included.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> options;

  json to_json() const {
    json j;
    j["command"] = command;
    json o = json::object();
    for (const auto& [k, v] : options) o[k] = v;
    j["options"] = o;
    return j;
  }

  static RunConfig from_json(const json& j) {
    RunConfig c;
    c.command = io::get_field<std::string>(j, "command", "run config");
    const CommandSpec* spec = find_command(c.command);
    if (!spec) throw ValidationError("run config names unknown command '" + c.command + "'");
    const auto given = io::get_field<std::map<std::string, std::string>>(j, "options", "run config");
    for (const auto& o : spec->options) c.options[o.name] = o.flag ? "false" : o.default_value;
    for (const auto& [k, v] : given) {
      if (!c.options.count(k)) throw ValidationError("run config has unknown option '" + k + "'");
      c.options[k] = v;
    }
    return c;
  }

  const std::string& at(const std::string& key) const { return options.at(key); }
  double number(const std::string& key) const { return io::parse_number(options.at(key)); }
  long long integer(const std::string& key) const { return io::parse_integer(options.at(key)); }
  bool flag(const std::string& key) const { return options.at(key) == "true"; }
};

/// Extracts the run config embedded in a CSV, SVG or JSON artifact, or reads
/// a bare config file.
inline RunConfig config_from_artifact(const std::string& text) {
  const std::string csv_tag = "# config: ";
  if (text.rfind(csv_tag, 0) == 0) {
    const auto end = text.find('\n');
    return RunConfig::from_json(io::parse_json(text.substr(csv_tag.size(), end - csv_tag.size()), "config"));
  }
  const std::string svg_tag = "<!-- config: ";
  if (const auto pos = text.find(svg_tag); pos != std::string::npos) {
    const auto start = pos + svg_tag.size();
    const auto end = text.find(" -->", start);
    if (end == std::string::npos) throw ValidationError("unterminated config comment");
    return RunConfig::from_json(io::parse_json(text.substr(start, end - start), "config"));
  }
  const json j = io::parse_json(text, "config");
  return RunConfig::from_json(j.is_object() && j.contains("config") ? j.at("config") : j);
}

namespace detail {

inline void apply_seed_override(RunConfig& cfg) {
  const char* env = std::getenv("SHEARLAB_SEED");
  if (env && *env) {
    const long long seed = io::parse_integer(env);
    if (seed < 0) throw ValidationError("SHEARLAB_SEED must be nonnegative");
    cfg.options["seed"] = env;
  }
}

inline void check_common(const RunConfig& cfg) {
  if (cfg.integer("seed") < 0) throw ValidationError("seed must be nonnegative");
  if (cfg.integer("samples") < 1) throw ValidationError("samples must be positive");
  if (cfg.integer("threads") < 1) throw ValidationError("threads must be positive");
}

inline ShearVector load_shears(const RunConfig& cfg) {
  if (!cfg.at("shears-file").empty()) {
    return io::shear_from_json(io::parse_json(io::read_file(cfg.at("shears-file")), "shear file"));
  }
  if (cfg.at("shears").empty()) throw ValidationError("need --shears or --shears-file");
  return ShearVector(io::load_surface(cfg.at("surface")), io::parse_list(cfg.at("shears")));
}

inline OrbitLimits orbit_limits(const RunConfig& cfg) {
  OrbitLimits lim;
  const long long nodes = cfg.integer("max-nodes");
  if (nodes < 1) throw ValidationError("max-nodes must be positive");
  lim.max_nodes = static_cast<std::uint64_t>(nodes);
  lim.prune_margin = cfg.number("margin");
  lim.threads = static_cast<int>(cfg.integer("threads"));
  return lim;
}

inline json with_config(const RunConfig& cfg, const json& body) {
  json j;
  j["config"] = cfg.to_json();
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  return j;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Output {
  std::string stdout_text;
  std::vector<std::pair<std::string, std::string>> files;
  int code = kExitOk;
};

inline Output cmd_length(const RunConfig& cfg) {
  const ShearVector s = load_shears(cfg);
  if (cfg.flag("require-complete")) {
    double worst = 0.0;
    for (double r : check_complete(s)) worst = std::max(worst, std::abs(r));
    if (worst > kCompleteTol * std::max(1.0, norm_value(s.values(), Norm::sup))) {
      throw ValidationError("completeness residual " + io::format_number(worst));
    }
  }
  const double l = curve_length(s, named_curve(s.triangulation(), cfg.at("curve")));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7f\n", l);
  return {buf, {}, kExitOk};
}

inline Output cmd_shear_from_fn(const RunConfig& cfg) {
  std::string surface = cfg.at("surface");
  FNPoint p{{"a"}, {cfg.number("length")}, {cfg.number("twist")}};
  if (!cfg.at("fn-file").empty()) {
    std::tie(surface, p) = io::fn_from_json(io::parse_json(io::read_file(cfg.at("fn-file")), "FN file"));
  }
  if (surface != "s_1_1") {
    throw ValidationError("shear-from-fn supports s_1_1 only, got '" + surface + "'");
  }
  if (p.lengths.size() != 1 || p.twists.size() != 1) {
    throw ValidationError("s_1_1 takes one length and one twist");
  }
  const ShearVector s = torus_fn_to_shear(p.lengths[0], p.twists[0]);
  const std::string text = dump(with_config(cfg, io::shear_to_json(s)));
  return {text, {{"shears.json", text}}, kExitOk};
}

inline Output cmd_flip(const RunConfig& cfg) {
  const ShearVector s = load_shears(cfg);
  const ShearVector f = flip_shears(s, static_cast<int>(cfg.integer("edge")));
  const std::string text = dump(with_config(cfg, io::shear_to_json(f)));
  return {text, {{"shears.json", text}}, kExitOk};
}

inline Output cmd_orbit_count(const RunConfig& cfg) {
  const ShearVector x = load_shears(cfg);
  const Norm norm = parse_norm(cfg.at("norm"));
  const double lmax = cfg.number("Lmax");
  const long long n = cfg.integer("grid");
  if (n < 1 || n > 100000) throw ValidationError("grid must be between 1 and 100000");
  const OrbitCount oc = enumerate_orbit(x, lmax, norm, orbit_limits(cfg),
                                        radius_grid(lmax, static_cast<int>(n)));
  const std::string config_text = cfg.to_json().dump();
  const std::string csv = "# config: " + config_text + "\n" + io::orbit_csv_rows(oc);

  const double lo = cfg.at("fit-lo").empty() ? lmax / 2.0 : cfg.number("fit-lo");
  const double hi = cfg.at("fit-hi").empty() ? lmax : cfg.number("fit-hi");
  json fit_body;
  std::optional<svg::LineFit> line;
  try {
    const PowerFit f = fit_exponent(oc, lo, hi);
    fit_body = io::fit_to_json(f, lo, hi, x.triangulation().complete_dim());
    line = svg::LineFit{f.exponent, f.log_coefficient};
  } catch (const ValidationError& e) {
    fit_body["error"] = e.what();
    fit_body["window"] = {lo, hi};
  }
  fit_body["certified"] = oc.certified;
  fit_body["prune_margin"] = oc.prune_margin;
  fit_body["nodes_expanded"] = oc.nodes_expanded;

  std::vector<double> counts(oc.counts_raw.begin(), oc.counts_raw.end());
  const std::string title = "flip orbit count, " + to_string(norm) + " norm";
  const std::string plot = svg::loglog_plot(oc.grid, counts, line, title, config_text);
  return {csv,
          {{"orbit_count.csv", csv}, {"orbit_count.svg", plot}, {"orbit_fit.json", dump(with_config(cfg, fit_body))}},
          oc.certified ? kExitOk : kExitUncertified};
}

inline Output cmd_volume(const RunConfig& cfg) {
  const IdealTriangulation tri = io::load_surface(cfg.at("surface"));
  const Norm norm = parse_norm(cfg.at("norm"));
  const double radius = cfg.number("radius");
  const auto v = mc_ball_volume(ball_spec(tri, norm, radius), static_cast<std::uint64_t>(cfg.integer("samples")),
                                static_cast<std::uint64_t>(cfg.integer("seed")),
                                static_cast<int>(cfg.integer("threads")));
  const std::string text = dump(with_config(cfg, io::volume_to_json(io::surface_reference(tri), norm, radius, v)));
  return {text, {{"volume.json", text}}, kExitOk};
}

inline Output cmd_apl_check(const RunConfig& cfg) {
  const double tmin = cfg.number("tmin"), tmax = cfg.number("tmax");
  const long long points = cfg.integer("points");
  if (points < 4 || points > 100000) throw ValidationError("points must be between 4 and 100000");
  if (!(tmax > tmin)) throw ValidationError("tmax must exceed tmin");
  std::vector<double> t;
  for (long long i = 0; i < points; ++i) t.push_back(tmin + (tmax - tmin) * i / (points - 1));
  LinearAsymptote a;
  const std::string fn = cfg.at("function");
  if (fn == "shear") {
    const double l = cfg.number("length");
    const long long e = cfg.integer("edge");
    if (e < 0 || e > 2) throw ValidationError("s_1_1 has edges 0, 1 and 2");
    const ClosedCone cone{{{0.0, 1.0}}};
    auto f = [e](const std::vector<double>& x) { return torus_fn_to_shear(x[0], x[1])[static_cast<int>(e)]; };
    a = apl_residual_scan(f, cone, {l, 0.0}, {0.0, 1.0}, t);
  } else if (fn == "arccosh-exp") {
    const ClosedCone cone{{{1.0}}};
    auto f = [](const std::vector<double>& x) { return std::acosh(std::exp(x[0])); };
    a = apl_residual_scan(f, cone, {0.0}, {1.0}, t);
  } else {
    throw ValidationError("unknown function '" + fn + "' (expected shear or arccosh-exp)");
  }
  json body;
  body["function"] = fn;
  body["slope"] = a.slope;
  body["intercept"] = a.intercept;
  body["tail_residual"] = a.tail_residual;
  body["passed"] = a.tail_residual <= cfg.number("tol");
  body["t"] = a.t;
  body["residuals"] = a.residuals;
  const std::string text = dump(with_config(cfg, body));
  return {text, {{"apl.json", text}}, kExitOk};
}

inline Output cmd_bounding_check(const RunConfig& cfg) {
  const ShearVector x = load_shears(cfg);
  const Norm norm = parse_norm(cfg.at("norm"));
  const OrbitCount oc = enumerate_orbit(x, cfg.number("Lmax"), norm, orbit_limits(cfg));
  auto [pts, f] = torus_orbit_sample(oc, x.triangulation_ptr());
  const std::string control = cfg.at("control");
  if (control == "constant") {
    f.assign(f.size(), 1.0);
  } else if (control != "none") {
    throw ValidationError("unknown control '" + control + "' (expected none or constant)");
  }
  const BoundingResult r = bounding_check(pts, f);
  json body;
  body["sample_size"] = pts.size();
  body["sup_ratio"] = r.sup_ratio;
  body["half_sup_ratio"] = r.half_sup_ratio;
  body["stable"] = r.stable;
  body["certified"] = oc.certified;
  const std::string text = dump(with_config(cfg, body));
  return {text, {{"bounding.json", text}}, oc.certified ? kExitOk : kExitUncertified};
}

inline Output dispatch(const RunConfig& cfg) {
  check_common(cfg);
  if (cfg.command == "length") return cmd_length(cfg);
  if (cfg.command == "shear-from-fn") return cmd_shear_from_fn(cfg);
  if (cfg.command == "flip") return cmd_flip(cfg);
  if (cfg.command == "orbit-count") return cmd_orbit_count(cfg);
  if (cfg.command == "volume") return cmd_volume(cfg);
  if (cfg.command == "apl-check") return cmd_apl_check(cfg);
  if (cfg.command == "bounding-check") return cmd_bounding_check(cfg);
  throw ValidationError("unknown command '" + cfg.command + "'");
}

}  // namespace detail

/// Runs a resolved configuration, writing artifacts into its output directory.
inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const detail::Output o = detail::dispatch(cfg);
    const std::string& dir = cfg.at("out");
    if (!dir.empty() && !o.files.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      for (const auto& [name, content] : o.files) {
        io::write_file((std::filesystem::path(dir) / name).string(), content);
      }
    }
    out << o.stdout_text;
    if (o.code == kExitUncertified) err << "warning: result is not certified\n";
    return o.code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

/// Parses the arguments after the program name into a configuration. A help
/// request leaves the help text in `help` instead.
inline RunConfig parse_args(const std::vector<std::string>& args, std::string* help = nullptr) {
  const CommandSpec* spec = find_command(args.at(0));
  CLI::App app(spec->help, "shearlab " + spec->name);
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  for (const auto& o : spec->options) {
    if (o.flag) {
      flags[o.name] = false;
      app.add_flag("--" + o.name, flags[o.name], o.help);
    } else {
      values[o.name] = o.default_value;
      app.add_option("--" + o.name, values[o.name], o.help)->capture_default_str();
    }
  }
  std::vector<const char*> argv{"shearlab"};
  for (std::size_t i = 1; i < args.size(); ++i) argv.push_back(args[i].c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    if (!help) throw;
    *help = app.help();
    return {};
  }
  RunConfig cfg;
  cfg.command = spec->name;
  cfg.options = values;
  for (const auto& [k, v] : flags) cfg.options[k] = v ? "true" : "false";
  return cfg;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage();
    return kExitUsage;
  }
  const std::string& first = args[0];
  if (first == "-h" || first == "--help") {
    out << usage();
    return kExitOk;
  }
  RunConfig cfg;
  try {
    if (first == "--from-config") {
      if (args.size() != 2) throw ValidationError("--from-config takes exactly one path");
      cfg = config_from_artifact(io::read_file(args[1]));
    } else if (find_command(first)) {
      std::string help;
      try {
        cfg = parse_args(args, &help);
      } catch (const CLI::ParseError& e) {
        throw ValidationError(e.what());
      }
      if (!help.empty()) {
        out << help;
        return kExitOk;
      }
    } else {
      err << "unknown command '" << first << "'\n" << usage();
      return kExitUsage;
    }
    detail::apply_seed_override(cfg);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return execute(cfg, out, err);
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace shearlab::cli
