#include "lmsm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmsm/analysis.hpp"
#include "lmsm/csv.hpp"
#include "lmsm/errors.hpp"
#include "lmsm/lmsm.hpp"
#include "lmsm/svg.hpp"

namespace lmsm {

namespace {

struct Failure {
  std::string kind;
  int code;
  std::string message;
};

void emit_error(std::ostream& err, const Failure& f) {
  nlohmann::ordered_json j;
  j["error"] = f.kind;
  j["exit"] = f.code;
  j["message"] = f.message;
  err << j.dump() << '\n';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool truthy(std::string_view v) { return v == "1" || v == "true" || v == "yes" || v == "on"; }

bool flag_present(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

const std::vector<std::string> kCommands = {"simulate", "field", "converge", "scale-check", "render"};

// Folds `--config FILE` entries into the argument list; explicit flags win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ParameterError("--config needs a file argument");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  const auto entries = read_key_value_file(path);
  const bool has_command = std::any_of(args.begin(), args.end(), [](const std::string& a) {
    return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
  });
  for (const auto& [key, value] : entries) {
    if (key == "command") {
      if (!has_command) args.insert(args.begin(), value);
      continue;
    }
    if (flag_present(args, key)) continue;
    if (key == "allow-boundary") {
      if (truthy(value)) args.push_back("--allow-boundary");
      continue;
    }
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

std::vector<double> uniform_points(std::size_t n) {
  if (n == 0) throw ParameterError("--points must be at least 1");
  if (n == 1) return {0.0};
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  t.back() = 1.0;
  return t;
}

std::filesystem::path svg_path_for(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension(".svg");
  return p;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SimulateArgs {
  std::string preset;
  double alpha = 1.5;
  std::string hurst = "constant:0.75";
  int J_hf = 12;
  int J_lf = 6;
  std::uint64_t seed = 0;
  std::string mode = "consistent";
  std::string method = "abel";
  std::size_t points = 0;
  bool allow_boundary = false;
  std::string out = "path.csv";
  std::string svg;
};

struct FieldArgs {
  std::string which = "total";
  double alpha = 1.5;
  double a = 0.7;
  double b = 0.9;
  std::size_t nu = 129;
  std::size_t nv = 5;
  int J_hf = 10;
  int J_lf = 6;
  std::uint64_t seed = 0;
  std::string mode = "consistent";
  std::string method = "abel";
  unsigned threads = 1;
  std::string out = "field.csv";
};

struct ConvergeArgs {
  std::string which = "hf";
  double alpha = 1.5;
  double v = 0.75;
  int J_min = 6;
  int J_max = 14;
  int replicates = 16;
  std::uint64_t seed = 1;
  int extra_levels = 1;
  double tolerance = 0.15;
  std::string out;
};

struct ScaleArgs {
  std::string which = "hf";
  double alpha = 1.5;
  int J = 14;
  int replicates = 20000;
  std::uint64_t seed = 1;
  std::string mode = "consistent";
  std::vector<double> u{0.25, 0.5, 1.0};
  std::vector<double> v{0.7, 0.8};
  std::string out;
};

int do_simulate(const SimulateArgs& a, bool alpha_given, bool hurst_given, bool boundary_given, std::ostream& out) {
  PathConfig cfg;
  cfg.alpha = a.alpha;
  cfg.hurst = parse_hurst(a.hurst);
  cfg.allow_boundary = a.allow_boundary;
  if (!a.preset.empty()) {
    const FigurePreset preset = figure_preset(a.preset);
    if (!alpha_given) cfg.alpha = preset.alpha;
    if (!hurst_given) cfg.hurst = preset.hurst;
    if (!boundary_given) cfg.allow_boundary = preset.allow_boundary;
  }
  cfg.J_hf = a.J_hf;
  cfg.J_lf = a.J_lf;
  cfg.seed = a.seed;
  cfg.mode = parse_coefficient_mode(a.mode);
  cfg.method = parse_summation(a.method);
  validate_params(cfg.alpha, cfg.hurst, cfg.allow_boundary);
  if (cfg.J_hf < 0 || cfg.J_lf < 0) throw ParameterError("depths must be non-negative");

  const std::vector<double> grid = a.points == 0 ? default_time_grid(cfg.J_hf) : uniform_points(a.points);
  const PathSample path = synthesize_path(cfg, grid);
  for (std::size_t i = 0; i < path.y.size(); ++i) {
    if (!std::isfinite(path.y1[i]) || !std::isfinite(path.y2[i])) {
      throw std::runtime_error("non-finite path value at t=" + format_double(path.t[i]));
    }
  }

  std::ostringstream csv;
  write_path_csv(csv, path);
  const std::string csv_text = csv.str();
  std::istringstream back(csv_text);
  const std::string svg_text = render_svg(read_csv(back));

  const std::filesystem::path csv_path = a.out;
  const std::filesystem::path svg_path = a.svg.empty() ? svg_path_for(csv_path) : std::filesystem::path(a.svg);
  write_file_atomic(csv_path, csv_text);
  write_file_atomic(svg_path, svg_text);
  out << "wrote " << csv_path.string() << " and " << svg_path.string() << " (" << path.t.size() << " points)\n";
  if (path.validated.clamped) {
    out << "note: H clamped into [" << format_double(path.validated.clamp_low) << ","
        << format_double(path.validated.clamp_high) << "]\n";
  }
  return kExitOk;
}

int do_field(const FieldArgs& a, std::ostream& out) {
  const FieldPart which = parse_field_part(a.which);
  const CoefficientMode mode = parse_coefficient_mode(a.mode);
  const Summation method = parse_summation(a.method);
  const EvalDomain domain = EvalDomain::uniform(a.nu, a.a, a.b, a.nv);
  domain.validate(a.alpha);
  const auto pyr = generate_coefficients(a.alpha, std::max(a.J_hf, 1), std::max(a.J_lf, 2), mode, a.seed);
  const auto prefix = prefix_sums(pyr);
  const FieldSample field =
      evaluate_field(domain, pyr, prefix, which, Depth{a.J_hf, a.J_lf}, method, std::max(1u, a.threads));

  nlohmann::ordered_json j;
  j["which"] = a.which;
  j["alpha"] = a.alpha;
  j["a"] = a.a;
  j["b"] = a.b;
  j["nu"] = a.nu;
  j["nv"] = a.nv;
  j["J_hf"] = a.J_hf;
  j["J_lf"] = a.J_lf;
  j["seed"] = a.seed;
  j["mode"] = a.mode;
  if (mode == CoefficientMode::independent) j["mode_note"] = "approximation: i.i.d. coefficients, per-row marginal laws only";
  j["method"] = a.method;
  std::ostringstream csv;
  csv << "# config: " << j.dump() << '\n';
  write_field_csv(csv, field);
  write_file_atomic(a.out, csv.str());
  out << "wrote " << a.out << " (" << a.nu << "x" << a.nv << ")\n";
  return kExitOk;
}

int do_converge(const ConvergeArgs& a, std::ostream& out) {
  ConvergenceStudyConfig cfg;
  cfg.which = parse_field_part(a.which);
  cfg.alpha = a.alpha;
  cfg.a = a.v;
  cfg.b = a.v;
  if (a.J_max < a.J_min) throw ParameterError("--Jmax must not be below --Jmin");
  for (int J = a.J_min; J <= a.J_max; ++J) cfg.J_list.push_back(J);
  cfg.replicates = a.replicates;
  cfg.seed = a.seed;
  cfg.extra_levels = a.extra_levels;
  cfg.nv = 1;
  const ConvergenceReport report = convergence_study(cfg);
  const std::string summary = convergence_summary(report, a.tolerance);
  if (!a.out.empty()) {
    std::ostringstream csv;
    write_convergence_csv(csv, report);
    write_file_atomic(a.out, csv.str());
  }
  out << summary;
  return kExitOk;
}

int do_scale(const ScaleArgs& a, std::ostream& out) {
  MarginalScaleConfig cfg;
  cfg.which = parse_field_part(a.which);
  cfg.alpha = a.alpha;
  cfg.J = a.J;
  cfg.replicates = a.replicates;
  cfg.seed = a.seed;
  cfg.mode = parse_coefficient_mode(a.mode);
  for (double u : a.u)
    for (double v : a.v) cfg.points.push_back({u, v});
  if (cfg.points.empty()) throw ParameterError("no (u,v) points requested");
  const auto results = marginal_scale_study(cfg);
  std::ostringstream csv;
  write_scale_csv(csv, cfg, results);
  if (!a.out.empty()) write_file_atomic(a.out, csv.str());
  out << csv.str();
  return kExitOk;
}

int do_render(const std::string& in_path, const std::string& out_path, std::ostream& out) {
  const std::string text = read_text_file(in_path);
  std::istringstream in(text);
  const std::string svg = render_svg(read_csv(in));
  const std::filesystem::path target = out_path.empty() ? svg_path_for(in_path) : std::filesystem::path(out_path);
  write_file_atomic(target, svg);
  out << "wrote " << target.string() << '\n';
  return kExitOk;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key(trim(view.substr(0, eq)));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw ParameterError(path + ":" + std::to_string(line_no) + ": empty key");
    entries.emplace_back(std::move(key), std::string(trim(view.substr(eq + 1))));
  }
  return entries;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Haar-series synthesis of linear fractional and multifractional stable motion", "lmsm"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Synthesize an LMSM path; writes CSV and SVG");
  simulate->add_option("--preset", sim.preset, "fig1-row1, fig1-row2 or fig1-row3");
  auto* sim_alpha = simulate->add_option("--alpha", sim.alpha, "Stability index in (1,2)");
  auto* sim_hurst = simulate->add_option("--hurst", sim.hurst, "Hurst function, e.g. linear:0.9,-0.2");
  simulate->add_option("--Jhf", sim.J_hf, "High-frequency depth");
  simulate->add_option("--Jlf", sim.J_lf, "Low-frequency depth");
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--mode", sim.mode, "consistent or independent");
  simulate->add_option("--method", sim.method, "abel or naive");
  simulate->add_option("--points", sim.points, "Uniform time points (default 2^Jhf + 1)");
  auto* sim_boundary = simulate->add_flag("--allow-boundary", sim.allow_boundary, "Clamp H into (1/alpha, 1)");
  simulate->add_option("--out", sim.out, "CSV output path");
  simulate->add_option("--svg", sim.svg, "SVG output path (default: CSV path with .svg)");

  FieldArgs fld;
  auto* field = app.add_subcommand("field", "Evaluate the two-parameter field on a (u,v) grid");
  field->add_option("--which", fld.which, "hf, lf_plus, lf_minus, lf or total");
  field->add_option("--alpha", fld.alpha);
  field->add_option("--a", fld.a, "Lower end of the v range");
  field->add_option("--b", fld.b, "Upper end of the v range");
  field->add_option("--nu", fld.nu);
  field->add_option("--nv", fld.nv);
  field->add_option("--Jhf", fld.J_hf);
  field->add_option("--Jlf", fld.J_lf);
  field->add_option("--seed", fld.seed);
  field->add_option("--mode", fld.mode);
  field->add_option("--method", fld.method);
  field->add_option("--threads", fld.threads);
  field->add_option("--out", fld.out);

  ConvergeArgs cv;
  auto* converge = app.add_subcommand("converge", "Truncation-error convergence study");
  converge->add_option("--which", cv.which, "hf or lf");
  converge->add_option("--alpha", cv.alpha);
  converge->add_option("--v", cv.v);
  converge->add_option("--Jmin", cv.J_min);
  converge->add_option("--Jmax", cv.J_max);
  converge->add_option("--replicates", cv.replicates);
  converge->add_option("--seed", cv.seed);
  converge->add_option("--extra-levels", cv.extra_levels, "Grid for depths J, J+1 is i/2^(J+extra)");
  converge->add_option("--tolerance", cv.tolerance);
  converge->add_option("--out", cv.out, "Optional CSV report");

  ScaleArgs sc;
  auto* scale = app.add_subcommand("scale-check", "Monte Carlo marginal scale against theory");
  scale->add_option("--which", sc.which, "hf or lf");
  scale->add_option("--alpha", sc.alpha);
  scale->add_option("--J", sc.J);
  scale->add_option("--replicates", sc.replicates);
  scale->add_option("--seed", sc.seed);
  scale->add_option("--mode", sc.mode);
  scale->add_option("--u", sc.u)->delimiter(',');
  scale->add_option("--v", sc.v)->delimiter(',');
  scale->add_option("--out", sc.out, "Optional CSV report");

  std::string render_in, render_out;
  auto* render = app.add_subcommand("render", "Render a path or field CSV to SVG");
  render->add_option("--in", render_in)->required();
  render->add_option("--out", render_out, "Default: input path with .svg");

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      emit_error(err, {"usage", kExitInvalid, e.what()});
      return kExitInvalid;
    }

    if (simulate->parsed()) {
      return do_simulate(sim, sim_alpha->count() > 0, sim_hurst->count() > 0, sim_boundary->count() > 0, out);
    }
    if (field->parsed()) return do_field(fld, out);
    if (converge->parsed()) return do_converge(cv, out);
    if (scale->parsed()) return do_scale(sc, out);
    if (render->parsed()) return do_render(render_in, render_out, out);
    emit_error(err, {"usage", kExitInvalid, "no subcommand"});
    return kExitInvalid;
  } catch (const ParameterError& e) {
    emit_error(err, {"parameter", kExitInvalid, e.what()});
    return kExitInvalid;
  } catch (const SchemaError& e) {
    emit_error(err, {"schema", kExitInvalid, e.what()});
    return kExitInvalid;
  } catch (const StatisticsError& e) {
    emit_error(err, {"statistics", kExitInvalid, e.what()});
    return kExitInvalid;
  } catch (const DepthError& e) {
    emit_error(err, {"depth", kExitInvalid, e.what()});
    return kExitInvalid;
  } catch (const ResolutionError& e) {
    emit_error(err, {"resolution", kExitInvalid, e.what()});
    return kExitInvalid;
  } catch (const DomainMismatchError& e) {
    emit_error(err, {"domain", kExitInvalid, e.what()});
    return kExitInvalid;
  } catch (const IoError& e) {
    emit_error(err, {"io", kExitIo, e.what()});
    return kExitIo;
  } catch (const BudgetError& e) {
    emit_error(err, {"budget", kExitCompute, e.what()});
    return kExitCompute;
  } catch (const std::exception& e) {
    emit_error(err, {"compute", kExitCompute, e.what()});
    return kExitCompute;
  }
}

}  // namespace lmsm
