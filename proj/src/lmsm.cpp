#include "lmsm/lmsm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "lmsm/csv.hpp"
#include "lmsm/errors.hpp"

namespace lmsm {

namespace {

void require_count(std::string_view name, std::span<const double> params, std::size_t n) {
  if (params.size() != n) {
    throw ParameterError("hurst preset '" + std::string(name) + "' takes " + std::to_string(n) + " parameters, got " +
                         std::to_string(params.size()));
  }
}

}  // namespace

HurstFunction HurstFunction::constant(double h) {
  HurstFunction f;
  f.kind_ = HurstKind::constant;
  f.params_ = {h};
  return f;
}

HurstFunction HurstFunction::linear(double intercept, double slope) {
  HurstFunction f;
  f.kind_ = HurstKind::linear;
  f.params_ = {intercept, slope};
  return f;
}

HurstFunction HurstFunction::sine(double amplitude, double frequency, double offset) {
  HurstFunction f;
  f.kind_ = HurstKind::sine;
  f.params_ = {amplitude, frequency, offset};
  return f;
}

HurstFunction HurstFunction::logistic(double base, double height, double rate, double center) {
  HurstFunction f;
  f.kind_ = HurstKind::logistic;
  f.params_ = {base, height, rate, center};
  return f;
}

HurstFunction HurstFunction::table(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw ParameterError("hurst table needs at least one knot");
  std::sort(knots.begin(), knots.end());
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].first == knots[i - 1].first) throw ParameterError("hurst table has duplicate knot times");
  }
  HurstFunction f;
  f.kind_ = HurstKind::table;
  for (const auto& [t, h] : knots) {
    f.params_.push_back(t);
    f.params_.push_back(h);
  }
  return f;
}

double HurstFunction::operator()(double t) const {
  const auto& p = params_;
  switch (kind_) {
    case HurstKind::constant: return p[0];
    case HurstKind::linear: return p[0] + p[1] * t;
    case HurstKind::sine: return p[0] * std::sin(2.0 * std::numbers::pi * p[1] * t) + p[2];
    case HurstKind::logistic: return p[0] + p[1] / (1.0 + std::exp(p[2] * (t - p[3])));
    case HurstKind::table: {
      const std::size_t n = p.size() / 2;
      if (t <= p[0]) return p[1];
      if (t >= p[2 * (n - 1)]) return p[2 * (n - 1) + 1];
      std::size_t i = 1;
      while (p[2 * i] < t) ++i;
      const double t0 = p[2 * (i - 1)], h0 = p[2 * (i - 1) + 1];
      const double t1 = p[2 * i], h1 = p[2 * i + 1];
      return h0 + (h1 - h0) * (t - t0) / (t1 - t0);
    }
  }
  return p[0];
}

std::string HurstFunction::describe() const {
  static constexpr std::string_view names[] = {"constant", "linear", "sine", "logistic", "table"};
  std::string out(names[static_cast<int>(kind_)]);
  out += '(';
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (i) out += ',';
    out += format_double(params_[i]);
  }
  out += ')';
  return out;
}

std::pair<double, double> HurstFunction::sampled_range() const {
  double lo = (*this)(0.0);
  double hi = lo;
  const double n = static_cast<double>(kHurstSamplingPoints - 1);
  for (std::size_t i = 1; i < kHurstSamplingPoints; ++i) {
    const double h = (*this)(static_cast<double>(i) / n);
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  return {lo, hi};
}

HurstFunction hurst_preset(std::string_view name, std::span<const double> parameters) {
  if (name == "constant") {
    require_count(name, parameters, 1);
    return HurstFunction::constant(parameters[0]);
  }
  if (name == "linear") {
    require_count(name, parameters, 2);
    return HurstFunction::linear(parameters[0], parameters[1]);
  }
  if (name == "sine") {
    require_count(name, parameters, 3);
    return HurstFunction::sine(parameters[0], parameters[1], parameters[2]);
  }
  if (name == "logistic") {
    require_count(name, parameters, 4);
    return HurstFunction::logistic(parameters[0], parameters[1], parameters[2], parameters[3]);
  }
  if (name == "table") {
    if (parameters.empty() || parameters.size() % 2 != 0) throw ParameterError("hurst table takes t,h pairs");
    std::vector<std::pair<double, double>> knots;
    for (std::size_t i = 0; i < parameters.size(); i += 2) knots.emplace_back(parameters[i], parameters[i + 1]);
    return HurstFunction::table(std::move(knots));
  }
  throw ParameterError("unknown hurst preset '" + std::string(name) + "'");
}

HurstFunction parse_hurst(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      try {
        params.push_back(parse_double(rest.substr(0, comma)));
      } catch (const SchemaError&) {
        throw ParameterError("bad hurst parameter in '" + std::string(spec) + "'");
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  return hurst_preset(name, params);
}

FigurePreset figure_preset(std::string_view name) {
  if (name == "fig1-row1") return {"fig1-row1", 1.4, HurstFunction::linear(0.9, -0.2), true};
  if (name == "fig1-row2") return {"fig1-row2", 1.7, HurstFunction::sine(0.2, 2.0, 0.8), true};
  if (name == "fig1-row3") return {"fig1-row3", 1.6, HurstFunction::logistic(0.65, 0.25, 100.0, 0.5), false};
  throw ParameterError("unknown preset '" + std::string(name) + "' (expected fig1-row1, fig1-row2 or fig1-row3)");
}

double ValidatedConfig::hurst_at(double t) const {
  const double h = hurst(t);
  return allow_boundary ? std::clamp(h, clamp_low, clamp_high) : h;
}

ValidatedConfig validate_params(double alpha, const HurstFunction& hurst, bool allow_boundary) {
  std::vector<std::string> violations;
  const bool alpha_ok = alpha > 1.0 && alpha < 2.0;
  if (!alpha_ok) violations.push_back("alpha must lie in (1,2), got " + format_double(alpha));

  ValidatedConfig cfg;
  cfg.alpha = alpha;
  cfg.hurst = hurst;
  cfg.allow_boundary = allow_boundary;
  std::tie(cfg.h_min, cfg.h_max) = hurst.sampled_range();
  if (!std::isfinite(cfg.h_min) || !std::isfinite(cfg.h_max)) violations.push_back("H is not finite on [0,1]");

  std::vector<std::string> bound_violations;
  if (alpha_ok) {
    cfg.clamp_low = 1.0 / alpha + kHurstMargin;
    cfg.clamp_high = 1.0 - kHurstMargin;
    if (!(cfg.h_min > cfg.clamp_low)) {
      bound_violations.push_back("min H = " + format_double(cfg.h_min) + " must exceed 1/alpha = " +
                                 format_double(1.0 / alpha) + " (margin " + format_double(kHurstMargin) + ")");
    }
    if (!(cfg.h_max < cfg.clamp_high)) {
      bound_violations.push_back("max H = " + format_double(cfg.h_max) + " must be below 1 (margin " +
                                 format_double(kHurstMargin) + ")");
    }
  }
  if (!bound_violations.empty()) {
    if (allow_boundary && violations.empty() && cfg.clamp_low < cfg.clamp_high) {
      cfg.clamped = true;
    } else {
      violations.insert(violations.end(), bound_violations.begin(), bound_violations.end());
    }
  }
  if (!violations.empty()) {
    std::string message = violations.front();
    for (std::size_t i = 1; i < violations.size(); ++i) message += "; " + violations[i];
    throw ParameterError(message);
  }
  return cfg;
}

std::vector<double> default_time_grid(int J_hf) {
  if (J_hf < 0 || J_hf > 30) throw ParameterError("J_hf out of range for a default time grid");
  const std::size_t n = (std::size_t{1} << J_hf) + 1;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = std::ldexp(static_cast<double>(i), -J_hf);
  return t;
}

PathSample synthesize_path(const PathConfig& config, std::span<const double> t_grid) {
  // Validate before spending time on the pyramid.
  validate_params(config.alpha, config.hurst, config.allow_boundary);
  const CoefficientPyramid pyr = generate_coefficients(config.alpha, std::max(config.J_hf, 1),
                                                       std::max(config.J_lf, 2), config.mode, config.seed);
  const PrefixSums prefix = prefix_sums(pyr);
  return synthesize_path(config, t_grid, pyr, prefix);
}

PathSample synthesize_path(const PathConfig& config, std::span<const double> t_grid,
                           const CoefficientPyramid& pyramid, const PrefixSums& prefix) {
  PathSample path;
  path.config = config;
  path.validated = validate_params(config.alpha, config.hurst, config.allow_boundary);
  if (pyramid.alpha != config.alpha) throw ParameterError("pyramid alpha does not match configuration");
  path.t.assign(t_grid.begin(), t_grid.end());
  path.y1.resize(t_grid.size());
  path.y2.resize(t_grid.size());
  path.y.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const double h = path.validated.hurst_at(t);
    path.y1[i] = x1_partial(t, h, pyramid, prefix, config.J_hf, config.method);
    path.y2[i] = x2_partial(t, h, pyramid, prefix, config.J_lf, config.method);
    path.y[i] = path.y1[i] + path.y2[i];
  }
  return path;
}

std::string config_json(const PathSample& path) {
  const auto& c = path.config;
  const auto& v = path.validated;
  nlohmann::ordered_json j;
  j["alpha"] = c.alpha;
  j["hurst"] = c.hurst.describe();
  j["J_hf"] = c.J_hf;
  j["J_lf"] = c.J_lf;
  j["seed"] = c.seed;
  j["mode"] = std::string(to_string(c.mode));
  if (c.mode == CoefficientMode::independent) {
    j["mode_note"] = "approximation: i.i.d. coefficients, per-row marginal laws only";
  }
  j["method"] = std::string(to_string(c.method));
  j["points"] = path.t.size();
  j["h_range"] = {v.h_min, v.h_max};
  j["allow_boundary"] = c.allow_boundary;
  j["clamped"] = v.clamped;
  if (v.clamped) j["clamp"] = {v.clamp_low, v.clamp_high};
  return j.dump();
}

void write_path_csv(std::ostream& out, const PathSample& path) {
  out << "# config: " << config_json(path) << '\n';
  out << "t,y1,y2,y\n";
  for (std::size_t i = 0; i < path.t.size(); ++i) {
    out << format_double(path.t[i]) << ',' << format_double(path.y1[i]) << ',' << format_double(path.y2[i]) << ','
        << format_double(path.y[i]) << '\n';
  }
}

}  // namespace lmsm
