#include "fluctana/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "fluctana/experiments.hpp"
#include "fluctana/generator.hpp"
#include "fluctana/io.hpp"
#include "fluctana/methods.hpp"
#include "fluctana/scaling.hpp"

namespace fluctana {

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(token, &pos));
      if (pos != token.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": cannot parse integer '" + token + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(token, &pos));
      if (pos != token.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": cannot parse number '" + token + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

namespace {

constexpr const char* kStudyKindNames[] = {"alpha-vs-n", "scatter", "crossover-cal",
                                           "trend-crossover"};

std::vector<Method> parse_method_list(const std::string& text, const char* what) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    try {
      out.push_back(parse_method(token));
    } catch (const std::exception& e) {
      throw UsageError(std::string(what) + ": " + e.what());
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

struct AppState {
  CLI::App app{"fluctuation analysis of long-range correlated series", "fluctana"};
  CLI::App* generate = nullptr;
  CLI::App* analyze = nullptr;
  CLI::App* fit = nullptr;
  CLI::App* study_alpha = nullptr;
  CLI::App* study_scatter = nullptr;
  CLI::App* study_crossover = nullptr;
  CLI::App* study_trend = nullptr;
  std::string fit_range = "fixed-lower";
};

void add_study_common(CLI::App* sub, RunConfig& cfg) {
  sub->fallthrough(true);
  sub->add_option("--n-series", cfg.study.n_series, "ensemble members per cell");
  sub->add_option("--seed", cfg.study.seed, "study seed; member i uses seed XOR i");
  sub->add_option("--quick", cfg.study.quick, "divide n-series by this for quick runs")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out-dir", cfg.study.out_dir, "output directory")->required();
}

std::unique_ptr<AppState> build_app(RunConfig& cfg) {
  auto state = std::make_unique<AppState>();
  CLI::App& app = state->app;
  app.require_subcommand(0, 1);
  app.add_option("--threads", cfg.threads,
                 "cap worker threads (default: all cores, or OMP_NUM_THREADS)");
  // provenance sidecars replay through this (they carry a [subcommand] section)
  app.set_config("--config", "", "read options from a provenance/config file");
  app.allow_config_extras(true);

  CLI::App* gen = app.add_subcommand("generate", "generate a surrogate series");
  state->generate = gen;
  gen->fallthrough(true);
  gen->add_option("--n", cfg.generate.length, "series length")->required();
  gen->add_option("--alpha", cfg.generate.alpha, "target scaling exponent");
  gen->add_option("--alpha1", cfg.generate.alpha_short,
                  "exponent below the crossover scale");
  gen->add_option("--alpha2", cfg.generate.alpha_long,
                  "exponent above the crossover scale");
  gen->add_option("--s-cross", cfg.generate.s_cross, "crossover scale");
  gen->add_option("--trend-a", cfg.generate.trend_amplitude, "additive trend amplitude");
  gen->add_option("--trend-q", cfg.generate.trend_exponent, "trend exponent (i/N)^q");
  gen->add_option("--seed", cfg.generate.seed, "generator seed");
  gen->add_flag("--normalize,!--no-normalize", cfg.generate.normalize,
                "rescale to zero mean, unit variance");
  gen->add_option("--out", cfg.generate.output, "output series file")->required();

  CLI::App* ana = app.add_subcommand("analyze", "compute a fluctuation function");
  state->analyze = ana;
  ana->fallthrough(true);
  ana->add_option("--input", cfg.analyze.inputs,
                  "input series file(s); several files form an ensemble")
      ->required();
  ana->add_option("--csv-column", cfg.analyze.csv_column,
                  "read CSV input, selecting this column (name or 0-based index)");
  ana->add_flag("--csv", cfg.analyze.csv, "read single-column CSV input");
  ana->add_option("--method", cfg.analyze.method, "fa|rs|dfa|bma|cma|mdfa")->required();
  ana->add_option("--order", cfg.analyze.order, "detrending order for dfa/mdfa");
  ana->add_option("--scales", cfg.analyze.scales, "explicit comma-separated scale list");
  ana->add_option("--points-per-decade", cfg.analyze.points_per_decade,
                  "density of the default scale grid");
  ana->add_option("--out", cfg.analyze.output, "output CSV (s,F)")->required();

  CLI::App* fit = app.add_subcommand("fit", "fit exponents to an s,F curve");
  state->fit = fit;
  fit->fallthrough(true);
  fit->add_option("--input", cfg.fit.input, "curve CSV with header s,F")->required();
  fit->add_option("--range", state->fit_range,
                  "explicit | fixed-lower (s in [10,N/2]) | fixed-width (N/20..N/2)")
      ->check(CLI::IsMember({"explicit", "fixed-lower", "fixed-width"}));
  fit->add_option("--s-lo", cfg.fit.s_lo, "explicit lower fit scale");
  fit->add_option("--s-hi", cfg.fit.s_hi, "explicit upper fit scale");
  fit->add_option("--n", cfg.fit.length,
                  "series length behind the curve (default: twice the largest scale)");
  fit->add_option("--method", cfg.fit.method,
                  "method tag enabling the crossover correction (dfa1|cma|mdfa1)");
  fit->add_flag("--detect-crossover", cfg.fit.detect, "run the crossover search");
  fit->add_option("--sse-threshold", cfg.fit.sse_threshold,
                  "relative SSE improvement required to declare a crossover");
  fit->add_option("--min-slope-separation", cfg.fit.min_slope_separation,
                  "minimum |slope change| required to declare a crossover");
  fit->add_option("--out", cfg.fit.output, "report CSV (optional)");

  CLI::App* study = app.add_subcommand("study", "ensemble studies");
  study->fallthrough(true);
  study->require_subcommand(1);

  CLI::App* sa = study->add_subcommand("alpha-vs-n", "exponent statistics vs length");
  state->study_alpha = sa;
  sa->add_option("--alpha", cfg.study.alpha, "target exponent");
  sa->add_option("--lengths", cfg.study.lengths, "comma-separated series lengths");
  sa->add_option("--methods", cfg.study.methods, "comma-separated methods");
  add_study_common(sa, cfg);

  CLI::App* sc = study->add_subcommand("scatter", "method-vs-method exponent scatter");
  state->study_scatter = sc;
  sc->add_option("--alpha", cfg.study.alpha, "target exponent");
  sc->add_option("--lengths", cfg.study.lengths, "comma-separated series lengths");
  sc->add_option("--ref", cfg.study.ref_method, "reference method");
  sc->add_option("--methods", cfg.study.methods, "methods compared against the reference");
  add_study_common(sc, cfg);

  CLI::App* sx = study->add_subcommand("crossover-cal", "real vs observed crossovers");
  state->study_crossover = sx;
  sx->add_option("--alpha1", cfg.study.alpha_short, "exponent below the crossover");
  sx->add_option("--alpha2", cfg.study.alpha_long, "exponent above the crossover");
  sx->add_option("--s-cross", cfg.study.s_cross_list, "comma-separated crossover scales");
  sx->add_option("--n", cfg.study.length, "series length");
  sx->add_option("--methods", cfg.study.methods, "comma-separated methods");
  add_study_common(sx, cfg);

  CLI::App* st = study->add_subcommand("trend-crossover", "trend-induced crossovers");
  state->study_trend = st;
  st->add_option("--alpha", cfg.study.alpha, "intrinsic exponent");
  st->add_option("--trend-q", cfg.study.trend_exponent, "trend exponent (i/N)^q");
  st->add_option("--amplitudes", cfg.study.amplitudes, "comma-separated trend amplitudes");
  st->add_option("--n", cfg.study.length, "series length");
  st->add_option("--methods", cfg.study.methods, "comma-separated methods");
  add_study_common(st, cfg);

  return state;
}

void validate_semantics(const AppState& state, RunConfig& cfg) {
  switch (cfg.command) {
    case RunConfig::Command::Generate: {
      const auto& g = cfg.generate;
      if (g.length < 2) throw UsageError("generate: --n must be >= 2");
      const bool has_split = state.generate->count("--alpha1") ||
                             state.generate->count("--alpha2") ||
                             state.generate->count("--s-cross");
      cfg.generate.crossover = has_split;
      if (has_split) {
        if (!(state.generate->count("--alpha1") && state.generate->count("--alpha2") &&
              state.generate->count("--s-cross"))) {
          throw UsageError("generate: --alpha1, --alpha2 and --s-cross must be given together");
        }
        if (state.generate->count("--alpha")) {
          throw UsageError("generate: --alpha conflicts with --alpha1/--alpha2");
        }
        if (!(g.alpha_short > 0.0 && g.alpha_short < 1.5) ||
            !(g.alpha_long > 0.0 && g.alpha_long < 1.5)) {
          throw UsageError("generate: exponents must lie in (0, 1.5)");
        }
        if (g.s_cross <= 1 || g.s_cross >= g.length) {
          throw UsageError("generate: --s-cross must satisfy 1 < s_cross < n");
        }
      } else if (!(g.alpha > 0.0 && g.alpha < 1.5)) {
        throw UsageError("generate: --alpha must lie in (0, 1.5)");
      }
      if (g.trend_exponent < 0.0) throw UsageError("generate: --trend-q must be >= 0");
      break;
    }
    case RunConfig::Command::Analyze: {
      auto& a = cfg.analyze;
      Method m;
      try {
        m = parse_method(a.method, a.order);
      } catch (const std::exception& e) {
        throw UsageError(std::string("analyze: ") + e.what());
      }
      if (m.has_order() && a.order < 1) {
        throw UsageError("analyze: --order must be >= 1 for " + m.label());
      }
      if (!a.scales.empty()) (void)parse_int_list(a.scales, "analyze: --scales");
      if (a.points_per_decade <= 0.0) {
        throw UsageError("analyze: --points-per-decade must be positive");
      }
      break;
    }
    case RunConfig::Command::Fit: {
      auto& f = cfg.fit;
      if (state.fit_range == "explicit") {
        f.range_mode = RangeMode::Explicit;
        if (!(f.s_lo > 0.0 && f.s_hi > f.s_lo)) {
          throw UsageError("fit: explicit range needs 0 < --s-lo < --s-hi");
        }
      } else if (state.fit_range == "fixed-width") {
        f.range_mode = RangeMode::FixedWidth;
      } else {
        f.range_mode = RangeMode::FixedLower;
      }
      if (!f.method.empty()) {
        try {
          (void)parse_method(f.method);
        } catch (const std::exception& e) {
          throw UsageError(std::string("fit: ") + e.what());
        }
      }
      if (!(f.sse_threshold >= 0.0)) throw UsageError("fit: --sse-threshold must be >= 0");
      if (!(f.min_slope_separation >= 0.0)) {
        throw UsageError("fit: --min-slope-separation must be >= 0");
      }
      if (f.length < 0) throw UsageError("fit: --n must be positive");
      break;
    }
    case RunConfig::Command::Study: {
      auto& s = cfg.study;
      if (s.quick < 1) throw UsageError("study: --quick must be >= 1");
      if (s.n_series < 1) throw UsageError("study: --n-series must be >= 1");
      if (s.methods.empty()) {
        s.methods = (s.kind == StudyKind::Scatter) ? "cma,mdfa1" : "dfa1,cma,mdfa1";
      }
      (void)parse_method_list(s.methods, "study: --methods");
      switch (s.kind) {
        case StudyKind::AlphaVsN:
        case StudyKind::Scatter:
          (void)parse_int_list(s.lengths, "study: --lengths");
          if (!(s.alpha > 0.0 && s.alpha < 1.5)) {
            throw UsageError("study: --alpha must lie in (0, 1.5)");
          }
          if (s.kind == StudyKind::Scatter) {
            try {
              (void)parse_method(s.ref_method);
            } catch (const std::exception& e) {
              throw UsageError(std::string("study: --ref: ") + e.what());
            }
          }
          break;
        case StudyKind::CrossoverCal:
          (void)parse_int_list(s.s_cross_list, "study: --s-cross");
          if (!(s.alpha_short > 0.0 && s.alpha_short < 1.5) ||
              !(s.alpha_long > 0.0 && s.alpha_long < 1.5)) {
            throw UsageError("study: exponents must lie in (0, 1.5)");
          }
          break;
        case StudyKind::TrendCrossover:
          (void)parse_double_list(s.amplitudes, "study: --amplitudes");
          if (!(s.alpha > 0.0 && s.alpha < 1.5)) {
            throw UsageError("study: --alpha must lie in (0, 1.5)");
          }
          if (s.trend_exponent < 0.0) throw UsageError("study: --trend-q must be >= 0");
          break;
      }
      break;
    }
    case RunConfig::Command::None:
      break;
  }
}

// ---------------------------------------------------------------------------
// provenance

std::string quote(const std::string& s) { return '"' + s + '"'; }

void append_kv(std::string& out, const std::string& key, const std::string& value) {
  out += key;
  out += " = ";
  out += value;
  out += '\n';
}

std::string provenance_text(const RunConfig& cfg) {
  std::string p = "# fluctana provenance; replay with: fluctana <subcommand> --config <this file>\n";
  switch (cfg.command) {
    case RunConfig::Command::Generate: {
      const auto& g = cfg.generate;
      p += "[generate]\n";
      append_kv(p, "n", std::to_string(g.length));
      if (g.crossover) {
        append_kv(p, "alpha1", format_double(g.alpha_short));
        append_kv(p, "alpha2", format_double(g.alpha_long));
        append_kv(p, "s-cross", std::to_string(g.s_cross));
      } else {
        append_kv(p, "alpha", format_double(g.alpha));
      }
      append_kv(p, "trend-a", format_double(g.trend_amplitude));
      append_kv(p, "trend-q", format_double(g.trend_exponent));
      append_kv(p, "seed", std::to_string(g.seed));
      append_kv(p, "normalize", g.normalize ? "true" : "false");
      append_kv(p, "out", quote(g.output));
      break;
    }
    case RunConfig::Command::Analyze: {
      const auto& a = cfg.analyze;
      p += "[analyze]\n";
      std::string inputs;
      for (const auto& in : a.inputs) {
        if (!inputs.empty()) inputs += ' ';
        inputs += quote(in);
      }
      append_kv(p, "input", inputs);
      if (!a.csv_column.empty()) append_kv(p, "csv-column", quote(a.csv_column));
      if (a.csv) append_kv(p, "csv", "true");
      append_kv(p, "method", quote(a.method));
      append_kv(p, "order", std::to_string(a.order));
      if (!a.scales.empty()) append_kv(p, "scales", quote(a.scales));
      append_kv(p, "points-per-decade", format_double(a.points_per_decade));
      append_kv(p, "out", quote(a.output));
      break;
    }
    case RunConfig::Command::Fit: {
      const auto& f = cfg.fit;
      p += "[fit]\n";
      append_kv(p, "input", quote(f.input));
      const char* range = f.range_mode == RangeMode::Explicit     ? "explicit"
                          : f.range_mode == RangeMode::FixedWidth ? "fixed-width"
                                                                  : "fixed-lower";
      append_kv(p, "range", quote(range));
      if (f.range_mode == RangeMode::Explicit) {
        append_kv(p, "s-lo", format_double(f.s_lo));
        append_kv(p, "s-hi", format_double(f.s_hi));
      }
      if (f.length > 0) append_kv(p, "n", std::to_string(f.length));
      if (!f.method.empty()) append_kv(p, "method", quote(f.method));
      if (f.detect) append_kv(p, "detect-crossover", "true");
      append_kv(p, "sse-threshold", format_double(f.sse_threshold));
      append_kv(p, "min-slope-separation", format_double(f.min_slope_separation));
      if (!f.output.empty()) append_kv(p, "out", quote(f.output));
      break;
    }
    case RunConfig::Command::Study: {
      const auto& s = cfg.study;
      p += std::string("[study.") + kStudyKindNames[static_cast<int>(s.kind)] + "]\n";
      switch (s.kind) {
        case StudyKind::AlphaVsN:
          append_kv(p, "alpha", format_double(s.alpha));
          append_kv(p, "lengths", quote(s.lengths));
          append_kv(p, "methods", quote(s.methods));
          break;
        case StudyKind::Scatter:
          append_kv(p, "alpha", format_double(s.alpha));
          append_kv(p, "lengths", quote(s.lengths));
          append_kv(p, "ref", quote(s.ref_method));
          append_kv(p, "methods", quote(s.methods));
          break;
        case StudyKind::CrossoverCal:
          append_kv(p, "alpha1", format_double(s.alpha_short));
          append_kv(p, "alpha2", format_double(s.alpha_long));
          append_kv(p, "s-cross", quote(s.s_cross_list));
          append_kv(p, "n", std::to_string(s.length));
          append_kv(p, "methods", quote(s.methods));
          break;
        case StudyKind::TrendCrossover:
          append_kv(p, "alpha", format_double(s.alpha));
          append_kv(p, "trend-q", format_double(s.trend_exponent));
          append_kv(p, "amplitudes", quote(s.amplitudes));
          append_kv(p, "n", std::to_string(s.length));
          append_kv(p, "methods", quote(s.methods));
          break;
      }
      append_kv(p, "n-series", std::to_string(s.n_series));
      append_kv(p, "seed", std::to_string(s.seed));
      append_kv(p, "quick", std::to_string(s.quick));
      append_kv(p, "out-dir", quote(s.out_dir));
      break;
    }
    case RunConfig::Command::None:
      break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// pipelines

void run_generate(const RunConfig& cfg, std::ostream& out) {
  const auto& g = cfg.generate;
  Series series;
  if (g.crossover) {
    CrossoverSpec spec;
    spec.length = g.length;
    spec.alpha_short = g.alpha_short;
    spec.alpha_long = g.alpha_long;
    spec.s_cross = g.s_cross;
    spec.seed = g.seed;
    spec.normalize = g.normalize;
    series = generate_crossover(spec);
  } else {
    GeneratorSpec spec;
    spec.length = g.length;
    spec.alpha = g.alpha;
    spec.seed = g.seed;
    spec.normalize = g.normalize;
    series = generate_power_law(spec);
  }
  if (g.trend_amplitude != 0.0) {
    series = add_trend(series, {g.trend_amplitude, g.trend_exponent});
  }
  write_series_text(g.output, series);
  atomic_write_text(g.output + ".prov", provenance_text(cfg));
  out << "wrote " << g.output << " (N=" << g.length << ")\n";
}

void run_analyze(const RunConfig& cfg, std::ostream& out) {
  const auto& a = cfg.analyze;
  std::vector<Series> ensemble;
  ensemble.reserve(a.inputs.size());
  for (const auto& path : a.inputs) {
    if (!a.csv_column.empty() || a.csv) {
      ensemble.push_back(read_series_csv(path, a.csv_column));
    } else {
      ensemble.push_back(read_series_text(path));
    }
  }
  const Method method = parse_method(a.method, a.order);
  const int n = ensemble.front().size();
  ScaleGrid grid;
  if (!a.scales.empty()) {
    grid = make_scale_grid(parse_int_list(a.scales, "--scales"), n, method);
  } else {
    grid = default_scale_grid(n, method, a.points_per_decade);
  }
  const FluctuationCurve curve = fluctuation_curve(ensemble, method, grid);
  write_curve_csv(a.output, curve);
  atomic_write_text(a.output + ".prov", provenance_text(cfg));

  double f_max = 0.0;
  double x_max = 0.0;
  for (double f : curve.f) f_max = std::max(f_max, f);
  for (const Series& s : ensemble) {
    for (double v : s.values) x_max = std::max(x_max, std::fabs(v));
  }
  if (f_max <= 1e-12 * std::max(1.0, x_max) * n) {
    out << "warning: fluctuation function is ~0; the input may be degenerate "
           "(constant or exactly polynomial)\n";
  }
  out << "wrote " << a.output << " (" << method.label() << ", " << grid.size()
      << " scales, ensemble of " << ensemble.size() << ")\n";
}

void run_fit(const RunConfig& cfg, std::ostream& out) {
  const auto& f = cfg.fit;
  Method method{MethodKind::FA, 1};  // placeholder without crossover correction
  if (!f.method.empty()) method = parse_method(f.method);
  FluctuationCurve curve = read_curve_csv(f.input, method);
  const int n = f.length > 0 ? f.length : curve.series_length;

  double s_lo = 0.0, s_hi = 0.0;
  switch (f.range_mode) {
    case RangeMode::Explicit:
      s_lo = f.s_lo;
      s_hi = f.s_hi;
      break;
    case RangeMode::FixedLower:
      s_lo = 10.0;
      s_hi = n / 2.0;
      break;
    case RangeMode::FixedWidth: {
      const auto range = fixed_width_range(n);
      s_lo = range.first;
      s_hi = range.second;
      break;
    }
  }

  const AlphaEstimate est = fit_alpha(curve, s_lo, s_hi);
  std::string report = "quantity,value\n";
  report += "alpha," + format_double(est.alpha) + '\n';
  report += "intercept," + format_double(est.intercept) + '\n';
  report += "residual_rms," + format_double(est.residual_rms) + '\n';
  report += "n_points," + std::to_string(est.n_points) + '\n';
  report += "s_lo," + format_double(est.s_lo) + '\n';
  report += "s_hi," + format_double(est.s_hi) + '\n';

  out << "alpha = " << format_double(est.alpha) << " over s in [" << format_double(s_lo)
      << ", " << format_double(s_hi) << "] (" << est.n_points
      << " points, residual rms " << format_double(est.residual_rms) << ")\n";

  if (f.detect) {
    const CrossoverEstimate cx =
        detect_crossover(curve, s_lo, s_hi, f.sse_threshold, f.min_slope_separation);
    report += std::string("crossover_found,") + (cx.found ? "1" : "0") + '\n';
    report += "sse_improvement," + format_double(cx.sse_improvement) + '\n';
    if (cx.found) {
      report += "s_observed," + format_double(cx.s_observed) + '\n';
      report += "alpha_below," + format_double(cx.alpha_below) + '\n';
      report += "alpha_above," + format_double(cx.alpha_above) + '\n';
      report += "s_corrected," + format_double(cx.s_corrected) + '\n';
      out << "crossover at s' = " << format_double(cx.s_observed) << " (slopes "
          << format_double(cx.alpha_below) << " -> " << format_double(cx.alpha_above)
          << ")";
      if (has_crossover_correction(method)) {
        out << ", corrected s = " << format_double(cx.s_corrected);
      }
      out << '\n';
    } else {
      out << "no crossover (best split improves SSE by "
          << format_double(100.0 * cx.sse_improvement) << "% < threshold)\n";
    }
  }
  if (!f.output.empty()) {
    atomic_write_text(f.output, report);
    atomic_write_text(f.output + ".prov", provenance_text(cfg));
  }
}

std::filesystem::path study_path(const StudyConfig& s, const char* name) {
  return std::filesystem::path(s.out_dir) / name;
}

void run_study_alpha(const RunConfig& cfg, std::ostream& out, bool scatter) {
  const auto& s = cfg.study;
  const int n_series = std::max(2, s.n_series / s.quick);
  std::vector<int> lengths = parse_int_list(s.lengths, "--lengths");
  std::vector<Method> methods;
  if (scatter) {
    methods.push_back(parse_method(s.ref_method));
    for (const Method& m : parse_method_list(s.methods, "--methods")) {
      methods.push_back(m);
    }
  } else {
    methods = parse_method_list(s.methods, "--methods");
  }
  const AlphaStudyResult result =
      alpha_vs_length_study(s.alpha, lengths, n_series, methods, s.seed);

  std::string stats_csv = "N,method,mean_alpha,sd_alpha,n_series,n_failures\n";
  for (const EnsembleStats& cell : result.stats) {
    stats_csv += std::to_string(cell.series_length) + ',' + cell.method.label() + ',' +
                 format_double(cell.mean_alpha) + ',' + format_double(cell.sd_alpha) +
                 ',' + std::to_string(cell.n_series) + ',' +
                 std::to_string(cell.n_failures) + '\n';
  }
  atomic_write_text(study_path(s, "alpha_stats.csv"), stats_csv);

  std::string summary;
  summary += "alpha-vs-n study: target alpha = " + format_double(s.alpha) +
             ", n_series = " + std::to_string(n_series) + "\n";
  for (const EnsembleStats& cell : result.stats) {
    summary += "  N=" + std::to_string(cell.series_length) + " " + cell.method.label() +
               ": mean=" + format_double(cell.mean_alpha) +
               " sd=" + format_double(cell.sd_alpha) + "\n";
  }

  if (scatter) {
    std::string pairs_csv = "N,pair,alpha_ref,alpha_other\n";
    std::string sd_csv = "N,pair,sd1,sd2,ratio\n";
    for (int n : lengths) {
      const AlphaEnsemble* ref_cell = nullptr;
      for (const AlphaEnsemble& cell : result.raw) {
        if (cell.series_length == n && cell.method == methods.front()) ref_cell = &cell;
      }
      for (std::size_t m = 1; m < methods.size(); ++m) {
        const AlphaEnsemble* other_cell = nullptr;
        for (const AlphaEnsemble& cell : result.raw) {
          if (cell.series_length == n && cell.method == methods[m]) other_cell = &cell;
        }
        if (!ref_cell || !other_cell) continue;
        std::vector<double> a, b;
        for (std::size_t i = 0; i < ref_cell->alphas.size(); ++i) {
          if (std::isnan(ref_cell->alphas[i]) || std::isnan(other_cell->alphas[i])) {
            continue;
          }
          a.push_back(ref_cell->alphas[i]);
          b.push_back(other_cell->alphas[i]);
        }
        const std::string pair = methods.front().label() + "-" + methods[m].label();
        for (std::size_t i = 0; i < a.size(); ++i) {
          pairs_csv += std::to_string(n) + ',' + pair + ',' + format_double(a[i]) + ',' +
                       format_double(b[i]) + '\n';
        }
        const ScatterStats sd = scatter_sd(a, b);
        sd_csv += std::to_string(n) + ',' + pair + ',' + format_double(sd.sd1) + ',' +
                  format_double(sd.sd2) + ',' + format_double(sd.sd1 / sd.sd2) + '\n';
        summary += "  N=" + std::to_string(n) + " " + pair +
                   ": SD1=" + format_double(sd.sd1) + " SD2=" + format_double(sd.sd2) +
                   "\n";
      }
    }
    atomic_write_text(study_path(s, "scatter_pairs.csv"), pairs_csv);
    atomic_write_text(study_path(s, "scatter_sd.csv"), sd_csv);
  } else {
    std::string hist_csv = "N,method,bin_center,count\n";
    for (const EnsembleStats& cell : result.stats) {
      for (const auto& [center, count] : cell.histogram) {
        hist_csv += std::to_string(cell.series_length) + ',' + cell.method.label() + ',' +
                    format_double(center) + ',' + format_double(count) + '\n';
      }
    }
    atomic_write_text(study_path(s, "alpha_histograms.csv"), hist_csv);
  }

  atomic_write_text(study_path(s, "summary.txt"), summary);
  atomic_write_text(study_path(s, "provenance.txt"), provenance_text(cfg));
  out << summary;
}

void run_study_crossover(const RunConfig& cfg, std::ostream& out) {
  const auto& s = cfg.study;
  const int n_series = std::max(2, s.n_series / s.quick);
  const std::vector<int> s_cross = parse_int_list(s.s_cross_list, "--s-cross");
  const std::vector<Method> methods = parse_method_list(s.methods, "--methods");
  const CrossoverCalibration cal = crossover_calibration_study(
      s.alpha_short, s.alpha_long, s_cross, s.length, n_series, methods, s.seed);

  std::string cells_csv =
      "s_cross,method,detected,s_observed,alpha_below,alpha_above,s_corrected\n";
  for (const auto& cell : cal.cells) {
    cells_csv += std::to_string(cell.s_cross) + ',' + cell.method.label() + ',' +
                 (cell.estimate.found ? "1" : "0") + ',' +
                 format_double(cell.estimate.s_observed) + ',' +
                 format_double(cell.estimate.alpha_below) + ',' +
                 format_double(cell.estimate.alpha_above) + ',' +
                 format_double(cell.estimate.s_corrected) + '\n';
  }
  atomic_write_text(study_path(s, "crossover_cells.csv"), cells_csv);

  std::string fits_csv = "method,slope,intercept,n_cells\n";
  std::string summary = "crossover calibration: ln s_cross ~ slope * ln s_obs + intercept\n";
  for (const auto& fit : cal.fits) {
    fits_csv += fit.method.label() + ',' + format_double(fit.slope) + ',' +
                format_double(fit.intercept) + ',' + std::to_string(fit.n_cells) + '\n';
    summary += "  " + fit.method.label() + ": slope=" + format_double(fit.slope) +
               " intercept=" + format_double(fit.intercept) + " (" +
               std::to_string(fit.n_cells) + " cells)\n";
  }
  atomic_write_text(study_path(s, "crossover_fits.csv"), fits_csv);
  atomic_write_text(study_path(s, "summary.txt"), summary);
  atomic_write_text(study_path(s, "provenance.txt"), provenance_text(cfg));
  out << summary;
}

void run_study_trend(const RunConfig& cfg, std::ostream& out) {
  const auto& s = cfg.study;
  const int n_series = std::max(2, s.n_series / s.quick);
  const std::vector<double> amplitudes = parse_double_list(s.amplitudes, "--amplitudes");
  const std::vector<Method> methods = parse_method_list(s.methods, "--methods");
  const TrendCrossoverStudy study = trend_crossover_study(
      s.alpha, s.trend_exponent, amplitudes, s.length, n_series, methods, s.seed);

  std::string cells_csv = "amplitude,method,detected,s_observed\n";
  for (const auto& cell : study.cells) {
    cells_csv += format_double(cell.amplitude) + ',' + cell.method.label() + ',' +
                 (cell.estimate.found ? "1" : "0") + ',' +
                 format_double(cell.estimate.s_observed) + '\n';
  }
  atomic_write_text(study_path(s, "trend_cells.csv"), cells_csv);

  std::string fits_csv = "method,delta,n_cells\n";
  std::string summary = "trend-crossover study: s_obs ~ A^-delta\n";
  for (const auto& fit : study.fits) {
    fits_csv += fit.method.label() + ',' + format_double(fit.delta) + ',' +
                std::to_string(fit.n_cells) + '\n';
    summary += "  " + fit.method.label() + ": delta=" + format_double(fit.delta) + " (" +
               std::to_string(fit.n_cells) + " cells)\n";
  }
  atomic_write_text(study_path(s, "trend_fits.csv"), fits_csv);
  atomic_write_text(study_path(s, "summary.txt"), summary);
  atomic_write_text(study_path(s, "provenance.txt"), provenance_text(cfg));
  out << summary;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  auto state = build_app(cfg);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    state->app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(state->app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  if (state->generate->parsed()) {
    cfg.command = RunConfig::Command::Generate;
  } else if (state->analyze->parsed()) {
    cfg.command = RunConfig::Command::Analyze;
  } else if (state->fit->parsed()) {
    cfg.command = RunConfig::Command::Fit;
  } else if (state->study_alpha->parsed()) {
    cfg.command = RunConfig::Command::Study;
    cfg.study.kind = StudyKind::AlphaVsN;
  } else if (state->study_scatter->parsed()) {
    cfg.command = RunConfig::Command::Study;
    cfg.study.kind = StudyKind::Scatter;
  } else if (state->study_crossover->parsed()) {
    cfg.command = RunConfig::Command::Study;
    cfg.study.kind = StudyKind::CrossoverCal;
  } else if (state->study_trend->parsed()) {
    cfg.command = RunConfig::Command::Study;
    cfg.study.kind = StudyKind::TrendCrossover;
  } else {
    throw UsageError(state->app.help());
  }
  if (cfg.threads < 0) throw UsageError("--threads must be >= 0");
  validate_semantics(*state, cfg);
  return cfg;
}

void run(const RunConfig& cfg, std::ostream& out) {
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  switch (cfg.command) {
    case RunConfig::Command::Generate:
      run_generate(cfg, out);
      break;
    case RunConfig::Command::Analyze:
      run_analyze(cfg, out);
      break;
    case RunConfig::Command::Fit:
      run_fit(cfg, out);
      break;
    case RunConfig::Command::Study:
      switch (cfg.study.kind) {
        case StudyKind::AlphaVsN:
          run_study_alpha(cfg, out, false);
          break;
        case StudyKind::Scatter:
          run_study_alpha(cfg, out, true);
          break;
        case StudyKind::CrossoverCal:
          run_study_crossover(cfg, out);
          break;
        case StudyKind::TrendCrossover:
          run_study_trend(cfg, out);
          break;
      }
      break;
    case RunConfig::Command::None:
      throw UsageError("no command given");
  }
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc) - 1);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    const RunConfig cfg = parse_config(args);
    run(cfg, std::cout);
    return 0;
  } catch (const HelpRequested& e) {
    std::cout << e.what() << '\n';
    return 0;
  } catch (const UsageError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace fluctana
