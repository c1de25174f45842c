#include "fluctana/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fluctana/generator.hpp"

namespace fluctana {

namespace {

std::vector<std::pair<double, double>> make_histogram(const std::vector<double>& alphas) {
  const int n_bins =
      static_cast<int>(std::lround((kHistogramHi - kHistogramLo) / kHistogramBinWidth));
  std::vector<double> counts(n_bins, 0.0);
  int total = 0;
  for (double a : alphas) {
    if (std::isnan(a)) continue;
    int bin = static_cast<int>(std::floor((a - kHistogramLo) / kHistogramBinWidth));
    bin = std::clamp(bin, 0, n_bins - 1);
    counts[bin] += 1.0;
    ++total;
  }
  std::vector<std::pair<double, double>> hist(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    hist[b] = {kHistogramLo + (b + 0.5) * kHistogramBinWidth,
               total > 0 ? counts[b] / total : 0.0};
  }
  return hist;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

MeanSd mean_sd_ignoring_nan(const std::vector<double>& values) {
  MeanSd out;
  long double sum = 0.0L;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++out.n;
  }
  if (out.n == 0) return out;
  out.mean = static_cast<double>(sum / out.n);
  long double ssq = 0.0L;
  for (double v : values) {
    if (std::isnan(v)) continue;
    const long double d = v - out.mean;
    ssq += d * d;
  }
  out.sd = std::sqrt(static_cast<double>(ssq / out.n));
  return out;
}

}  // namespace

std::pair<double, double> default_search_window(int n) {
  return {10.0, n / 4.0};
}

namespace {

// A search window that is lopsided around the crossover drags the fitted
// vertex toward the longer side. The studies therefore locate the feature in
// two passes: a full-window pass, then a re-fit inside a window
// log-symmetric about the first estimate.
constexpr double kRefineWindowRatio = 8.0;

CrossoverEstimate locate_crossover(const FluctuationCurve& curve, double lo, double hi) {
  const CrossoverEstimate first = detect_crossover(curve, lo, hi);
  if (!first.found) return first;
  const double lo2 = std::max(lo, first.s_observed / kRefineWindowRatio);
  const double hi2 = std::min(hi, first.s_observed * kRefineWindowRatio);
  try {
    const CrossoverEstimate second = detect_crossover(curve, lo2, hi2);
    if (second.found) return second;
  } catch (const std::exception&) {
    // too few points in the refined window; keep the first estimate
  }
  return first;
}

}  // namespace

AlphaStudyResult alpha_vs_length_study(double target_alpha, std::span<const int> lengths,
                                       int n_series, std::span<const Method> methods,
                                       std::uint64_t seed) {
  if (lengths.empty()) throw std::invalid_argument("no lengths given");
  if (n_series < 10) throw std::invalid_argument("study needs n_series >= 10");
  if (methods.empty()) throw std::invalid_argument("no methods given");
  for (int n : lengths) {
    if (n < 40) throw std::invalid_argument("study lengths must be >= 40");
  }

  AlphaStudyResult result;
  long totals = 0;
  long failures = 0;
  for (std::size_t li = 0; li < lengths.size(); ++li) {
    const int n = lengths[li];
    std::vector<ScaleGrid> grids;
    grids.reserve(methods.size());
    for (const Method& m : methods) grids.push_back(default_scale_grid(n, m));

    std::vector<std::vector<double>> alphas(
        methods.size(),
        std::vector<double>(n_series, std::numeric_limits<double>::quiet_NaN()));

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_series; ++i) {
      const std::uint64_t idx =
          static_cast<std::uint64_t>(li) * static_cast<std::uint64_t>(n_series) +
          static_cast<std::uint64_t>(i);
      GeneratorSpec spec;
      spec.length = n;
      spec.alpha = target_alpha;
      spec.seed = member_seed(seed, idx);
      const Series member = generate_power_law(spec);
      for (std::size_t m = 0; m < methods.size(); ++m) {
        try {
          const FluctuationCurve curve = fluctuation_curve(member, methods[m], grids[m]);
          alphas[m][i] = fit_alpha(curve, 10.0, n / 2.0).alpha;
        } catch (const std::exception&) {
          // leave NaN; accounted below
        }
      }
    }

    for (std::size_t m = 0; m < methods.size(); ++m) {
      const MeanSd stats = mean_sd_ignoring_nan(alphas[m]);
      const int n_failures = n_series - stats.n;
      totals += n_series;
      failures += n_failures;

      EnsembleStats cell;
      cell.series_length = n;
      cell.method = methods[m];
      cell.mean_alpha = stats.mean;
      cell.sd_alpha = stats.sd;
      cell.histogram = make_histogram(alphas[m]);
      cell.n_series = n_series;
      cell.n_failures = n_failures;
      result.stats.push_back(std::move(cell));

      AlphaEnsemble raw;
      raw.series_length = n;
      raw.method = methods[m];
      raw.alphas = std::move(alphas[m]);
      raw.n_failures = n_failures;
      result.raw.push_back(std::move(raw));
    }
  }
  if (failures * 10 > totals) {
    throw std::runtime_error("more than 10% of exponent fits failed (" +
                             std::to_string(failures) + "/" + std::to_string(totals) + ")");
  }
  return result;
}

ScatterStats scatter_sd(std::span<const double> alpha_ref,
                        std::span<const double> alpha_other) {
  if (alpha_ref.size() != alpha_other.size()) {
    throw std::invalid_argument("scatter lists differ in length");
  }
  const std::size_t n = alpha_ref.size();
  if (n < 2) throw std::invalid_argument("scatter needs at least 2 pairs");
  ScatterStats out;
  out.pairs.reserve(n);
  long double sum_diff = 0.0L, sum_sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    out.pairs.emplace_back(alpha_ref[i], alpha_other[i]);
    sum_diff += alpha_ref[i] - alpha_other[i];
    sum_sum += alpha_ref[i] + alpha_other[i];
  }
  const double mean_diff = static_cast<double>(sum_diff / n);
  const double mean_sum = static_cast<double>(sum_sum / n);
  long double acc1 = 0.0L, acc2 = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const double d1 = (alpha_ref[i] - alpha_other[i]) - mean_diff;
    const double d2 = (alpha_ref[i] + alpha_other[i]) - mean_sum;
    acc1 += 0.5 * d1 * d1;
    acc2 += 0.5 * d2 * d2;
  }
  out.sd1 = std::sqrt(static_cast<double>(acc1 / n));
  out.sd2 = std::sqrt(static_cast<double>(acc2 / n));
  return out;
}

namespace {

// OLS of y on x; returns {slope, intercept}.
std::pair<double, double> regress(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("regression needs >= 2 points");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("degenerate regression abscissa");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace

CrossoverCalibration crossover_calibration_study(double alpha_short, double alpha_long,
                                                 std::span<const int> s_cross_list, int n,
                                                 int n_series,
                                                 std::span<const Method> methods,
                                                 std::uint64_t seed) {
  if (s_cross_list.empty()) throw std::invalid_argument("no crossover scales given");
  for (int sx : s_cross_list) {
    if (sx <= 10 || sx >= n / 10) {
      throw std::invalid_argument("s_cross must lie in (10, N/10)");
    }
  }
  std::vector<ScaleGrid> grids;
  grids.reserve(methods.size());
  for (const Method& m : methods) grids.push_back(default_scale_grid(n, m));
  const auto [search_lo, search_hi] = default_search_window(n);

  CrossoverCalibration out;
  for (std::size_t ci = 0; ci < s_cross_list.size(); ++ci) {
    const int s_cross = s_cross_list[ci];
    const auto make_member = [&, ci](int i) {
      CrossoverSpec spec;
      spec.length = n;
      spec.alpha_short = alpha_short;
      spec.alpha_long = alpha_long;
      spec.s_cross = s_cross;
      const std::uint64_t idx =
          static_cast<std::uint64_t>(ci) * static_cast<std::uint64_t>(n_series) +
          static_cast<std::uint64_t>(i);
      spec.seed = member_seed(seed, idx);
      return generate_crossover(spec);
    };
    const std::vector<FluctuationCurve> curves =
        ensemble_curves(n_series, make_member, methods, grids);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      CrossoverCalibration::Cell cell;
      cell.s_cross = s_cross;
      cell.method = methods[m];
      cell.estimate = locate_crossover(curves[m], search_lo, search_hi);
      out.cells.push_back(std::move(cell));
    }
  }
  for (const Method& m : methods) {
    std::vector<double> x, y;
    for (const auto& cell : out.cells) {
      if (!(cell.method == m) || !cell.estimate.found) continue;
      x.push_back(std::log(cell.estimate.s_observed));
      y.push_back(std::log(static_cast<double>(cell.s_cross)));
    }
    if (x.size() < 2) continue;  // too few detections to calibrate
    const auto [slope, intercept] = regress(x, y);
    out.fits.push_back({m, slope, intercept, static_cast<int>(x.size())});
  }
  return out;
}

TrendCrossoverStudy trend_crossover_study(double alpha, double trend_exponent,
                                          std::span<const double> amplitudes, int n,
                                          int n_series, std::span<const Method> methods,
                                          std::uint64_t seed) {
  if (amplitudes.empty()) throw std::invalid_argument("no amplitudes given");
  double a_min = amplitudes.front(), a_max = amplitudes.front();
  for (double a : amplitudes) {
    if (!(a > 0.0)) throw std::invalid_argument("amplitudes must be positive");
    a_min = std::min(a_min, a);
    a_max = std::max(a_max, a);
  }
  if (amplitudes.size() >= 2 && a_max / a_min < 10.0) {
    throw std::invalid_argument("amplitudes must span at least one decade");
  }
  std::vector<ScaleGrid> grids;
  grids.reserve(methods.size());
  for (const Method& m : methods) grids.push_back(default_scale_grid(n, m));
  const auto [search_lo, search_hi] = default_search_window(n);

  TrendCrossoverStudy out;
  for (std::size_t ai = 0; ai < amplitudes.size(); ++ai) {
    const double amplitude = amplitudes[ai];
    const TrendSpec trend{amplitude, trend_exponent};
    const auto make_member = [&, ai](int i) {
      GeneratorSpec spec;
      spec.length = n;
      spec.alpha = alpha;
      const std::uint64_t idx =
          static_cast<std::uint64_t>(ai) * static_cast<std::uint64_t>(n_series) +
          static_cast<std::uint64_t>(i);
      spec.seed = member_seed(seed, idx);
      return add_trend(generate_power_law(spec), trend);
    };
    const std::vector<FluctuationCurve> curves =
        ensemble_curves(n_series, make_member, methods, grids);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      TrendCrossoverStudy::Cell cell;
      cell.amplitude = amplitude;
      cell.method = methods[m];
      cell.estimate = locate_crossover(curves[m], search_lo, search_hi);
      out.cells.push_back(std::move(cell));
    }
  }
  for (const Method& m : methods) {
    std::vector<double> x, y;
    for (const auto& cell : out.cells) {
      if (!(cell.method == m) || !cell.estimate.found) continue;
      x.push_back(std::log(cell.amplitude));
      y.push_back(std::log(cell.estimate.s_observed));
    }
    if (x.size() < 2) continue;
    const auto [slope, intercept] = regress(x, y);
    (void)intercept;
    out.fits.push_back({m, -slope, static_cast<int>(x.size())});
  }
  return out;
}

}  // namespace fluctana
