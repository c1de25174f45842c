#include "fluctana/methods.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace fluctana {

std::string Method::label() const {
  switch (kind) {
    case MethodKind::FA:
      return "FA";
    case MethodKind::RS:
      return "RS";
    case MethodKind::DFA:
      return "DFA" + std::to_string(order);
    case MethodKind::BMA:
      return "BMA";
    case MethodKind::CMA:
      return "CMA";
    case MethodKind::MDFA:
      return "MDFA" + std::to_string(order);
  }
  return "?";
}

int Method::min_scale() const {
  switch (kind) {
    case MethodKind::FA:
    case MethodKind::RS:
    case MethodKind::BMA:
      return 4;
    case MethodKind::DFA:
      return order + 2;
    case MethodKind::CMA:
      return 3;
    case MethodKind::MDFA: {
      const int m = std::max(order + 2, 4);
      return (m % 2 == 0) ? m : m + 1;
    }
  }
  return 4;
}

Method parse_method(const std::string& name, int default_order) {
  std::string base;
  std::string digits;
  for (char c : name) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
    } else if (!digits.empty()) {
      throw std::invalid_argument("unknown method '" + name + "'");
    } else {
      base += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  Method m;
  if (base == "fa") {
    m.kind = MethodKind::FA;
  } else if (base == "rs") {
    m.kind = MethodKind::RS;
  } else if (base == "dfa") {
    m.kind = MethodKind::DFA;
  } else if (base == "bma") {
    m.kind = MethodKind::BMA;
  } else if (base == "cma") {
    m.kind = MethodKind::CMA;
  } else if (base == "mdfa") {
    m.kind = MethodKind::MDFA;
  } else {
    throw std::invalid_argument("unknown method '" + name + "'");
  }
  if (!digits.empty()) {
    if (!m.has_order()) {
      throw std::invalid_argument("method '" + base + "' takes no order");
    }
    m.order = std::stoi(digits);
  } else if (m.has_order()) {
    m.order = default_order;
  }
  if (m.has_order() && m.order < 1) {
    throw std::invalid_argument("detrending order must be >= 1");
  }
  return m;
}

namespace {

int round_to_valid_scale(double target, const Method& method) {
  if (method.needs_odd_scale()) {
    return 2 * static_cast<int>(std::lround((target - 1.0) / 2.0)) + 1;
  }
  if (method.needs_even_scale()) {
    return 2 * static_cast<int>(std::lround(target / 2.0));
  }
  return static_cast<int>(std::lround(target));
}

int max_valid_scale(int n, const Method& method) {
  int s = n / 2;
  if (method.needs_odd_scale() && s % 2 == 0) --s;
  if (method.needs_even_scale() && s % 2 != 0) --s;
  return s;
}

void validate_grid(const ScaleGrid& grid, int n, const Method& method) {
  if (grid.scales.empty()) throw std::invalid_argument("scale grid is empty");
  int prev = 0;
  for (int s : grid.scales) {
    if (s <= prev) throw std::invalid_argument("scale grid must be strictly increasing");
    prev = s;
    if (s < method.min_scale()) {
      throw std::invalid_argument("scale " + std::to_string(s) + " is below the " +
                                  method.label() + " minimum of " +
                                  std::to_string(method.min_scale()));
    }
    if (s > n / 2) {
      throw std::invalid_argument("scale " + std::to_string(s) +
                                  " exceeds N/2 = " + std::to_string(n / 2));
    }
    if (method.needs_odd_scale() && s % 2 == 0) {
      throw std::invalid_argument(method.label() + " requires odd scales");
    }
    if (method.needs_even_scale() && s % 2 != 0) {
      throw std::invalid_argument(method.label() + " requires even scales");
    }
  }
}

}  // namespace

ScaleGrid default_scale_grid(int n, const Method& method, double points_per_decade) {
  if (n < 16) throw std::invalid_argument("series too short for a scale grid (N >= 16)");
  if (points_per_decade <= 0.0) {
    throw std::invalid_argument("points_per_decade must be positive");
  }
  const int s_lo = method.min_scale();
  const int s_hi = max_valid_scale(n, method);
  if (s_hi < s_lo) {
    throw std::invalid_argument("no valid scales for " + method.label() +
                                " with N = " + std::to_string(n));
  }
  const double step = std::pow(10.0, 1.0 / points_per_decade);
  ScaleGrid grid;
  double target = static_cast<double>(s_lo);
  while (target <= static_cast<double>(s_hi) * (1.0 + 1e-12)) {
    int s = round_to_valid_scale(target, method);
    s = std::clamp(s, s_lo, s_hi);
    if (grid.scales.empty() || s > grid.scales.back()) grid.scales.push_back(s);
    target *= step;
  }
  if (grid.scales.back() != s_hi) grid.scales.push_back(s_hi);
  if (grid.size() < 4) {
    throw std::invalid_argument("series too short: fewer than 4 scales for " +
                                method.label());
  }
  return grid;
}

ScaleGrid make_scale_grid(std::vector<int> scales, int n, const Method& method) {
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
  ScaleGrid grid{std::move(scales)};
  validate_grid(grid, n, method);
  return grid;
}

namespace detail {

PolyBasis make_poly_basis(int scale, int order) {
  if (scale < order + 2) {
    throw std::invalid_argument("segment of length " + std::to_string(scale) +
                                " cannot determine an order-" + std::to_string(order) +
                                " fit");
  }
  PolyBasis basis;
  basis.scale = scale;
  basis.order = order;
  basis.phi.assign(static_cast<std::size_t>(order + 1) * scale, 0.0);
  const double half = (scale - 1) / 2.0;
  std::vector<double> t(scale);
  for (int j = 0; j < scale; ++j) t[j] = (j - half) / half;  // in [-1, 1]
  std::vector<double> v(scale);
  for (int k = 0; k <= order; ++k) {
    for (int j = 0; j < scale; ++j) v[j] = (k == 0) ? 1.0 : std::pow(t[j], k);
    double* phik = basis.phi.data() + static_cast<std::size_t>(k) * scale;
    std::copy(v.begin(), v.end(), phik);
    // modified Gram-Schmidt, applied twice for stability
    for (int pass = 0; pass < 2; ++pass) {
      for (int m = 0; m < k; ++m) {
        const double* phim = basis.row(m);
        double dot = 0.0;
        for (int j = 0; j < scale; ++j) dot += phik[j] * phim[j];
        for (int j = 0; j < scale; ++j) phik[j] -= dot * phim[j];
      }
    }
    double norm = 0.0;
    for (int j = 0; j < scale; ++j) norm += phik[j] * phik[j];
    norm = std::sqrt(norm);
    if (norm == 0.0) throw std::domain_error("degenerate polynomial basis");
    for (int j = 0; j < scale; ++j) phik[j] /= norm;
  }
  return basis;
}

double fa_ms(std::span<const double> profile, int s) {
  const int n = static_cast<int>(profile.size());
  const int n_seg = n / s;
  double acc = 0.0;
  double prev = 0.0;  // X(0) == 0
  for (int seg = 1; seg <= n_seg; ++seg) {
    const double cur = profile[static_cast<std::size_t>(seg) * s - 1];
    const double d = prev - cur;
    acc += d * d;
    prev = cur;
  }
  return acc / n_seg;
}

// Classical rescaled range: within each segment, R is the range of the
// segment-local profile (cumulative sum of the mean-removed values) and S is
// the population standard deviation of the segment values themselves.
double rs_ms(std::span<const double> series, int s, int* degenerate_segment) {
  const int n = static_cast<int>(series.size());
  const int n_seg = n / s;
  if (degenerate_segment) *degenerate_segment = -1;
  double acc = 0.0;
  for (int seg = 0; seg < n_seg; ++seg) {
    const double* x = series.data() + static_cast<std::size_t>(seg) * s;
    long double sum = 0.0L;
    for (int j = 0; j < s; ++j) sum += x[j];
    const double mean = static_cast<double>(sum / s);
    long double cum = 0.0L;
    long double ssq = 0.0L;
    double lo = 0.0, hi = 0.0;
    for (int j = 0; j < s; ++j) {
      const double d = x[j] - mean;
      ssq += static_cast<long double>(d) * d;
      cum += d;
      const double w = static_cast<double>(cum);
      if (j == 0) {
        lo = hi = w;
      } else {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
    }
    const double sd = std::sqrt(static_cast<double>(ssq / s));
    if (sd == 0.0) {
      if (degenerate_segment) *degenerate_segment = seg;
      return std::numeric_limits<double>::quiet_NaN();
    }
    acc += (hi - lo) / sd;
  }
  const double mean_ratio = acc / n_seg;
  return mean_ratio * mean_ratio;
}

double dfa_ms(std::span<const double> profile, const PolyBasis& basis) {
  const int n = static_cast<int>(profile.size());
  const int s = basis.scale;
  const int n_seg = n / s;
  const int n_coef = basis.order + 1;
  double coef[16];
  double acc = 0.0;
  for (int seg = 0; seg < n_seg; ++seg) {
    const double* x = profile.data() + static_cast<std::size_t>(seg) * s;
    for (int k = 0; k < n_coef; ++k) {
      const double* phik = basis.row(k);
      double dot = 0.0;
      for (int j = 0; j < s; ++j) dot += x[j] * phik[j];
      coef[k] = dot;
    }
    for (int j = 0; j < s; ++j) {
      double fit = 0.0;
      for (int k = 0; k < n_coef; ++k) fit += coef[k] * basis.row(k)[j];
      const double r = x[j] - fit;
      acc += r * r;
    }
  }
  return acc / (static_cast<double>(n_seg) * s);
}

double mdfa_ms(std::span<const double> profile, const PolyBasis& basis) {
  const int n = static_cast<int>(profile.size());
  const int s = basis.scale;
  const int half = s / 2;
  const int n_seg = n / s;
  const int n_coef = basis.order + 1;
  static thread_local std::vector<double> resid;
  resid.resize(s);
  double coef[16];
  double acc = 0.0;
  for (int seg = 0; seg < n_seg; ++seg) {
    const double* x = profile.data() + static_cast<std::size_t>(seg) * s;
    for (int k = 0; k < n_coef; ++k) {
      const double* phik = basis.row(k);
      double dot = 0.0;
      for (int j = 0; j < s; ++j) dot += x[j] * phik[j];
      coef[k] = dot;
    }
    for (int j = 0; j < s; ++j) {
      double fit = 0.0;
      for (int k = 0; k < n_coef; ++k) fit += coef[k] * basis.row(k)[j];
      resid[j] = x[j] - fit;
    }
    for (int j = 0; j + half < s; ++j) {
      const double d = resid[j + half] - resid[j];
      acc += d * d;
    }
  }
  return acc / (static_cast<double>(n_seg) * half);
}

double cma_ms(std::span<const double> profile, int s) {
  const int n = static_cast<int>(profile.size());
  const int h = (s - 1) / 2;
  long double window = 0.0L;
  for (int j = 0; j < s; ++j) window += profile[j];
  double acc = 0.0;
  for (int c = h; c + h < n; ++c) {
    const double r = profile[c] - static_cast<double>(window / s);
    acc += r * r;
    if (c + h + 1 < n) window += profile[c + h + 1] - profile[c - h];
  }
  return acc / (n - s + 1);
}

double bma_ms(std::span<const double> profile, int s) {
  const int n = static_cast<int>(profile.size());
  long double window = 0.0L;
  for (int j = 0; j < s; ++j) window += profile[j];
  double acc = 0.0;
  for (int i = s - 1; i < n; ++i) {
    const double r = profile[i] - static_cast<double>(window / s);
    acc += r * r;
    if (i + 1 < n) window += profile[i + 1] - profile[i - s + 1];
  }
  return acc / (n - s + 1);
}

}  // namespace detail

namespace {

void check_segments(int n, int s, const char* method) {
  if (s < 1) throw std::invalid_argument("scale must be positive");
  if (n / s < 2) {
    throw std::invalid_argument(std::string(method) + ": fewer than 2 segments at scale " +
                                std::to_string(s));
  }
}

}  // namespace

double fa(const Profile& profile, int s) {
  check_segments(profile.size(), s, "fa");
  return std::sqrt(detail::fa_ms(profile.values, s));
}

double rs(const Series& series, int s) {
  validate_series(series);
  if (s < 2) throw std::invalid_argument("rs: scale must be >= 2");
  check_segments(series.size(), s, "rs");
  int degenerate = -1;
  const double ms = detail::rs_ms(series.values, s, &degenerate);
  if (degenerate >= 0) {
    throw std::domain_error("rs: zero dispersion in segment " + std::to_string(degenerate) +
                            " at scale " + std::to_string(s));
  }
  return std::sqrt(ms);
}

double dfa(const Profile& profile, int s, int order) {
  if (order < 1) throw std::invalid_argument("dfa: order must be >= 1");
  if (order > 14) throw std::invalid_argument("dfa: order too large");
  if (s < order + 2) {
    throw std::invalid_argument("dfa: scale " + std::to_string(s) +
                                " underdetermines an order-" + std::to_string(order) +
                                " fit");
  }
  check_segments(profile.size(), s, "dfa");
  return std::sqrt(detail::dfa_ms(profile.values, detail::make_poly_basis(s, order)));
}

double bma(const Profile& profile, int s) {
  if (s < 2) throw std::invalid_argument("bma: scale must be >= 2");
  if (s > profile.size()) throw std::invalid_argument("bma: scale exceeds length");
  return std::sqrt(detail::bma_ms(profile.values, s));
}

double cma(const Profile& profile, int s) {
  if (s % 2 == 0) throw std::invalid_argument("cma: scale must be odd");
  if (s < 3) throw std::invalid_argument("cma: scale must be >= 3");
  if (s > profile.size()) throw std::invalid_argument("cma: scale exceeds length");
  return std::sqrt(detail::cma_ms(profile.values, s));
}

double mdfa(const Profile& profile, int s, int order) {
  if (order < 1) throw std::invalid_argument("mdfa: order must be >= 1");
  if (order > 14) throw std::invalid_argument("mdfa: order too large");
  if (s % 2 != 0) throw std::invalid_argument("mdfa: scale must be even");
  if (s < std::max(order + 2, 4)) {
    throw std::invalid_argument("mdfa: scale " + std::to_string(s) + " too small");
  }
  check_segments(profile.size(), s, "mdfa");
  return std::sqrt(detail::mdfa_ms(profile.values, detail::make_poly_basis(s, order)));
}

namespace {

struct CurveWorkspace {
  std::map<int, detail::PolyBasis> bases;  // keyed by scale; shared read-only
};

CurveWorkspace prepare_workspace(const Method& method, const ScaleGrid& grid) {
  CurveWorkspace ws;
  if (method.has_order()) {
    for (int s : grid.scales) ws.bases.emplace(s, detail::make_poly_basis(s, method.order));
  }
  return ws;
}

// Squared per-series statistic at one scale; never throws (degenerate R/S
// segments surface as NaN and are reported after the parallel region).
double cell_ms(const Method& method, const Series& series, const Profile& profile,
               int s, const CurveWorkspace& ws, int* degenerate) {
  switch (method.kind) {
    case MethodKind::FA:
      return detail::fa_ms(profile.values, s);
    case MethodKind::RS:
      return detail::rs_ms(series.values, s, degenerate);
    case MethodKind::DFA:
      return detail::dfa_ms(profile.values, ws.bases.at(s));
    case MethodKind::BMA:
      return detail::bma_ms(profile.values, s);
    case MethodKind::CMA:
      return detail::cma_ms(profile.values, s);
    case MethodKind::MDFA:
      return detail::mdfa_ms(profile.values, ws.bases.at(s));
  }
  return 0.0;
}

FluctuationCurve reduce_curve(const Method& method, const ScaleGrid& grid,
                              const std::vector<std::vector<double>>& ms, int n,
                              int n_series) {
  FluctuationCurve curve;
  curve.method = method;
  curve.grid = grid;
  curve.ensemble_size = n_series;
  curve.series_length = n;
  curve.f.resize(grid.scales.size());
  for (std::size_t j = 0; j < grid.scales.size(); ++j) {
    double sum = 0.0;
    for (int i = 0; i < n_series; ++i) {  // fixed member order
      const double v = ms[static_cast<std::size_t>(i)][j];
      if (std::isnan(v)) {
        throw std::domain_error(method.label() + ": degenerate segment in member " +
                                std::to_string(i) + " at scale " +
                                std::to_string(grid.scales[j]));
      }
      sum += v;
    }
    curve.f[j] = std::sqrt(sum / n_series);
  }
  return curve;
}

}  // namespace

FluctuationCurve fluctuation_curve(std::span<const Series> ensemble,
                                   const Method& method, const ScaleGrid& grid) {
  if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
  const int n = ensemble.front().size();
  for (const Series& s : ensemble) {
    validate_series(s);
    if (s.size() != n) throw std::invalid_argument("ensemble members differ in length");
  }
  validate_grid(grid, n, method);
  const CurveWorkspace ws = prepare_workspace(method, grid);
  const int n_series = static_cast<int>(ensemble.size());
  const int n_scales = grid.size();

  std::vector<Profile> profiles(ensemble.size());
  const bool needs_profile = method.kind != MethodKind::RS;
  if (needs_profile) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_series; ++i) profiles[i] = compute_profile(ensemble[i]);
  }

  std::vector<std::vector<double>> ms(ensemble.size(),
                                      std::vector<double>(grid.scales.size()));
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (int i = 0; i < n_series; ++i) {
    for (int j = 0; j < n_scales; ++j) {
      int degenerate = -1;
      ms[i][j] = cell_ms(method, ensemble[i], profiles[i], grid.scales[j], ws,
                         &degenerate);
    }
  }
  return reduce_curve(method, grid, ms, n, n_series);
}

FluctuationCurve fluctuation_curve(const Series& series, const Method& method,
                                   const ScaleGrid& grid) {
  return fluctuation_curve(std::span<const Series>(&series, 1), method, grid);
}

std::vector<FluctuationCurve> ensemble_curves(
    int n_series, const std::function<Series(int)>& make_member,
    std::span<const Method> methods, std::span<const ScaleGrid> grids) {
  if (n_series < 1) throw std::invalid_argument("ensemble needs at least one member");
  if (methods.size() != grids.size()) {
    throw std::invalid_argument("one grid per method required");
  }
  const std::size_t n_methods = methods.size();
  std::vector<CurveWorkspace> workspaces(n_methods);
  for (std::size_t m = 0; m < n_methods; ++m) {
    workspaces[m] = prepare_workspace(methods[m], grids[m]);
  }
  std::vector<std::vector<std::vector<double>>> ms(n_methods);
  for (std::size_t m = 0; m < n_methods; ++m) {
    ms[m].assign(n_series, std::vector<double>(grids[m].scales.size()));
  }
  std::vector<int> lengths(n_series, 0);
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_series; ++i) {
    try {
      const Series member = make_member(i);
      const Profile profile = compute_profile(member);
      lengths[i] = member.size();
      for (std::size_t m = 0; m < n_methods; ++m) {
        validate_grid(grids[m], member.size(), methods[m]);
      }
      for (std::size_t m = 0; m < n_methods; ++m) {
        for (std::size_t j = 0; j < grids[m].scales.size(); ++j) {
          int degenerate = -1;
          ms[m][static_cast<std::size_t>(i)][j] =
              cell_ms(methods[m], member, profile, grids[m].scales[j], workspaces[m],
                      &degenerate);
        }
      }
    } catch (const std::exception& e) {
#pragma omp critical(fluctana_ensemble_err)
      {
        if (error.empty()) error = e.what();
      }
    }
  }
  if (!error.empty()) throw std::runtime_error("ensemble member failed: " + error);
  const int series_length = lengths.front();
  for (int len : lengths) {
    if (len != series_length) {
      throw std::invalid_argument("ensemble members differ in length");
    }
  }
  std::vector<FluctuationCurve> curves;
  curves.reserve(n_methods);
  for (std::size_t m = 0; m < n_methods; ++m) {
    validate_grid(grids[m], series_length, methods[m]);
    curves.push_back(reduce_curve(methods[m], grids[m], ms[m], series_length, n_series));
  }
  return curves;
}

}  // namespace fluctana
