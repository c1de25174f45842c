#include "fluctana/scaling.hpp"

#include <cmath>
#include <stdexcept>

namespace fluctana {

namespace {

struct LogPoints {
  std::vector<double> ls;  // ln s
  std::vector<double> lf;  // ln F
};

LogPoints collect_log_points(const FluctuationCurve& curve, double s_lo, double s_hi) {
  if (curve.f.size() != curve.grid.scales.size()) {
    throw std::invalid_argument("curve scales and values differ in length");
  }
  LogPoints pts;
  for (std::size_t j = 0; j < curve.grid.scales.size(); ++j) {
    const double s = curve.grid.scales[j];
    if (s < s_lo || s > s_hi) continue;
    const double f = curve.f[j];
    if (!(f > 0.0)) {
      throw std::domain_error("nonpositive fluctuation value at scale " +
                              std::to_string(curve.grid.scales[j]));
    }
    pts.ls.push_back(std::log(s));
    pts.lf.push_back(std::log(f));
  }
  return pts;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sse = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("degenerate abscissa in line fit");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.sse += r * r;
  }
  return fit;
}

// Continuous broken line with shared ordinate at the breakpoint xb:
// y = a + b1*(x - xb) left of xb, y = a + b2*(x - xb) right of it.
struct BrokenFit {
  double a = 0.0, b1 = 0.0, b2 = 0.0;
  double sse = 0.0;
};

BrokenFit fit_broken_line(const std::vector<double>& x, const std::vector<double>& y,
                          double xb) {
  const std::size_t n = x.size();
  // normal equations for (a, b1, b2)
  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double rhs[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - xb;
    const double u = (x[i] <= xb) ? d : 0.0;
    const double v = (x[i] > xb) ? d : 0.0;
    const double row[3] = {1.0, u, v};
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) m[p][q] += row[p] * row[q];
      rhs[p] += row[p] * y[i];
    }
  }
  // Gaussian elimination with partial pivoting
  int idx[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(m[idx[r]][col]) > std::fabs(m[idx[piv]][col])) piv = r;
    }
    std::swap(idx[col], idx[piv]);
    const double diag = m[idx[col]][col];
    if (diag == 0.0) throw std::domain_error("singular broken-line system");
    for (int r = col + 1; r < 3; ++r) {
      const double factor = m[idx[r]][col] / diag;
      for (int q = col; q < 3; ++q) m[idx[r]][q] -= factor * m[idx[col]][q];
      rhs[idx[r]] -= factor * rhs[idx[col]];
    }
  }
  double sol[3];
  for (int col = 2; col >= 0; --col) {
    double v = rhs[idx[col]];
    for (int q = col + 1; q < 3; ++q) v -= m[idx[col]][q] * sol[q];
    sol[col] = v / m[idx[col]][col];
  }
  BrokenFit fit;
  fit.a = sol[0];
  fit.b1 = sol[1];
  fit.b2 = sol[2];
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - xb;
    const double pred = fit.a + ((x[i] <= xb) ? fit.b1 : fit.b2) * d;
    const double r = y[i] - pred;
    fit.sse += r * r;
  }
  return fit;
}

}  // namespace

AlphaEstimate fit_alpha(const FluctuationCurve& curve, double s_lo, double s_hi) {
  if (!(s_lo < s_hi)) throw std::invalid_argument("fit range must have s_lo < s_hi");
  const LogPoints pts = collect_log_points(curve, s_lo, s_hi);
  if (pts.ls.size() < 3) {
    throw std::invalid_argument("fewer than 3 grid points in fit range [" +
                                std::to_string(s_lo) + ", " + std::to_string(s_hi) + "]");
  }
  const LineFit fit = fit_line(pts.ls, pts.lf);
  AlphaEstimate est;
  est.alpha = fit.slope;
  est.intercept = fit.intercept;
  est.s_lo = s_lo;
  est.s_hi = s_hi;
  est.residual_rms = std::sqrt(fit.sse / static_cast<double>(pts.ls.size()));
  est.n_points = static_cast<int>(pts.ls.size());
  return est;
}

std::pair<double, double> fixed_width_range(int n) {
  if (n < 60) {
    throw std::invalid_argument("fixed-width range needs N >= 60, got " +
                                std::to_string(n));
  }
  return {n / 20.0, n / 2.0};
}

std::vector<std::pair<double, double>> local_slopes(const FluctuationCurve& curve) {
  if (curve.grid.size() < 2) {
    throw std::invalid_argument("local slopes need at least 2 grid points");
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(curve.grid.scales.size() - 1);
  for (std::size_t j = 0; j + 1 < curve.grid.scales.size(); ++j) {
    const double s0 = curve.grid.scales[j];
    const double s1 = curve.grid.scales[j + 1];
    if (s1 <= s0) throw std::invalid_argument("duplicate or non-increasing scales");
    const double f0 = curve.f[j];
    const double f1 = curve.f[j + 1];
    if (!(f0 > 0.0) || !(f1 > 0.0)) {
      throw std::domain_error("nonpositive fluctuation value in local slope");
    }
    const double slope = (std::log(f1) - std::log(f0)) / (std::log(s1) - std::log(s0));
    out.emplace_back(std::sqrt(s0 * s1), slope);
  }
  return out;
}

CrossoverEstimate detect_crossover(const FluctuationCurve& curve, double search_lo,
                                   double search_hi, double min_sse_improvement,
                                   double min_slope_separation) {
  const LogPoints pts = collect_log_points(curve, search_lo, search_hi);
  const int m = static_cast<int>(pts.ls.size());
  if (m < 6) {
    throw std::invalid_argument("crossover search needs >= 6 grid points in window");
  }
  const LineFit single = fit_line(pts.ls, pts.lf);

  CrossoverEstimate est;
  est.method = curve.method;
  est.single_alpha = single.slope;

  double best_sse = -1.0;
  double best_xb = 0.0;
  int best_i = -1;
  BrokenFit best_fit;
  // interior breakpoints: at least 3 points on the left piece (including the
  // breakpoint) and 2 strictly to the right
  for (int i = 2; i <= m - 3; ++i) {
    const double xb = pts.ls[i];
    const BrokenFit fit = fit_broken_line(pts.ls, pts.lf, xb);
    if (best_sse < 0.0 || fit.sse < best_sse) {
      best_sse = fit.sse;
      best_xb = xb;
      best_i = i;
      best_fit = fit;
    }
  }
  // refine the vertex between the neighbouring grid points (golden-section
  // on the continuous breakpoint; SSE is smooth in xb between grid points)
  {
    double lo = pts.ls[best_i - 1];
    double hi = pts.ls[best_i + 1];
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = fit_broken_line(pts.ls, pts.lf, x1).sse;
    double f2 = fit_broken_line(pts.ls, pts.lf, x2).sse;
    for (int it = 0; it < 40 && (hi - lo) > 1e-10; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvPhi * (hi - lo);
        f1 = fit_broken_line(pts.ls, pts.lf, x1).sse;
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvPhi * (hi - lo);
        f2 = fit_broken_line(pts.ls, pts.lf, x2).sse;
      }
    }
    const double xb = 0.5 * (lo + hi);
    const BrokenFit fit = fit_broken_line(pts.ls, pts.lf, xb);
    if (fit.sse < best_sse) {
      best_sse = fit.sse;
      best_xb = xb;
      best_fit = fit;
    }
  }
  const double improvement =
      (single.sse > 0.0) ? (single.sse - best_sse) / single.sse : 0.0;
  est.sse_improvement = improvement;
  est.s_observed = std::exp(best_xb);
  est.alpha_below = best_fit.b1;
  est.alpha_above = best_fit.b2;
  if (improvement < min_sse_improvement ||
      std::fabs(best_fit.b2 - best_fit.b1) < min_slope_separation) {
    est.found = false;
    est.s_corrected = est.s_observed;
    return est;
  }
  est.found = true;
  est.s_corrected = has_crossover_correction(curve.method)
                        ? correct_crossover(est.s_observed, curve.method)
                        : est.s_observed;
  return est;
}

bool has_crossover_correction(const Method& method) {
  return (method.kind == MethodKind::DFA && method.order == 1) ||
         method.kind == MethodKind::CMA ||
         (method.kind == MethodKind::MDFA && method.order == 1);
}

double correct_crossover(double s_observed, const Method& method) {
  if (!(s_observed > 0.0)) {
    throw std::invalid_argument("observed crossover must be positive");
  }
  if (!has_crossover_correction(method)) {
    throw std::invalid_argument("no crossover correction for " + method.label());
  }
  const double ls = std::log(s_observed);
  double corrected = 0.0;
  if (method.kind == MethodKind::DFA) {
    corrected = ls - 0.25;
  } else if (method.kind == MethodKind::CMA) {
    corrected = 1.05 * ls - 0.47;
  } else {
    corrected = 1.04 * ls - 0.19;
  }
  return std::exp(corrected);
}

GammaBeta exponent_relations(double alpha) {
  GammaBeta out;
  out.gamma = 2.0 * (1.0 - alpha);
  out.beta = 2.0 * alpha - 1.0;
  out.gamma_in_domain = alpha > 0.5 && alpha < 1.0;
  return out;
}

}  // namespace fluctana
