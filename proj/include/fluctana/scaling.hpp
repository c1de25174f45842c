#pragma once

#include <utility>
#include <vector>

#include "fluctana/methods.hpp"

namespace fluctana {

struct AlphaEstimate {
  double alpha = 0.0;
  double intercept = 0.0;  // ln F at ln s = 0
  double s_lo = 0.0;
  double s_hi = 0.0;
  double residual_rms = 0.0;  // in ln-F units
  int n_points = 0;
};

struct GammaBeta {
  double gamma = 0.0;  // autocorrelation decay exponent, meaningful for 0.5 < alpha < 1
  double beta = 0.0;   // power-spectrum exponent
  bool gamma_in_domain = false;
};

struct CrossoverEstimate {
  bool found = false;
  double s_observed = 0.0;
  double alpha_below = 0.0;
  double alpha_above = 0.0;
  double s_corrected = 0.0;
  double single_alpha = 0.0;     // slope of the one-segment fit over the window
  double sse_improvement = 0.0;  // relative SSE reduction of the broken-line model
  Method method;
};

// Ordinary least squares through (ln s, ln F) for grid points inside
// [s_lo, s_hi]. Needs >= 3 points and positive F.
AlphaEstimate fit_alpha(const FluctuationCurve& curve, double s_lo, double s_hi);

// Moving fitting regime (N/20, N/2); requires N >= 60.
std::pair<double, double> fixed_width_range(int n);

// Point-to-point log-log derivative, reported at the geometric midpoint of
// each consecutive scale pair.
std::vector<std::pair<double, double>> local_slopes(const FluctuationCurve& curve);

// Grid search over interior breakpoints of a continuous broken line in
// (ln s, ln F); the winning vertex is then refined continuously between its
// neighbouring grid points. Reports found=false when the best broken fit
// improves on the single line by less than min_sse_improvement (relative
// SSE), or when the two fitted slopes differ by less than
// min_slope_separation (an ensemble-averaged curve is smooth enough that the
// SSE test alone flags meaningless sub-0.01 slope changes).
CrossoverEstimate detect_crossover(const FluctuationCurve& curve, double search_lo,
                                   double search_hi, double min_sse_improvement = 0.05,
                                   double min_slope_separation = 0.1);

// Affine ln-space corrections for the systematic crossover displacement of
// DFA1, CMA and MDFA1.
double correct_crossover(double s_observed, const Method& method);
bool has_crossover_correction(const Method& method);

// gamma = 2(1-alpha), beta = 2*alpha - 1; gamma flagged in-domain only for
// 0.5 < alpha < 1.
GammaBeta exponent_relations(double alpha);

}  // namespace fluctana
