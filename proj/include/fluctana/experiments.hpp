#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fluctana/scaling.hpp"

namespace fluctana {

// Histogram convention: fixed 0.05-wide bins over [0, 1.5); exponents
// outside are clamped to the boundary bins.
inline constexpr double kHistogramLo = 0.0;
inline constexpr double kHistogramHi = 1.5;
inline constexpr double kHistogramBinWidth = 0.05;

struct EnsembleStats {
  int series_length = 0;
  Method method;
  double mean_alpha = 0.0;
  double sd_alpha = 0.0;  // population convention
  std::vector<std::pair<double, double>> histogram;  // (bin center, normalized count)
  int n_series = 0;
  int n_failures = 0;
};

// Raw per-member exponents for one (N, method) cell; members whose fit
// failed hold NaN so pairing across methods stays aligned.
struct AlphaEnsemble {
  int series_length = 0;
  Method method;
  std::vector<double> alphas;
  int n_failures = 0;
};

struct AlphaStudyResult {
  std::vector<EnsembleStats> stats;  // one per (length, method), lengths outermost
  std::vector<AlphaEnsemble> raw;    // same ordering
};

// For each length: generate n_series surrogates with the target exponent and
// fit every method per member over the fixed-lower-limit range [10, N/2]
// (clamped to the available grid). Aborts if more than 10% of fits fail.
AlphaStudyResult alpha_vs_length_study(double target_alpha, std::span<const int> lengths,
                                       int n_series, std::span<const Method> methods,
                                       std::uint64_t seed);

struct ScatterStats {
  double sd1 = 0.0;  // dispersion perpendicular to the identity line
  double sd2 = 0.0;  // dispersion parallel to it
  std::vector<std::pair<double, double>> pairs;
};

ScatterStats scatter_sd(std::span<const double> alpha_ref,
                        std::span<const double> alpha_other);

struct CrossoverCalibration {
  struct Cell {
    int s_cross = 0;
    Method method;
    CrossoverEstimate estimate;  // estimate.found == false flags an undetected cell
  };
  struct Fit {
    Method method;
    double slope = 0.0;      // ln s_cross ~ slope * ln s_observed + intercept
    double intercept = 0.0;
    int n_cells = 0;
  };
  std::vector<Cell> cells;
  std::vector<Fit> fits;
};

// For each real crossover scale: build the ensemble-averaged curve per
// method, locate the observed crossover, then regress ln s_cross on
// ln s_observed per method over the detected cells.
CrossoverCalibration crossover_calibration_study(double alpha_short, double alpha_long,
                                                 std::span<const int> s_cross_list, int n,
                                                 int n_series,
                                                 std::span<const Method> methods,
                                                 std::uint64_t seed);

struct TrendCrossoverStudy {
  struct Cell {
    double amplitude = 0.0;
    Method method;
    CrossoverEstimate estimate;
  };
  struct Fit {
    Method method;
    double delta = 0.0;  // s_observed ~ amplitude^-delta
    int n_cells = 0;
  };
  std::vector<Cell> cells;
  std::vector<Fit> fits;
};

// Unit-variance surrogates plus the trend A*(i/N)^q; the trend-induced
// crossover is located per amplitude and method and delta is fitted from
// ln s_observed vs ln A.
TrendCrossoverStudy trend_crossover_study(double alpha, double trend_exponent,
                                          std::span<const double> amplitudes, int n,
                                          int n_series, std::span<const Method> methods,
                                          std::uint64_t seed);

// Default crossover search window used by the studies.
std::pair<double, double> default_search_window(int n);

}  // namespace fluctana
