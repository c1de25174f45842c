#pragma once

#include <string>
#include <vector>

namespace fluctana {

// A finite, equidistant real-valued record.
struct Series {
  std::vector<double> values;
  std::string label;

  int size() const { return static_cast<int>(values.size()); }
};

// Cumulative sum of the mean-removed series, X(1..N) stored 0-based.
// For profiles produced by compute_profile, X(N) == 0 up to rounding.
struct Profile {
  std::vector<double> values;
  double source_mean = 0.0;

  int size() const { return static_cast<int>(values.size()); }
};

struct SeriesStats {
  double mean = 0.0;
  double sd = 0.0;  // population convention (divide by N)
};

// Throws std::invalid_argument if the series is empty or contains
// non-finite values.
void validate_series(const Series& series);

Profile compute_profile(const Series& series);

SeriesStats series_stats(const Series& series);

// Autocorrelation C(lag) normalized by 1/((N-lag) * <x~^2>) with the
// global mean. C(0) == 1 exactly. Exposed for diagnostics; no attempt is
// made to fit a correlation exponent from it.
double autocorrelation(const Series& series, int lag);

}  // namespace fluctana
