#include "fluctana/series.hpp"

#include <cmath>
#include <stdexcept>

namespace fluctana {

void validate_series(const Series& series) {
  if (series.values.empty()) {
    throw std::invalid_argument("series is empty");
  }
  for (double v : series.values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("series contains a non-finite value");
    }
  }
}

SeriesStats series_stats(const Series& series) {
  validate_series(series);
  const auto& x = series.values;
  const double n = static_cast<double>(x.size());
  long double sum = 0.0L;
  for (double v : x) sum += v;
  const double mean = static_cast<double>(sum / n);
  long double ssq = 0.0L;
  for (double v : x) {
    const long double d = v - mean;
    ssq += d * d;
  }
  return {mean, std::sqrt(static_cast<double>(ssq / n))};
}

Profile compute_profile(const Series& series) {
  validate_series(series);
  const auto& x = series.values;
  const double mean = series_stats(series).mean;
  Profile profile;
  profile.source_mean = mean;
  profile.values.resize(x.size());
  long double acc = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i] - mean;
    profile.values[i] = static_cast<double>(acc);
  }
  return profile;
}

double autocorrelation(const Series& series, int lag) {
  validate_series(series);
  const auto& x = series.values;
  const int n = series.size();
  if (lag < 0 || lag >= n) {
    throw std::out_of_range("autocorrelation lag must satisfy 0 <= lag < N");
  }
  const SeriesStats stats = series_stats(series);
  const double msq = stats.sd * stats.sd;
  if (msq == 0.0) {
    throw std::domain_error("autocorrelation undefined for a zero-variance series");
  }
  if (lag == 0) return 1.0;  // normalization identity
  long double num = 0.0L;
  for (int i = 0; i + lag < n; ++i) {
    num += (x[i] - stats.mean) * (x[i + lag] - stats.mean);
  }
  return static_cast<double>(num / ((n - lag) * static_cast<long double>(msq)));
}

}  // namespace fluctana
