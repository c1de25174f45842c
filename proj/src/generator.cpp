#include "fluctana/generator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fluctana/fft.hpp"

namespace fluctana {

double GaussianRng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t GaussianRng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng_();
  } while (v >= limit);
  return v % n;
}

namespace {

void check_alpha(double alpha, const char* what) {
  if (!(alpha > kMinAlpha && alpha < kMaxAlpha)) {
    throw std::invalid_argument(std::string(what) +
                                " must lie in (0, 1.5)");
  }
}

void normalize_in_place(std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  long double sum = 0.0L;
  for (double v : x) sum += v;
  const double mean = static_cast<double>(sum / n);
  long double ssq = 0.0L;
  for (double v : x) {
    const long double d = v - mean;
    ssq += d * d;
  }
  const double sd = std::sqrt(static_cast<double>(ssq / n));
  if (sd == 0.0) throw std::domain_error("cannot normalize a constant series");
  for (double& v : x) v = (v - mean) / sd;
}

// Shared spectral-shaping pass: amplitude at frequency index k is scaled by
// factor(f_k) with f_k = min(k, n-k)/n; the zero-frequency bin is removed.
template <typename FactorFn>
Series spectral_surrogate(int length, std::uint64_t seed, bool normalize,
                          FactorFn&& factor) {
  if (length < 2) throw std::invalid_argument("generator length must be >= 2");
  const std::size_t n2 = std::bit_ceil(static_cast<std::size_t>(length));
  GaussianRng rng(seed);
  std::vector<std::complex<double>> spectrum(n2);
  for (auto& c : spectrum) c = {rng.gaussian(), 0.0};
  fft_inplace(spectrum, false);
  spectrum[0] = 0.0;  // enforce zero mean before normalization
  for (std::size_t k = 1; k < n2; ++k) {
    const std::size_t kk = std::min(k, n2 - k);
    const double f = static_cast<double>(kk) / static_cast<double>(n2);
    spectrum[k] *= factor(f);
  }
  fft_inplace(spectrum, true);
  Series out;
  out.values.resize(length);
  for (int i = 0; i < length; ++i) out.values[i] = spectrum[i].real();
  if (normalize) normalize_in_place(out.values);
  return out;
}

}  // namespace

Series generate_power_law(const GeneratorSpec& spec) {
  check_alpha(spec.alpha, "alpha");
  const double beta = 2.0 * spec.alpha - 1.0;
  return spectral_surrogate(spec.length, spec.seed, spec.normalize,
                            [beta](double f) { return std::pow(f, -beta / 2.0); });
}

Series generate_crossover(const CrossoverSpec& spec) {
  check_alpha(spec.alpha_short, "alpha_short");
  check_alpha(spec.alpha_long, "alpha_long");
  if (spec.s_cross <= 1 || spec.s_cross >= spec.length) {
    throw std::invalid_argument("s_cross must satisfy 1 < s_cross < N");
  }
  const double beta_short = 2.0 * spec.alpha_short - 1.0;
  const double beta_long = 2.0 * spec.alpha_long - 1.0;
  const std::size_t n2 = std::bit_ceil(static_cast<std::size_t>(spec.length));
  // crossover frequency mapped to the nearest grid frequency
  const double kx_real = static_cast<double>(n2) / static_cast<double>(spec.s_cross);
  const std::size_t kx = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(kx_real)), 1, n2 / 2);
  const double fx = static_cast<double>(kx) / static_cast<double>(n2);
  // Power spectrum gets (f/f_x)^-beta, so amplitudes get the square root.
  // Both branches evaluate to 1 at f = f_x, keeping the spectrum continuous.
  return spectral_surrogate(
      spec.length, spec.seed, spec.normalize, [=](double f) {
        const double beta = (f < fx) ? beta_long : beta_short;
        return std::pow(f / fx, -beta / 2.0);
      });
}

Series add_trend(const Series& series, const TrendSpec& trend) {
  validate_series(series);
  if (trend.exponent < 0.0) {
    throw std::invalid_argument("trend exponent must be >= 0");
  }
  const int n = series.size();
  Series out = series;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1) / static_cast<double>(n);
    out.values[i] += trend.amplitude * std::pow(t, trend.exponent);
  }
  return out;
}

Series shuffle_boxes(const Series& series, int box, std::uint64_t seed) {
  validate_series(series);
  const int n = series.size();
  if (box < 1 || box > n) {
    throw std::invalid_argument("box length must satisfy 1 <= box <= N");
  }
  const int n_boxes = n / box;
  std::vector<int> order(n_boxes);
  for (int i = 0; i < n_boxes; ++i) order[i] = i;
  GaussianRng rng(seed);
  for (int i = n_boxes - 1; i > 0; --i) {  // Fisher-Yates
    const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  Series out;
  out.label = series.label;
  out.values.reserve(series.values.size());
  for (int b : order) {
    const auto first = series.values.begin() + static_cast<std::ptrdiff_t>(b) * box;
    out.values.insert(out.values.end(), first, first + box);
  }
  // remainder stays in place
  out.values.insert(out.values.end(),
                    series.values.begin() + static_cast<std::ptrdiff_t>(n_boxes) * box,
                    series.values.end());
  return out;
}

Series downsample(const Series& series, int factor) {
  validate_series(series);
  const int n = series.size();
  if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
  if (factor > n) {
    throw std::invalid_argument("downsample factor exceeds series length");
  }
  Series out;
  out.label = series.label;
  out.values.reserve(static_cast<std::size_t>(n / factor));
  for (int i = factor - 1; i < n; i += factor) out.values.push_back(series.values[i]);
  return out;
}

}  // namespace fluctana
