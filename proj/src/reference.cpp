#include "fluctana/reference.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fluctana::ref {

namespace {

// Least-squares polynomial fit on abscissa scaled to [-1, 1], solved through
// the normal equations in long double with partial pivoting; returns the
// fitted values. Independent of the orthonormal-basis route the library uses.
std::vector<double> polyfit_values(const double* y, int s, int order) {
  const int k = order + 1;
  std::vector<long double> t(s);
  const long double half = (s - 1) / 2.0L;
  for (int j = 0; j < s; ++j) t[j] = (j - half) / half;

  std::vector<std::vector<long double>> g(k, std::vector<long double>(k, 0.0L));
  std::vector<long double> rhs(k, 0.0L);
  std::vector<long double> powers(k);
  for (int j = 0; j < s; ++j) {
    powers[0] = 1.0L;
    for (int p = 1; p < k; ++p) powers[p] = powers[p - 1] * t[j];
    for (int p = 0; p < k; ++p) {
      for (int q = 0; q < k; ++q) g[p][q] += powers[p] * powers[q];
      rhs[p] += powers[p] * y[j];
    }
  }
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r) {
      if (std::fabs(static_cast<double>(g[r][col])) >
          std::fabs(static_cast<double>(g[piv][col]))) {
        piv = r;
      }
    }
    std::swap(g[col], g[piv]);
    std::swap(rhs[col], rhs[piv]);
    if (g[col][col] == 0.0L) throw std::domain_error("singular polynomial fit");
    for (int r = col + 1; r < k; ++r) {
      const long double factor = g[r][col] / g[col][col];
      for (int q = col; q < k; ++q) g[r][q] -= factor * g[col][q];
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<long double> coef(k);
  for (int col = k - 1; col >= 0; --col) {
    long double v = rhs[col];
    for (int q = col + 1; q < k; ++q) v -= g[col][q] * coef[q];
    coef[col] = v / g[col][col];
  }
  std::vector<double> fitted(s);
  for (int j = 0; j < s; ++j) {
    long double acc = 0.0L;
    long double tp = 1.0L;
    for (int p = 0; p < k; ++p) {
      acc += coef[p] * tp;
      tp *= t[j];
    }
    fitted[j] = static_cast<double>(acc);
  }
  return fitted;
}

}  // namespace

double autocorrelation(const Series& series, int lag) {
  const auto& x = series.values;
  const int n = static_cast<int>(x.size());
  if (lag < 0 || lag >= n) throw std::out_of_range("lag out of range");
  long double mean = 0.0L;
  for (double v : x) mean += v;
  mean /= n;
  long double msq = 0.0L;
  for (double v : x) msq += (v - mean) * (v - mean);
  msq /= n;
  if (msq == 0.0L) throw std::domain_error("zero variance");
  if (lag == 0) return 1.0;
  long double num = 0.0L;
  for (int i = 0; i + lag < n; ++i) num += (x[i] - mean) * (x[i + lag] - mean);
  return static_cast<double>(num / ((n - lag) * msq));
}

double fa(const Profile& profile, int s) {
  const auto& x = profile.values;
  const int n = static_cast<int>(x.size());
  const int n_seg = n / s;
  if (n_seg < 2) throw std::invalid_argument("fa: fewer than 2 segments");
  long double acc = 0.0L;
  for (int seg = 1; seg <= n_seg; ++seg) {
    const double left = (seg == 1) ? 0.0 : x[static_cast<std::size_t>(seg - 1) * s - 1];
    const double right = x[static_cast<std::size_t>(seg) * s - 1];
    acc += (left - right) * (left - right);
  }
  return std::sqrt(static_cast<double>(acc / n_seg));
}

double rs(const Series& series, int s) {
  const auto& x = series.values;
  const int n = static_cast<int>(x.size());
  const int n_seg = n / s;
  if (n_seg < 2) throw std::invalid_argument("rs: fewer than 2 segments");
  long double acc = 0.0L;
  for (int seg = 0; seg < n_seg; ++seg) {
    const double* v = x.data() + static_cast<std::size_t>(seg) * s;
    long double mean = 0.0L;
    for (int j = 0; j < s; ++j) mean += v[j];
    mean /= s;
    std::vector<long double> walk(s);
    long double cum = 0.0L;
    long double ssq = 0.0L;
    for (int j = 0; j < s; ++j) {
      ssq += (v[j] - mean) * (v[j] - mean);
      cum += v[j] - mean;
      walk[j] = cum;
    }
    long double lo = walk[0], hi = walk[0];
    for (int j = 0; j < s; ++j) {
      if (walk[j] < lo) lo = walk[j];
      if (walk[j] > hi) hi = walk[j];
    }
    const long double sd = std::sqrt(static_cast<long double>(ssq / s));
    if (sd == 0.0L) {
      throw std::domain_error("rs: zero dispersion in segment " + std::to_string(seg));
    }
    acc += (hi - lo) / sd;
  }
  return static_cast<double>(acc / n_seg);
}

double dfa(const Profile& profile, int s, int order) {
  const auto& x = profile.values;
  const int n = static_cast<int>(x.size());
  const int n_seg = n / s;
  if (n_seg < 2) throw std::invalid_argument("dfa: fewer than 2 segments");
  long double acc = 0.0L;
  for (int seg = 0; seg < n_seg; ++seg) {
    const double* y = x.data() + static_cast<std::size_t>(seg) * s;
    const std::vector<double> fitted = polyfit_values(y, s, order);
    for (int j = 0; j < s; ++j) {
      const long double r = y[j] - fitted[j];
      acc += r * r;
    }
  }
  return std::sqrt(static_cast<double>(acc / (static_cast<long double>(n_seg) * s)));
}

double bma(const Profile& profile, int s) {
  const auto& x = profile.values;
  const int n = static_cast<int>(x.size());
  if (s < 2 || s > n) throw std::invalid_argument("bma: bad scale");
  long double acc = 0.0L;
  for (int i = s - 1; i < n; ++i) {
    long double window = 0.0L;
    for (int j = 0; j < s; ++j) window += x[i - j];
    const long double r = x[i] - window / s;
    acc += r * r;
  }
  return std::sqrt(static_cast<double>(acc / (n - s + 1)));
}

double cma(const Profile& profile, int s) {
  const auto& x = profile.values;
  const int n = static_cast<int>(x.size());
  if (s % 2 == 0 || s < 3 || s > n) throw std::invalid_argument("cma: bad scale");
  const int h = (s - 1) / 2;
  long double acc = 0.0L;
  for (int c = h; c + h < n; ++c) {
    long double window = 0.0L;
    for (int j = -h; j <= h; ++j) window += x[c + j];
    const long double r = x[c] - window / s;
    acc += r * r;
  }
  return std::sqrt(static_cast<double>(acc / (n - s + 1)));
}

double mdfa(const Profile& profile, int s, int order) {
  const auto& x = profile.values;
  const int n = static_cast<int>(x.size());
  if (s % 2 != 0) throw std::invalid_argument("mdfa: scale must be even");
  const int n_seg = n / s;
  if (n_seg < 2) throw std::invalid_argument("mdfa: fewer than 2 segments");
  const int half = s / 2;
  long double acc = 0.0L;
  for (int seg = 0; seg < n_seg; ++seg) {
    const double* y = x.data() + static_cast<std::size_t>(seg) * s;
    const std::vector<double> fitted = polyfit_values(y, s, order);
    std::vector<double> resid(s);
    for (int j = 0; j < s; ++j) resid[j] = y[j] - fitted[j];
    for (int j = 0; j + half < s; ++j) {
      const long double d = resid[j + half] - resid[j];
      acc += d * d;
    }
  }
  return std::sqrt(static_cast<double>(acc / (static_cast<long double>(n_seg) * half)));
}

double method_value(const Method& method, const Series& series, const Profile& profile,
                    int s) {
  switch (method.kind) {
    case MethodKind::FA:
      return ref::fa(profile, s);
    case MethodKind::RS:
      return ref::rs(series, s);
    case MethodKind::DFA:
      return ref::dfa(profile, s, method.order);
    case MethodKind::BMA:
      return ref::bma(profile, s);
    case MethodKind::CMA:
      return ref::cma(profile, s);
    case MethodKind::MDFA:
      return ref::mdfa(profile, s, method.order);
  }
  throw std::invalid_argument("unknown method");
}

double sd1(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  long double mean = 0.0L;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= n;
  long double acc = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = (a[i] - b[i]) - mean;
    acc += 0.5L * d * d;
  }
  return std::sqrt(static_cast<double>(acc / n));
}

double sd2(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  long double mean = 0.0L;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] + b[i];
  mean /= n;
  long double acc = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = (a[i] + b[i]) - mean;
    acc += 0.5L * d * d;
  }
  return std::sqrt(static_cast<double>(acc / n));
}

}  // namespace fluctana::ref
