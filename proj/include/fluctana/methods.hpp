#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fluctana/series.hpp"

namespace fluctana {

enum class MethodKind { FA, RS, DFA, BMA, CMA, MDFA };

struct Method {
  MethodKind kind = MethodKind::DFA;
  int order = 1;  // detrending polynomial order; meaningful for DFA/MDFA

  std::string label() const;  // "FA", "RS", "DFA1", "BMA", "CMA", "MDFA1"
  bool has_order() const { return kind == MethodKind::DFA || kind == MethodKind::MDFA; }
  bool needs_odd_scale() const { return kind == MethodKind::CMA; }
  bool needs_even_scale() const { return kind == MethodKind::MDFA; }
  int min_scale() const;  // smallest scale admitted into a grid

  bool operator==(const Method& other) const {
    return kind == other.kind && (!has_order() || order == other.order);
  }
};

// Accepts "dfa", "DFA2", "cma", "mdfa1", ... ; a trailing number overrides
// default_order. Throws std::invalid_argument for unknown names or invalid
// orders.
Method parse_method(const std::string& name, int default_order = 1);

struct ScaleGrid {
  std::vector<int> scales;  // strictly increasing

  int size() const { return static_cast<int>(scales.size()); }
};

// ~points_per_decade logarithmically spaced scales from the method minimum
// to floor(N/2), rounded to the method's valid parity and deduplicated.
ScaleGrid default_scale_grid(int n, const Method& method,
                             double points_per_decade = 20.0);

// Validates an explicit scale list against the method and series length.
ScaleGrid make_scale_grid(std::vector<int> scales, int n, const Method& method);

struct FluctuationCurve {
  Method method;
  ScaleGrid grid;
  std::vector<double> f;  // F(s), one per scale
  int ensemble_size = 1;
  int series_length = 0;
};

// Single-scale fluctuation values.
double fa(const Profile& profile, int s);
double rs(const Series& series, int s);
double dfa(const Profile& profile, int s, int order);
double bma(const Profile& profile, int s);
double cma(const Profile& profile, int s);
double mdfa(const Profile& profile, int s, int order);

// Per-series mean-square fluctuations are averaged across the ensemble and
// the square root is taken last. Member order fixes the summation order, so
// results do not depend on the number of threads.
FluctuationCurve fluctuation_curve(std::span<const Series> ensemble,
                                   const Method& method, const ScaleGrid& grid);
FluctuationCurve fluctuation_curve(const Series& series, const Method& method,
                                   const ScaleGrid& grid);

// Streaming ensemble driver: member i is produced by make_member(i) (which
// must be a pure function of i) and analyzed with every method; squared
// fluctuations are reduced in member order.
std::vector<FluctuationCurve> ensemble_curves(
    int n_series, const std::function<Series(int)>& make_member,
    std::span<const Method> methods, std::span<const ScaleGrid> grids);

namespace detail {

// Orthonormal polynomial basis on the centered, scaled segment abscissa;
// row k of phi holds the degree-k basis vector sampled on j = 0..scale-1.
struct PolyBasis {
  int scale = 0;
  int order = 0;
  std::vector<double> phi;  // (order+1) x scale, row-major

  const double* row(int k) const { return phi.data() + static_cast<std::size_t>(k) * scale; }
};

PolyBasis make_poly_basis(int scale, int order);

// Mean-square kernels (the square of the per-series statistic). These are
// pure and safe to call concurrently; rs_ms reports a degenerate segment
// (zero dispersion) through degenerate_segment (-1 when none).
double fa_ms(std::span<const double> profile, int s);
double rs_ms(std::span<const double> series, int s, int* degenerate_segment);
double dfa_ms(std::span<const double> profile, const PolyBasis& basis);
double bma_ms(std::span<const double> profile, int s);
double cma_ms(std::span<const double> profile, int s);
double mdfa_ms(std::span<const double> profile, const PolyBasis& basis);

}  // namespace detail

}  // namespace fluctana
