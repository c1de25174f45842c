#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fluctana/methods.hpp"
#include "fluctana/scaling.hpp"

using namespace fluctana;

namespace {

FluctuationCurve power_law_curve(double alpha, double prefactor, int n_points,
                                 double s_lo = 4.0, double points_per_decade = 20.0) {
  FluctuationCurve curve;
  curve.method = parse_method("dfa1");
  curve.ensemble_size = 1;
  double target = s_lo;
  const double step = std::pow(10.0, 1.0 / points_per_decade);
  int prev = 0;
  while (curve.grid.size() < n_points) {
    const int s = static_cast<int>(std::lround(target));
    if (s > prev) {
      curve.grid.scales.push_back(s);
      curve.f.push_back(prefactor * std::pow(s, alpha));
    }
    prev = std::max(prev, s);
    target *= step;
  }
  curve.series_length = 2 * curve.grid.scales.back();
  return curve;
}

FluctuationCurve broken_curve(double a1, double a2, double s_break, int n_points,
                              double s_lo = 4.0, double ppd = 20.0) {
  FluctuationCurve curve = power_law_curve(a1, 1.0, n_points, s_lo, ppd);
  const double xb = std::log(s_break);
  for (std::size_t j = 0; j < curve.grid.scales.size(); ++j) {
    const double x = std::log(curve.grid.scales[j]);
    const double y = (x <= xb) ? a1 * (x - xb) : a2 * (x - xb);
    curve.f[j] = std::exp(y);
  }
  return curve;
}

}  // namespace

TEST_CASE("fit_alpha recovers an exact power law") {
  const FluctuationCurve curve = power_law_curve(0.8, 2.5, 40);
  const AlphaEstimate est = fit_alpha(curve, 4, 1e9);
  CHECK(est.alpha == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(est.residual_rms < 1e-12);
  CHECK(est.n_points == curve.grid.size());
}

TEST_CASE("fit_alpha is invariant under constant rescaling of F") {
  const FluctuationCurve a = power_law_curve(0.6, 1.0, 30);
  FluctuationCurve b = a;
  for (double& f : b.f) f *= 123.456;
  CHECK(fit_alpha(b, 4, 1e9).alpha ==
        doctest::Approx(fit_alpha(a, 4, 1e9).alpha).epsilon(1e-12));
}

TEST_CASE("fit_alpha input validation") {
  const FluctuationCurve curve = power_law_curve(0.5, 1.0, 20);
  CHECK_THROWS_AS(fit_alpha(curve, 4, 5), std::invalid_argument);  // < 3 points
  CHECK_THROWS_AS(fit_alpha(curve, 9, 4), std::invalid_argument);  // inverted
  FluctuationCurve bad = curve;
  bad.f[3] = 0.0;
  CHECK_THROWS_AS(fit_alpha(bad, 4, 1e9), std::domain_error);
}

TEST_CASE("fixed width range") {
  const auto r200 = fixed_width_range(200);
  CHECK(r200.first == doctest::Approx(10.0));
  CHECK(r200.second == doctest::Approx(100.0));
  const auto r2000 = fixed_width_range(2000);
  CHECK(r2000.first == doctest::Approx(100.0));
  CHECK(r2000.second == doctest::Approx(1000.0));
  CHECK_THROWS_AS(fixed_width_range(40), std::invalid_argument);
}

TEST_CASE("local slopes of an exact power law are constant") {
  const FluctuationCurve curve = power_law_curve(1.2, 0.3, 35);
  for (const auto& [mid, slope] : local_slopes(curve)) {
    CHECK(slope == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(mid > 0);
  }
}

TEST_CASE("local slopes are reported at geometric midpoints") {
  FluctuationCurve curve;
  curve.method = parse_method("fa");
  curve.grid.scales = {4, 9};
  curve.f = {1.0, 2.0};
  const auto slopes = local_slopes(curve);
  REQUIRE(slopes.size() == 1);
  CHECK(slopes[0].first == doctest::Approx(6.0));
  CHECK(slopes[0].second ==
        doctest::Approx(std::log(2.0) / std::log(9.0 / 4.0)));
}

TEST_CASE("spacing-weighted mean of local slopes telescopes to the endpoint slope") {
  // On any grid the weighted mean collapses to
  // (ln F_m - ln F_0) / (ln s_m - ln s_0).
  FluctuationCurve curve = power_law_curve(0.7, 1.0, 25);
  for (std::size_t j = 0; j < curve.f.size(); ++j) {
    curve.f[j] *= 1.0 + 0.2 * std::sin(static_cast<double>(j));  // wiggle
  }
  const auto slopes = local_slopes(curve);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    const double w = std::log(static_cast<double>(curve.grid.scales[k + 1]) /
                              curve.grid.scales[k]);
    num += slopes[k].second * w;
    den += w;
  }
  const double endpoint =
      (std::log(curve.f.back()) - std::log(curve.f.front())) /
      (std::log(static_cast<double>(curve.grid.scales.back())) -
       std::log(static_cast<double>(curve.grid.scales.front())));
  CHECK(num / den == doctest::Approx(endpoint).epsilon(1e-12));
}

TEST_CASE("local slopes agree with fit_alpha on exact power laws") {
  const FluctuationCurve curve = power_law_curve(0.45, 2.0, 30);
  const double fitted = fit_alpha(curve, 4, 1e9).alpha;
  for (const auto& [mid, slope] : local_slopes(curve)) {
    CHECK(slope == doctest::Approx(fitted).epsilon(1e-10));
  }
}

TEST_CASE("detect_crossover finds an exact broken power law") {
  const FluctuationCurve curve = broken_curve(0.8, 0.5, 200.0, 60, 10.0);
  const CrossoverEstimate est = detect_crossover(curve, 10, 1e9);
  REQUIRE(est.found);
  // within one grid step (about 12% at 20 points per decade)
  CHECK(std::fabs(std::log(est.s_observed / 200.0)) < std::log(1.13));
  CHECK(est.alpha_below == doctest::Approx(0.8).epsilon(0.02));
  CHECK(est.alpha_above == doctest::Approx(0.5).epsilon(0.02));
  CHECK(est.s_corrected == doctest::Approx(correct_crossover(est.s_observed,
                                                             parse_method("dfa1"))));
}

TEST_CASE("detect_crossover breakpoint recovery across slope pairs") {
  for (double a1 : {0.3, 0.7, 1.1}) {
    for (double da : {0.1, -0.15, 0.4}) {
      const double a2 = a1 + da;
      for (double sb : {60.0, 300.0, 900.0}) {
        const FluctuationCurve curve = broken_curve(a1, a2, sb, 70, 8.0, 15.0);
        const CrossoverEstimate est = detect_crossover(curve, 8, 1e9, 0.05, 0.05);
        REQUIRE(est.found);
        const double step = std::pow(10.0, 1.0 / 15.0);
        CHECK(std::fabs(std::log(est.s_observed / sb)) < std::log(step) * 1.01);
      }
    }
  }
}

TEST_CASE("detect_crossover reports no crossover on a single power law") {
  const FluctuationCurve curve = power_law_curve(0.7, 1.0, 50);
  const CrossoverEstimate est = detect_crossover(curve, 4, 1e9);
  CHECK_FALSE(est.found);
  CHECK(est.single_alpha == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("detect_crossover needs six points in the window") {
  const FluctuationCurve curve = power_law_curve(0.7, 1.0, 10);
  CHECK_THROWS_AS(detect_crossover(curve, 4, 6), std::invalid_argument);
}

TEST_CASE("crossover corrections match the calibration formulas") {
  // frozen against direct evaluation of the ln-space maps
  CHECK(correct_crossover(187.0, parse_method("dfa1")) ==
        doctest::Approx(187.0 * std::exp(-0.25)));
  CHECK(correct_crossover(187.0, parse_method("dfa1")) ==
        doctest::Approx(145.6357).epsilon(1e-4));
  CHECK(correct_crossover(1.0, parse_method("cma")) ==
        doctest::Approx(std::exp(-0.47)));
  CHECK(correct_crossover(1.0, parse_method("cma")) ==
        doctest::Approx(0.62500227).epsilon(1e-6));
  CHECK(correct_crossover(170.0, parse_method("mdfa1")) ==
        doctest::Approx(std::exp(1.04 * std::log(170.0) - 0.19)));
  CHECK(correct_crossover(170.0, parse_method("mdfa1")) ==
        doctest::Approx(172.65).epsilon(1e-3));
}

TEST_CASE("crossover corrections are strictly increasing") {
  for (const char* name : {"dfa1", "cma", "mdfa1"}) {
    const Method m = parse_method(name);
    double prev = 0.0;
    for (double s = 2.0; s < 4000.0; s *= 1.7) {
      const double corrected = correct_crossover(s, m);
      CHECK(corrected > prev);
      prev = corrected;
    }
  }
}

TEST_CASE("unsupported corrections throw") {
  CHECK_THROWS_AS(correct_crossover(100.0, parse_method("dfa2")), std::invalid_argument);
  CHECK_THROWS_AS(correct_crossover(100.0, parse_method("fa")), std::invalid_argument);
  CHECK_THROWS_AS(correct_crossover(-1.0, parse_method("dfa1")), std::invalid_argument);
  CHECK(has_crossover_correction(parse_method("cma")));
  CHECK_FALSE(has_crossover_correction(parse_method("bma")));
}

TEST_CASE("exponent relations") {
  const GammaBeta white = exponent_relations(0.5);
  CHECK(white.gamma == doctest::Approx(1.0));
  CHECK(white.beta == doctest::Approx(0.0));
  CHECK_FALSE(white.gamma_in_domain);  // boundary of the open interval

  const GammaBeta lrc = exponent_relations(0.7);
  CHECK(lrc.gamma == doctest::Approx(0.6));
  CHECK(lrc.beta == doctest::Approx(0.4));
  CHECK(lrc.gamma_in_domain);

  const GammaBeta pink = exponent_relations(1.0);
  CHECK(pink.beta == doctest::Approx(1.0));
  CHECK(pink.gamma == doctest::Approx(0.0));
  CHECK_FALSE(pink.gamma_in_domain);
}
