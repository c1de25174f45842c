#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fluctana/experiments.hpp"
#include "fluctana/generator.hpp"
#include "fluctana/reference.hpp"

using namespace fluctana;

TEST_CASE("scatter_sd on identical lists") {
  const std::vector<double> a = {0.6, 0.7, 0.8, 0.65};
  const ScatterStats st = scatter_sd(a, a);
  CHECK(st.sd1 == 0.0);
  CHECK(st.sd2 > 0.0);
  CHECK(st.pairs.size() == 4);
}

TEST_CASE("scatter_sd matches the hand-expanded definition on two pairs") {
  const std::vector<double> a = {0.0, 1.0};
  const std::vector<double> b = {1.0, 0.0};
  const ScatterStats st = scatter_sd(a, b);
  // differences are {-1, +1}, mean 0: SD1 = sqrt(mean(0.5 * d^2)) = sqrt(1/2)
  CHECK(st.sd1 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  // sums are {1, 1}: centered to zero, SD2 = 0
  CHECK(st.sd2 == doctest::Approx(0.0));
}

TEST_CASE("scatter_sd equals the definitional oracle on random pairs") {
  GaussianRng rng(5);
  std::vector<double> a, b;
  for (int i = 0; i < 200; ++i) {
    a.push_back(0.7 + 0.05 * rng.gaussian());
    b.push_back(0.7 + 0.07 * rng.gaussian());
  }
  const ScatterStats st = scatter_sd(a, b);
  CHECK(st.sd1 == doctest::Approx(ref::sd1(a, b)).epsilon(1e-13));
  CHECK(st.sd2 == doctest::Approx(ref::sd2(a, b)).epsilon(1e-13));
}

TEST_CASE("scatter_sd invariances") {
  GaussianRng rng(6);
  std::vector<double> a, b, a_shift, b_shift, a_anti, b_anti;
  for (int i = 0; i < 64; ++i) {
    a.push_back(rng.gaussian());
    b.push_back(rng.gaussian());
    a_shift.push_back(a.back() + 3.25);
    b_shift.push_back(b.back() + 3.25);
    a_anti.push_back(a.back() + 1.5);
    b_anti.push_back(b.back() - 1.5);
  }
  const ScatterStats base = scatter_sd(a, b);
  // common constant leaves SD1 unchanged
  CHECK(scatter_sd(a_shift, b_shift).sd1 == doctest::Approx(base.sd1).epsilon(1e-12));
  // +c / -c leaves SD2 unchanged
  CHECK(scatter_sd(a_anti, b_anti).sd2 == doctest::Approx(base.sd2).epsilon(1e-12));
  // swapping the lists changes neither
  const ScatterStats swapped = scatter_sd(b, a);
  CHECK(swapped.sd1 == doctest::Approx(base.sd1).epsilon(1e-12));
  CHECK(swapped.sd2 == doctest::Approx(base.sd2).epsilon(1e-12));
}

TEST_CASE("scatter_sd rejects mismatched lists") {
  const std::vector<double> a = {1.0, 2.0};
  const std::vector<double> b = {1.0};
  CHECK_THROWS_AS(scatter_sd(a, b), std::invalid_argument);
  CHECK_THROWS_AS(scatter_sd(b, b), std::invalid_argument);  // < 2 pairs
}

TEST_CASE("alpha_vs_length_study smoke") {
  const std::vector<int> lengths = {100, 200};
  const std::vector<Method> methods = {parse_method("dfa1"), parse_method("cma")};
  const AlphaStudyResult result =
      alpha_vs_length_study(0.7, lengths, 24, methods, 99);
  REQUIRE(result.stats.size() == 4);
  REQUIRE(result.raw.size() == 4);
  for (const EnsembleStats& cell : result.stats) {
    CHECK(cell.n_series == 24);
    CHECK(cell.n_failures == 0);
    CHECK(cell.sd_alpha >= 0.0);
    CHECK(cell.mean_alpha > 0.2);
    CHECK(cell.mean_alpha < 1.2);
    double total = 0.0;
    for (const auto& [center, count] : cell.histogram) {
      CHECK(count >= 0.0);
      total += count;
      CHECK(center >= kHistogramLo);
      CHECK(center <= kHistogramHi);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
  // same (N, method) cells pair member-by-member for scatter statistics
  const ScatterStats st = scatter_sd(result.raw[0].alphas, result.raw[1].alphas);
  CHECK(st.pairs.size() == 24);
  CHECK(st.sd1 < st.sd2);

  // deterministic rerun
  const AlphaStudyResult again = alpha_vs_length_study(0.7, lengths, 24, methods, 99);
  for (std::size_t c = 0; c < result.raw.size(); ++c) {
    CHECK(again.raw[c].alphas == result.raw[c].alphas);
  }
}

TEST_CASE("alpha_vs_length_study validates input") {
  const std::vector<Method> methods = {parse_method("dfa1")};
  const std::vector<int> ok = {100};
  const std::vector<int> too_short = {30};
  CHECK_THROWS_AS(alpha_vs_length_study(0.7, too_short, 24, methods, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(alpha_vs_length_study(0.7, ok, 5, methods, 1),
                  std::invalid_argument);
}

TEST_CASE("trend_crossover_study smoke") {
  const std::vector<double> amplitudes = {8.0, 25.0, 80.0};
  const std::vector<Method> methods = {parse_method("dfa1")};
  const TrendCrossoverStudy study =
      trend_crossover_study(0.6, 1.0, amplitudes, 16384, 20, methods, 12);
  REQUIRE(study.cells.size() == 3);
  int found = 0;
  double prev = 1e18;
  for (const auto& cell : study.cells) {
    if (cell.estimate.found) {
      ++found;
      // stronger trends push the crossover to smaller scales
      CHECK(cell.estimate.s_observed < prev);
      prev = cell.estimate.s_observed;
    }
  }
  CHECK(found == 3);
  REQUIRE(study.fits.size() == 1);
  CHECK(study.fits[0].delta > 0.3);
  CHECK(study.fits[0].delta < 1.2);
}

TEST_CASE("trend_crossover_study needs a decade of amplitudes") {
  const std::vector<double> narrow = {5.0, 10.0};
  const std::vector<Method> methods = {parse_method("dfa1")};
  CHECK_THROWS_AS(trend_crossover_study(0.6, 1.0, narrow, 8192, 12, methods, 1),
                  std::invalid_argument);
}

TEST_CASE("crossover_calibration_study validates the crossover range") {
  const std::vector<Method> methods = {parse_method("dfa1")};
  const std::vector<int> bad = {5};
  CHECK_THROWS_AS(crossover_calibration_study(0.8, 0.5, bad, 4096, 12, methods, 1),
                  std::invalid_argument);
  const std::vector<int> too_big = {600};
  CHECK_THROWS_AS(crossover_calibration_study(0.8, 0.5, too_big, 4096, 12, methods, 1),
                  std::invalid_argument);
}

TEST_CASE("crossover_calibration_study smoke") {
  const std::vector<int> sx = {40, 120};
  const std::vector<Method> methods = {parse_method("dfa1"), parse_method("mdfa1")};
  const CrossoverCalibration cal =
      crossover_calibration_study(0.9, 0.4, sx, 16384, 20, methods, 5);
  REQUIRE(cal.cells.size() == 4);
  for (const auto& cell : cal.cells) {
    REQUIRE(cell.estimate.found);
    // detected within a factor of two of the real crossover
    CHECK(cell.estimate.s_observed > cell.s_cross / 2.0);
    CHECK(cell.estimate.s_observed < cell.s_cross * 2.0);
  }
  REQUIRE(cal.fits.size() == 2);
  for (const auto& fit : cal.fits) {
    CHECK(fit.n_cells == 2);
    CHECK(fit.slope > 0.5);
    CHECK(fit.slope < 1.5);
  }
}
