#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fluctana/cli.hpp"
#include "fluctana/io.hpp"
#include "fluctana/methods.hpp"
#include "fluctana/scaling.hpp"
#include "fluctana/series.hpp"

using namespace fluctana;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fluctana_test_" + std::to_string(std::rand()) +
            std::to_string(reinterpret_cast<std::uintptr_t>(this) % 100000));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::vector<std::string>& args, std::string* output = nullptr) {
  std::ostringstream out;
  try {
    const RunConfig cfg = parse_config(args);
    run(cfg, out);
    if (output) *output = out.str();
    return 0;
  } catch (const HelpRequested&) {
    return 0;
  } catch (const UsageError&) {
    return 1;
  } catch (const std::ios_base::failure&) {
    return 3;
  } catch (const std::exception&) {
    return 2;
  }
}

}  // namespace

TEST_CASE("series text io round trip with comments") {
  TempDir dir;
  std::ofstream out(dir.file("in.txt"));
  out << "# a comment\n1.5\n\n-2.25\n  3.75 \n";
  out.close();
  const Series s = read_series_text(dir.file("in.txt"));
  CHECK(s.values == std::vector<double>{1.5, -2.25, 3.75});
  write_series_text(dir.file("out.txt"), s);
  const Series back = read_series_text(dir.file("out.txt"));
  CHECK(back.values == s.values);
}

TEST_CASE("series text reader rejects junk") {
  TempDir dir;
  std::ofstream out(dir.file("bad.txt"));
  out << "1.0\nnot-a-number\n";
  out.close();
  CHECK_THROWS_AS(read_series_text(dir.file("bad.txt")), std::ios_base::failure);
  CHECK_THROWS_AS(read_series_text(dir.file("missing.txt")), std::ios_base::failure);
}

TEST_CASE("csv series reader selects columns by name and index") {
  TempDir dir;
  std::ofstream out(dir.file("data.csv"));
  out << "time,value,flag\n0,1.5,0\n1,2.5,1\n2,3.5,0\n";
  out.close();
  CHECK(read_series_csv(dir.file("data.csv"), "value").values ==
        std::vector<double>{1.5, 2.5, 3.5});
  CHECK(read_series_csv(dir.file("data.csv"), "1").values ==
        std::vector<double>{1.5, 2.5, 3.5});
  CHECK_THROWS_AS(read_series_csv(dir.file("data.csv"), "missing"),
                  std::ios_base::failure);
  CHECK_THROWS_AS(read_series_csv(dir.file("data.csv"), ""), std::ios_base::failure);

  std::ofstream single(dir.file("single.csv"));
  single << "v\n4.5\n5.5\n";
  single.close();
  CHECK(read_series_csv(dir.file("single.csv"), "").values ==
        std::vector<double>{4.5, 5.5});
}

TEST_CASE("curve csv round trip preserves the fit bit for bit") {
  TempDir dir;
  FluctuationCurve curve;
  curve.method = parse_method("dfa1");
  double f = 0.3123456789012345;
  for (int s = 4; s <= 4000; s = static_cast<int>(s * 1.4) + 1) {
    curve.grid.scales.push_back(s);
    curve.f.push_back(f);
    f *= 1.7318;
  }
  curve.series_length = 2 * curve.grid.scales.back();
  write_curve_csv(dir.file("c.csv"), curve);
  const FluctuationCurve back = read_curve_csv(dir.file("c.csv"), curve.method);
  REQUIRE(back.grid.scales == curve.grid.scales);
  for (std::size_t j = 0; j < curve.f.size(); ++j) CHECK(back.f[j] == curve.f[j]);
  const double a1 = fit_alpha(curve, 4, 1e9).alpha;
  const double a2 = fit_alpha(back, 4, 1e9).alpha;
  CHECK(a1 == a2);
}

TEST_CASE("parse_config validates flags") {
  CHECK_THROWS_AS(parse_config({"frobnicate"}), UsageError);
  CHECK_THROWS_AS(parse_config({"generate", "--n", "100"}), UsageError);  // no --out
  CHECK_THROWS_AS(parse_config({"generate", "--n", "100", "--alpha", "2.0", "--out",
                                "x.txt"}),
                  UsageError);
  CHECK_THROWS_AS(
      parse_config({"analyze", "--input", "a", "--method", "dfa", "--order", "0",
                    "--out", "b"}),
      UsageError);
  CHECK_THROWS_AS(
      parse_config({"analyze", "--input", "a", "--method", "nope", "--out", "b"}),
      UsageError);
  CHECK_THROWS_AS(parse_config({"generate", "--n", "100", "--alpha1", "0.8", "--out",
                                "x.txt"}),
                  UsageError);  // incomplete crossover triple
  CHECK_THROWS_AS(parse_config({"fit", "--input", "c.csv", "--range", "explicit"}),
                  UsageError);  // missing bounds
  CHECK_THROWS_AS(parse_config({"study", "alpha-vs-n"}), UsageError);  // no out-dir

  const RunConfig ok = parse_config({"generate", "--n", "50000", "--alpha", "0.7",
                                     "--seed", "1", "--out", "a.txt"});
  CHECK(ok.command == RunConfig::Command::Generate);
  CHECK(ok.generate.length == 50000);
  CHECK_FALSE(ok.generate.crossover);
}

TEST_CASE("generate-analyze-fit round trip recovers the target exponent") {
  TempDir dir;
  std::string out;
  REQUIRE(run_cli({"generate", "--n", "50000", "--alpha", "0.7", "--seed", "1",
                   "--out", dir.file("a.txt")},
                  &out) == 0);
  REQUIRE(run_cli({"analyze", "--input", dir.file("a.txt"), "--method", "dfa",
                   "--order", "1", "--out", dir.file("a.csv")},
                  &out) == 0);
  REQUIRE(run_cli({"fit", "--input", dir.file("a.csv"), "--range", "fixed-lower",
                   "--out", dir.file("fit.csv")},
                  &out) == 0);
  const std::string report = slurp(dir.file("fit.csv"));
  const auto pos = report.find("alpha,");
  REQUIRE(pos != std::string::npos);
  const double alpha = std::stod(report.substr(pos + 6));
  CHECK(std::fabs(alpha - 0.7) < 0.03);
}

TEST_CASE("fixed-lower and fixed-width ranges coincide at N=200") {
  TempDir dir;
  std::string out;
  REQUIRE(run_cli({"generate", "--n", "200", "--alpha", "0.7", "--seed", "3", "--out",
                   dir.file("a.txt")},
                  &out) == 0);
  REQUIRE(run_cli({"analyze", "--input", dir.file("a.txt"), "--method", "dfa",
                   "--out", dir.file("a.csv")},
                  &out) == 0);
  std::string lower_out, width_out;
  REQUIRE(run_cli({"fit", "--input", dir.file("a.csv"), "--range", "fixed-lower"},
                  &lower_out) == 0);
  REQUIRE(run_cli({"fit", "--input", dir.file("a.csv"), "--range", "fixed-width"},
                  &width_out) == 0);
  CHECK(lower_out == width_out);
  CHECK(lower_out.find("[10, 100]") != std::string::npos);
}

TEST_CASE("analyze warns on a degenerate constant series") {
  TempDir dir;
  std::ofstream c(dir.file("const.txt"));
  for (int i = 0; i < 256; ++i) c << "4.25\n";
  c.close();
  std::string out;
  REQUIRE(run_cli({"analyze", "--input", dir.file("const.txt"), "--method", "dfa",
                   "--order", "1", "--out", dir.file("c.csv")},
                  &out) == 0);
  CHECK(out.find("warning") != std::string::npos);
  const FluctuationCurve curve =
      read_curve_csv(dir.file("c.csv"), parse_method("dfa1"));
  for (double f : curve.f) CHECK(f <= 1e-10);
}

TEST_CASE("reruns are byte identical and provenance replays") {
  TempDir dir;
  std::string out;
  REQUIRE(run_cli({"generate", "--n", "4096", "--alpha", "0.8", "--seed", "11",
                   "--out", dir.file("a.txt")},
                  &out) == 0);
  const std::string first = slurp(dir.file("a.txt"));
  const std::string prov = slurp(dir.file("a.txt.prov"));
  CHECK(prov.find("seed = 11") != std::string::npos);

  REQUIRE(run_cli({"generate", "--n", "4096", "--alpha", "0.8", "--seed", "11",
                   "--out", dir.file("a.txt")},
                  &out) == 0);
  CHECK(slurp(dir.file("a.txt")) == first);

  // replay through the provenance sidecar as a config file
  REQUIRE(run_cli({"generate", "--config", dir.file("a.txt.prov"), "--out",
                   dir.file("b.txt")},
                  &out) == 0);
  CHECK(slurp(dir.file("b.txt")) == first);
}

TEST_CASE("ensemble analyze averages squared fluctuations") {
  TempDir dir;
  std::string out;
  REQUIRE(run_cli({"generate", "--n", "2048", "--alpha", "0.7", "--seed", "21",
                   "--out", dir.file("m1.txt")},
                  &out) == 0);
  REQUIRE(run_cli({"generate", "--n", "2048", "--alpha", "0.7", "--seed", "22",
                   "--out", dir.file("m2.txt")},
                  &out) == 0);
  REQUIRE(run_cli({"analyze", "--input", dir.file("m1.txt"), "--input",
                   dir.file("m2.txt"), "--method", "cma", "--out", dir.file("e.csv")},
                  &out) == 0);
  const Series m1 = read_series_text(dir.file("m1.txt"));
  const Series m2 = read_series_text(dir.file("m2.txt"));
  const FluctuationCurve curve = read_curve_csv(dir.file("e.csv"), parse_method("cma"));
  const std::vector<Series> both = {m1, m2};
  const FluctuationCurve direct =
      fluctuation_curve(both, parse_method("cma"), curve.grid);
  for (std::size_t j = 0; j < curve.f.size(); ++j) {
    CHECK(curve.f[j] == doctest::Approx(direct.f[j]).epsilon(1e-15));
  }
}

TEST_CASE("fit with crossover detection on generated crossover data") {
  TempDir dir;
  std::string out;
  REQUIRE(run_cli({"generate", "--n", "32768", "--alpha1", "0.9", "--alpha2", "0.4",
                   "--s-cross", "150", "--seed", "5", "--out", dir.file("x.txt")},
                  &out) == 0);
  REQUIRE(run_cli({"analyze", "--input", dir.file("x.txt"), "--method", "dfa",
                   "--out", dir.file("x.csv")},
                  &out) == 0);
  std::string fit_out;
  REQUIRE(run_cli({"fit", "--input", dir.file("x.csv"), "--range", "explicit",
                   "--s-lo", "8", "--s-hi", "8192", "--method", "dfa1",
                   "--detect-crossover", "--out", dir.file("r.csv")},
                  &fit_out) == 0);
  CHECK(fit_out.find("crossover at") != std::string::npos);
  const std::string report = slurp(dir.file("r.csv"));
  CHECK(report.find("crossover_found,1") != std::string::npos);
  CHECK(report.find("s_corrected,") != std::string::npos);
}

TEST_CASE("study alpha-vs-n writes deterministic outputs") {
  TempDir dir;
  std::string out;
  const std::vector<std::string> args = {
      "study",    "alpha-vs-n",      "--alpha",  "0.7",
      "--lengths", "100,200",        "--n-series", "16",
      "--methods", "dfa1,cma",       "--seed",   "9",
      "--out-dir", dir.file("study")};
  REQUIRE(run_cli(args, &out) == 0);
  const std::string stats = slurp(dir.file("study/alpha_stats.csv"));
  CHECK(stats.find("N,method,mean_alpha") == 0);
  CHECK(stats.find("DFA1") != std::string::npos);
  CHECK(stats.find("CMA") != std::string::npos);
  CHECK(slurp(dir.file("study/alpha_histograms.csv")).size() > 100);
  CHECK(slurp(dir.file("study/provenance.txt")).find("seed = 9") != std::string::npos);

  REQUIRE(run_cli(args, &out) == 0);
  CHECK(slurp(dir.file("study/alpha_stats.csv")) == stats);
}

TEST_CASE("study scatter writes pair tables") {
  TempDir dir;
  std::string out;
  REQUIRE(run_cli({"study", "scatter", "--alpha", "0.7", "--lengths", "100,200",
                   "--n-series", "16", "--ref", "dfa1", "--methods", "cma", "--seed",
                   "4", "--out-dir", dir.file("sc")},
                  &out) == 0);
  const std::string sd = slurp(dir.file("sc/scatter_sd.csv"));
  CHECK(sd.find("N,pair,sd1,sd2,ratio") == 0);
  CHECK(sd.find("DFA1-CMA") != std::string::npos);
  const std::string pairs = slurp(dir.file("sc/scatter_pairs.csv"));
  CHECK(pairs.find("100,DFA1-CMA,") != std::string::npos);
}

TEST_CASE("io failures exit with status 3") {
  CHECK(run_cli({"analyze", "--input", "/nonexistent/nope.txt", "--method", "dfa",
                 "--out", "/nonexistent/out.csv"}) == 3);
}

TEST_CASE("usage errors exit with status 1") {
  CHECK(run_cli({"fit", "--input"}) == 1);
  CHECK(run_cli({"generate", "--n", "10", "--alpha", "0.7"}) == 1);
}
