#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluctana {

struct GenerateConfig {
  int length = 50000;
  double alpha = 0.7;
  bool crossover = false;
  double alpha_short = 0.0;
  double alpha_long = 0.0;
  int s_cross = 0;
  double trend_amplitude = 0.0;
  double trend_exponent = 1.0;
  std::uint64_t seed = 1;
  bool normalize = true;
  std::string output;
};

struct AnalyzeConfig {
  std::vector<std::string> inputs;
  std::string csv_column;  // set => CSV input; may be a name or 0-based index
  bool csv = false;
  std::string method = "dfa";
  int order = 1;
  std::string scales;  // comma-separated explicit scale list; empty => default grid
  double points_per_decade = 20.0;
  std::string output;
};

enum class RangeMode { Explicit, FixedLower, FixedWidth };

struct FitConfig {
  std::string input;
  RangeMode range_mode = RangeMode::FixedLower;
  double s_lo = 0.0;
  double s_hi = 0.0;
  int length = 0;      // series length behind the curve; 0 => infer 2*s_max
  std::string method;  // tag used for crossover correction; may be empty
  bool detect = false;
  double sse_threshold = 0.05;
  double min_slope_separation = 0.1;
  std::string output;
};

enum class StudyKind { AlphaVsN, Scatter, CrossoverCal, TrendCrossover };

struct StudyConfig {
  StudyKind kind = StudyKind::AlphaVsN;
  double alpha = 0.7;
  std::string lengths = "50,100,200,500,1000,5000";
  int n_series = 1000;
  std::string methods;  // defaults depend on the study kind
  std::string ref_method = "dfa1";
  double alpha_short = 0.8;
  double alpha_long = 0.5;
  std::string s_cross_list = "50,100,200,400,800";
  int length = 100000;
  double trend_exponent = 1.0;
  std::string amplitudes = "2,3.56,6.32,10,20";
  int quick = 1;  // divides n_series for desk-scale runs
  std::uint64_t seed = 1;
  std::string out_dir;
};

struct RunConfig {
  enum class Command { None, Generate, Analyze, Fit, Study };
  Command command = Command::None;
  GenerateConfig generate;
  AnalyzeConfig analyze;
  FitConfig fit;
  StudyConfig study;
  int threads = 0;  // 0 = library default (respects OMP_NUM_THREADS)
};

// Thrown for invalid flags or parameter values; carries the messages shown
// to the user. Maps to exit status 1.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by --help; carries the help text and maps to exit status 0.
struct HelpRequested : std::runtime_error {
  explicit HelpRequested(const std::string& text) : std::runtime_error(text) {}
};

// Parses and fully validates command-line arguments (argv[0] excluded).
RunConfig parse_config(const std::vector<std::string>& args);

// Executes the selected pipeline. Summaries and warnings go to *out.
// Outputs are written atomically, with a key=value provenance sidecar that
// can be replayed through --config. Throws on failure.
void run(const RunConfig& config, std::ostream& out);

// Exit statuses: 0 success, 1 usage error, 2 computation error, 3 I/O error.
int cli_main(int argc, const char* const* argv);

std::vector<int> parse_int_list(const std::string& text, const char* what);
std::vector<double> parse_double_list(const std::string& text, const char* what);

}  // namespace fluctana
