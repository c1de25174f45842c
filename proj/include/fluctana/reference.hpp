#pragma once

#include <span>

#include "fluctana/methods.hpp"
#include "fluctana/series.hpp"

// Serial, definitional implementations of every fluctuation method, written
// directly from the segment-wise definitions with no shared kernels, running
// windows or precomputed bases. They are deliberately slow and exist as an
// independent route for the test suite and as the baseline for the benchmark
// target; nothing in the library links against them.
namespace fluctana::ref {

double autocorrelation(const Series& series, int lag);

double fa(const Profile& profile, int s);
double rs(const Series& series, int s);
double dfa(const Profile& profile, int s, int order);
double bma(const Profile& profile, int s);
double cma(const Profile& profile, int s);
double mdfa(const Profile& profile, int s, int order);

// Dispatch matching the optimized per-scale statistic.
double method_value(const Method& method, const Series& series, const Profile& profile,
                    int s);

// Direct evaluation of the scatter dispersions from their definitions.
double sd1(std::span<const double> a, std::span<const double> b);
double sd2(std::span<const double> a, std::span<const double> b);

}  // namespace fluctana::ref
