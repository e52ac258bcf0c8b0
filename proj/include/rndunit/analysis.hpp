#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rndunit/linops.hpp"
#include "rndunit/mastereq.hpp"

namespace rndunit {

double purity(const DensityMatrix& rho);

/// Which level pairs enter the mean level spacing.
enum class GapConvention {
  AllPairs,  // mean |E_m - E_n| over all m < n
  Adjacent,  // mean spacing of neighbouring levels
};

/// 1 / <|E_m - E_n|>. Throws ValidationError for a fully degenerate spectrum.
double heisenberg_time(const EigenSystem& eig, GapConvention convention = GapConvention::AllPairs);

struct CoherenceRate {
  std::vector<double> times;
  /// -d ln|rho_nm| / dt at each usable time.
  std::vector<double> rates;
  /// Set when |rho_nm| fell below the cutoff and the window was cut short;
  /// holds the first time that was excluded.
  std::optional<double> truncated_at;
};

/// Empirical dephasing rate of the (n, m) coherence in the eigenbasis of `eig`,
/// by three-point finite differences of ln|rho_nm| (one-sided at the ends).
CoherenceRate coherence_rate(const TimeSeries& series, const EigenSystem& eig, std::size_t n,
                             std::size_t m, double cutoff = 1e-12);

struct ComparisonReport {
  std::vector<double> times;
  std::vector<double> trace_distances;
  double max_error = 0.0;
  std::optional<double> breakdown_time;
};

inline constexpr double kDefaultBreakdownThreshold = 1e-2;

/// Pointwise trace distance of two series on the same grid; breakdown_time is
/// the first time the distance exceeds `threshold`.
ComparisonReport compare(const TimeSeries& exact, const TimeSeries& approx,
                         double threshold = kDefaultBreakdownThreshold);

}  // namespace rndunit
