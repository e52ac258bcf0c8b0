#include "rndunit/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "rndunit/error.hpp"

namespace rndunit {

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

double heisenberg_time(const EigenSystem& eig, GapConvention convention) {
  const auto d = eig.energies.size();
  const double threshold = eig.degeneracy_threshold();
  double total = 0.0;
  std::size_t count = 0;
  if (convention == GapConvention::AllPairs) {
    for (Eigen::Index n = 0; n < d; ++n) {
      for (Eigen::Index m = n + 1; m < d; ++m) {
        total += std::abs(eig.energies(m) - eig.energies(n));
        ++count;
      }
    }
  } else {
    for (Eigen::Index n = 0; n + 1 < d; ++n) {
      total += std::abs(eig.energies(n + 1) - eig.energies(n));
      ++count;
    }
  }
  if (count == 0 || d < 2 || eig.energies.maxCoeff() - eig.energies.minCoeff() <= threshold) {
    throw ValidationError("heisenberg_time: spectrum is fully degenerate, no level spacing");
  }
  return static_cast<double>(count) / total;
}

namespace {

// Derivative at x[i] of the quadratic through (x[a], y[a]), (x[b], y[b]), (x[c], y[c]).
double three_point_derivative(const std::vector<double>& x, const std::vector<double>& y,
                              std::size_t a, std::size_t b, std::size_t c, std::size_t i) {
  const double xa = x[a], xb = x[b], xc = x[c], xi = x[i];
  const double la = ((xi - xb) + (xi - xc)) / ((xa - xb) * (xa - xc));
  const double lb = ((xi - xa) + (xi - xc)) / ((xb - xa) * (xb - xc));
  const double lc = ((xi - xa) + (xi - xb)) / ((xc - xa) * (xc - xb));
  return la * y[a] + lb * y[b] + lc * y[c];
}

}  // namespace

CoherenceRate coherence_rate(const TimeSeries& series, const EigenSystem& eig, std::size_t n,
                             std::size_t m, double cutoff) {
  series.validate();
  if (series.size() == 0) throw ValidationError("coherence_rate: empty series");
  if (n == m) throw ValidationError("coherence_rate: n and m must differ");
  if (n >= eig.dim() || m >= eig.dim()) {
    throw ValidationError("coherence_rate: level index out of range");
  }

  CoherenceRate out;
  std::vector<double> log_abs;
  const Eigen::VectorXcd vn = eig.basis.matrix().col(static_cast<Eigen::Index>(n));
  const Eigen::VectorXcd vm = eig.basis.matrix().col(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double magnitude = std::abs(vn.dot(series.states[k].matrix() * vm));
    if (magnitude < cutoff) {
      out.truncated_at = series.times[k];
      break;
    }
    out.times.push_back(series.times[k]);
    log_abs.push_back(std::log(magnitude));
  }

  const std::size_t len = out.times.size();
  out.rates.assign(len, 0.0);
  if (len == 2) {
    const double slope = (log_abs[1] - log_abs[0]) / (out.times[1] - out.times[0]);
    out.rates = {-slope, -slope};
  } else if (len >= 3) {
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t mid = std::clamp<std::size_t>(i, 1, len - 2);
      out.rates[i] = -three_point_derivative(out.times, log_abs, mid - 1, mid, mid + 1, i);
    }
  }
  return out;
}

ComparisonReport compare(const TimeSeries& exact, const TimeSeries& approx, double threshold) {
  exact.validate();
  approx.validate();
  if (exact.size() != approx.size()) {
    throw ValidationError("compare: series have different lengths");
  }
  ComparisonReport report;
  report.times = exact.times;
  report.trace_distances.reserve(exact.size());
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const double ta = exact.times[k];
    const double tb = approx.times[k];
    if (std::abs(ta - tb) > 1e-12 * std::max(1.0, std::abs(ta))) {
      throw ValidationError("compare: time grids differ at sample " + std::to_string(k));
    }
    const double dist = trace_distance(exact.states[k], approx.states[k]);
    report.trace_distances.push_back(dist);
    report.max_error = std::max(report.max_error, dist);
    if (!report.breakdown_time && dist > threshold) report.breakdown_time = ta;
  }
  return report;
}

}  // namespace rndunit
