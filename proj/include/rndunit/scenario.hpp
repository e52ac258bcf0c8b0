#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rndunit/analysis.hpp"
#include "rndunit/ensemble.hpp"
#include "rndunit/error.hpp"
#include "rndunit/linops.hpp"
#include "rndunit/mastereq.hpp"

namespace rndunit {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct ExplicitEnsembleSpec {
  std::vector<Realization> realizations;
};

struct GaussianEnsembleSpec {
  HermitianOperator base;
  double sigma;
  std::size_t n_nodes;
  /// When set, draw this many Monte-Carlo samples (seeded) instead of quadrature.
  std::optional<std::size_t> monte_carlo_samples;
};

struct TwoPointEnsembleSpec {
  HermitianOperator base;
  double g;
};

using EnsembleSpec = std::variant<ExplicitEnsembleSpec, GaussianEnsembleSpec, TwoPointEnsembleSpec>;

/// A validated run description.
///
/// The disorder ensemble is centered on load: `mean` is removed from every
/// realization and added to the system Hamiltonian. The block Hamiltonians
/// hs + H_lambda, and hence the exact dynamics, are unchanged by this.
struct Scenario {
  std::string name;
  std::size_t dim = 0;
  HermitianOperator hs;            // as written in the document
  EnsembleSpec ensemble_spec;
  DisorderEnsemble ensemble;       // realized, before centering
  HermitianOperator mean;          // weighted mean removed from the ensemble
  HermitianOperator effective_hs;  // hs + mean
  DisorderEnsemble centered;       // zero-mean realizations
  DensityMatrix rho0;
  std::string rho0_label;
  double t_final = 0.0;
  double dt = 0.0;
  std::vector<GeneratorKind> generators;  // canonical order: redfield, dephasing, gksl
  std::uint64_t seed = 0;
  std::string output_path;
  double breakdown_threshold = kDefaultBreakdownThreshold;
  /// The document the scenario was parsed from, overrides applied. Feeding it
  /// back through parse_scenario reproduces the run.
  nlohmann::json document;
  /// Human-readable notes on transformations applied during load.
  std::vector<std::string> log;
};

/// Command-line overrides applied to the document before validation.
struct ScenarioOverrides {
  std::optional<std::string> output_path;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::uint64_t> seed;
};

/// Raised for malformed documents; the message carries the line or field.
class ScenarioParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

Scenario parse_scenario(nlohmann::json document, const ScenarioOverrides& overrides = {});
Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

/// Names of the built-in scenarios accepted by demo_scenario.
std::vector<std::string> demo_names();
nlohmann::json demo_scenario(std::string_view name);

struct SeriesRecord {
  std::string name;
  TimeSeries series;
  /// Comparison against the exact series (absent for the exact series itself).
  std::optional<ComparisonReport> report;
};

struct RunRecord {
  std::string scenario_name;
  /// exact first, then master-equation series in canonical order.
  std::vector<SeriesRecord> series;
  /// Largest trace distance between the ensemble-average and embedded routes.
  double embedding_max_distance = 0.0;
  std::size_t embedding_checkpoints = 0;
  double wall_time_seconds = 0.0;
  std::string tool_version;
  nlohmann::json configuration;
  std::vector<std::string> warnings;
  std::vector<std::string> log;
};

/// Largest tolerated ensemble-average vs embedding discrepancy in run().
inline constexpr double kEmbeddingTolerance = 1e-10;

/// Runs the exact channel (ensemble average, cross-checked against the
/// embedding) and every requested master equation, then compares each to the
/// exact series. Throws NumericalError if the two exact routes disagree.
RunRecord run(const Scenario& s);

/// CSV: t, then for each series re/im of every rho entry (row-major), purity and
/// trace distance to the exact series. Numbers use shortest round-trip form.
void write_csv(const RunRecord& record, const std::filesystem::path& path);
std::string csv_header(const RunRecord& record);

/// Summary of the run (reports, timings, configuration echo) as JSON.
nlohmann::json report_json(const RunRecord& record);
void write_report(const RunRecord& record, const std::filesystem::path& path);

/// "<stem>.report.json" next to the CSV.
std::filesystem::path report_path_for(const std::filesystem::path& csv_path);

}  // namespace rndunit
