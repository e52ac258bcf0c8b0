#include "rndunit/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "rndunit/channel.hpp"
#include "rndunit/error.hpp"

namespace rndunit {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ScenarioParseError(field + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(context.empty() ? key : context + "." + key, "missing field");
  return *it;
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "must be finite");
  return x;
}

std::size_t as_count(const json& v, const std::string& field) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(field, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < 0) fail(field, "must be nonnegative");
  return static_cast<std::size_t>(x);
}

Complex as_complex(const json& v, const std::string& field) {
  if (v.is_number()) return {as_number(v, field), 0.0};
  if (v.is_array() && v.size() == 2) {
    return {as_number(v[0], field + "[0]"), as_number(v[1], field + "[1]")};
  }
  fail(field, "expected a number or a [re, im] pair");
}

ComplexMatrix as_matrix(const json& v, std::size_t dim, const std::string& field) {
  if (!v.is_array() || v.size() != dim) {
    fail(field, "expected " + std::to_string(dim) + " rows");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string row_field = field + "[" + std::to_string(i) + "]";
    const json& row = v[i];
    if (!row.is_array() || row.size() != dim) {
      fail(row_field, "expected " + std::to_string(dim) + " entries");
    }
    for (std::size_t j = 0; j < dim; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          as_complex(row[j], row_field + "[" + std::to_string(j) + "]");
    }
  }
  return m;
}

// Wraps library validation errors with the document field they came from.
template <class F>
auto with_field(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ScenarioParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(field + ": " + e.what());
  }
}

HermitianOperator as_hermitian(const json& v, std::size_t dim, const std::string& field) {
  ComplexMatrix m = as_matrix(v, dim, field);
  return with_field(field, [&] { return HermitianOperator(std::move(m)); });
}

EnsembleSpec parse_ensemble_spec(const json& v, std::size_t dim) {
  if (!v.is_object()) fail("ensemble", "expected an object");
  const json& type_field = require(v, "type", "ensemble");
  if (!type_field.is_string()) fail("ensemble.type", "expected a string");
  const std::string type = type_field.get<std::string>();

  if (type == "explicit") {
    const json& list = require(v, "realizations", "ensemble");
    if (!list.is_array() || list.empty()) {
      fail("ensemble.realizations", "expected a non-empty array");
    }
    ExplicitEnsembleSpec spec;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string field = "ensemble.realizations[" + std::to_string(k) + "]";
      if (!list[k].is_object()) fail(field, "expected an object");
      spec.realizations.push_back(
          {as_hermitian(require(list[k], "hamiltonian", field), dim, field + ".hamiltonian"),
           as_number(require(list[k], "weight", field), field + ".weight")});
    }
    return spec;
  }
  if (type == "gaussian") {
    GaussianEnsembleSpec spec{as_hermitian(require(v, "base", "ensemble"), dim, "ensemble.base"),
                              as_number(require(v, "sigma", "ensemble"), "ensemble.sigma"),
                              as_count(require(v, "n_nodes", "ensemble"), "ensemble.n_nodes"),
                              std::nullopt};
    if (const auto it = v.find("sampling"); it != v.end()) {
      if (!it->is_string()) fail("ensemble.sampling", "expected a string");
      const std::string sampling = it->get<std::string>();
      if (sampling == "monte_carlo") {
        spec.monte_carlo_samples =
            as_count(require(v, "n_samples", "ensemble"), "ensemble.n_samples");
      } else if (sampling != "quadrature") {
        fail("ensemble.sampling", "expected \"quadrature\" or \"monte_carlo\"");
      }
    }
    return spec;
  }
  if (type == "two_point") {
    return TwoPointEnsembleSpec{
        as_hermitian(require(v, "base", "ensemble"), dim, "ensemble.base"),
        as_number(require(v, "g", "ensemble"), "ensemble.g")};
  }
  fail("ensemble.type", "unknown ensemble type \"" + type +
                            "\" (expected explicit, gaussian or two_point)");
}

DisorderEnsemble realize(const EnsembleSpec& spec, std::uint64_t seed) {
  return with_field("ensemble", [&]() -> DisorderEnsemble {
    if (const auto* e = std::get_if<ExplicitEnsembleSpec>(&spec)) {
      return DisorderEnsemble(e->realizations);
    }
    if (const auto* g = std::get_if<GaussianEnsembleSpec>(&spec)) {
      if (g->monte_carlo_samples) {
        return monte_carlo_gaussian_ensemble(g->base, g->sigma, *g->monte_carlo_samples, seed);
      }
      return gauss_hermite_ensemble(g->base, g->sigma, g->n_nodes);
    }
    const auto& tp = std::get<TwoPointEnsembleSpec>(spec);
    return two_point_ensemble(tp.base, tp.g);
  });
}

std::vector<GeneratorKind> parse_generators(const json& v) {
  if (!v.is_array()) fail("generators", "expected an array");
  std::vector<GeneratorKind> out;
  auto add = [&](GeneratorKind kind, const std::string& field) {
    for (const auto& existing : out) {
      if (existing.index() == kind.index()) fail(field, "generator listed twice");
    }
    out.push_back(kind);
  };
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string field = "generators[" + std::to_string(k) + "]";
    const json& item = v[k];
    if (item.is_string()) {
      const std::string name = item.get<std::string>();
      if (name == "redfield") {
        add(Redfield{}, field);
      } else if (name == "dephasing") {
        add(Dephasing{}, field);
      } else if (name == "gksl") {
        add(Gksl{}, field);
      } else {
        fail(field, "unknown generator \"" + name + "\"");
      }
    } else if (item.is_object() && item.size() == 1 && item.contains("gksl")) {
      const json& opts = item["gksl"];
      Gksl g;
      if (opts.is_object()) {
        if (const auto it = opts.find("epsilon"); it != opts.end()) {
          g.epsilon = as_number(*it, field + ".gksl.epsilon");
        }
      } else if (!opts.is_null()) {
        fail(field + ".gksl", "expected an object");
      }
      if (g.epsilon < 0.0) fail(field + ".gksl.epsilon", "must be >= 0");
      add(g, field);
    } else {
      fail(field, "expected \"redfield\", \"dephasing\", \"gksl\" or {\"gksl\": {...}}");
    }
  }
  std::sort(out.begin(), out.end(),
            [](const GeneratorKind& a, const GeneratorKind& b) { return a.index() < b.index(); });
  return out;
}

std::pair<DensityMatrix, std::string> parse_rho0(const json& v, std::size_t dim,
                                                 const HermitianOperator& effective_hs) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    const auto n = static_cast<Eigen::Index>(dim);
    if (name == "plus") {
      return {DensityMatrix::pure(Eigen::VectorXcd::Ones(n)), name};
    }
    if (name == "ground") {
      return {DensityMatrix::pure(herm_eig(effective_hs).basis.matrix().col(0)), name};
    }
    if (name == "maximally_mixed") return {DensityMatrix::maximally_mixed(dim), name};
    fail("rho0", "unknown preset \"" + name + "\" (expected plus, ground or maximally_mixed)");
  }
  ComplexMatrix m = as_matrix(v, dim, "rho0");
  return {with_field("rho0", [&] { return DensityMatrix(std::move(m)); }), "literal"};
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string describe_matrix(const ComplexMatrix& m) {
  std::ostringstream out;
  out << "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << (i ? ", [" : "[");
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ", ";
      out << format_double(m(i, j).real());
      if (m(i, j).imag() != 0.0) out << (m(i, j).imag() < 0 ? "-" : "+") << format_double(std::abs(m(i, j).imag())) << "i";
    }
    out << "]";
  }
  out << "]";
  return out.str();
}

json matrix_json(std::initializer_list<std::initializer_list<double>> rows) {
  json m = json::array();
  for (const auto& row : rows) {
    json r = json::array();
    for (double x : row) r.push_back(json::array({x, 0.0}));
    m.push_back(r);
  }
  return m;
}

}  // namespace

Scenario parse_scenario(json document, const ScenarioOverrides& overrides) {
  if (!document.is_object()) fail("scenario", "document must be a JSON object");
  if (overrides.output_path) document["output_path"] = *overrides.output_path;
  if (overrides.dt) document["dt"] = *overrides.dt;
  if (overrides.t_final) document["t_final"] = *overrides.t_final;
  if (overrides.seed) document["seed"] = *overrides.seed;

  const json& name_field = require(document, "name", "");
  if (!name_field.is_string() || name_field.get<std::string>().empty()) {
    fail("name", "expected a non-empty string");
  }
  const std::string name = name_field.get<std::string>();
  const std::size_t dim = as_count(require(document, "dim", ""), "dim");
  if (dim == 0) fail("dim", "must be positive");

  HermitianOperator hs = as_hermitian(require(document, "hs", ""), dim, "hs");
  EnsembleSpec spec = parse_ensemble_spec(require(document, "ensemble", ""), dim);

  std::uint64_t seed = 0;
  if (const auto it = document.find("seed"); it != document.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer()) fail("seed", "expected an integer");
    if (it->is_number_integer() && it->get<std::int64_t>() < 0) fail("seed", "must be >= 0");
    seed = it->get<std::uint64_t>();
  }

  DisorderEnsemble ensemble = realize(spec, seed);
  CenteredEnsemble centered = center(ensemble);
  HermitianOperator effective_hs = hs + centered.mean;

  std::vector<std::string> log;
  if (max_abs(centered.mean.matrix()) > 0.0) {
    log.push_back("centered the ensemble: removed weighted mean " +
                  describe_matrix(centered.mean.matrix()) +
                  " from every realization and added it to hs");
  } else {
    log.push_back("ensemble already has zero weighted mean; hs unchanged");
  }

  auto [rho0, rho0_label] = parse_rho0(require(document, "rho0", ""), dim, effective_hs);

  const double t_final = as_number(require(document, "t_final", ""), "t_final");
  const double dt = as_number(require(document, "dt", ""), "dt");
  if (!(dt > 0.0)) fail("dt", "must be > 0");
  if (!(t_final >= 0.0)) fail("t_final", "must be >= 0");

  std::vector<GeneratorKind> generators;
  if (const auto it = document.find("generators"); it != document.end()) {
    generators = parse_generators(*it);
  }

  std::string output_path = name + ".csv";
  if (const auto it = document.find("output_path"); it != document.end()) {
    if (!it->is_string() || it->get<std::string>().empty()) {
      fail("output_path", "expected a non-empty string");
    }
    output_path = it->get<std::string>();
  }

  double threshold = kDefaultBreakdownThreshold;
  if (const auto it = document.find("breakdown_threshold"); it != document.end()) {
    threshold = as_number(*it, "breakdown_threshold");
    if (!(threshold > 0.0)) fail("breakdown_threshold", "must be > 0");
  }

  return Scenario{.name = name,
                  .dim = dim,
                  .hs = std::move(hs),
                  .ensemble_spec = std::move(spec),
                  .ensemble = std::move(ensemble),
                  .mean = std::move(centered.mean),
                  .effective_hs = std::move(effective_hs),
                  .centered = std::move(centered.ensemble),
                  .rho0 = std::move(rho0),
                  .rho0_label = std::move(rho0_label),
                  .t_final = t_final,
                  .dt = dt,
                  .generators = std::move(generators),
                  .seed = seed,
                  .output_path = std::move(output_path),
                  .breakdown_threshold = threshold,
                  .document = std::move(document),
                  .log = std::move(log)};
}

Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ScenarioParseError(path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
  try {
    return parse_scenario(std::move(document), overrides);
  } catch (const ValidationError& e) {
    throw ScenarioParseError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> demo_names() {
  return {"gaussian-dephasing", "two-point-breakdown", "gksl-qubit"};
}

json demo_scenario(std::string_view name) {
  const json half_sz = matrix_json({{0.5, 0.0}, {0.0, -0.5}});
  const json sz = matrix_json({{1.0, 0.0}, {0.0, -1.0}});
  const json sx = matrix_json({{0.0, 1.0}, {1.0, 0.0}});
  if (name == "gaussian-dephasing") {
    return json{{"name", "gaussian-dephasing"},
                {"dim", 2},
                {"hs", half_sz},
                {"ensemble", {{"type", "gaussian"}, {"base", sz}, {"sigma", 0.2}, {"n_nodes", 32}}},
                {"rho0", "plus"},
                {"t_final", 10.0},
                {"dt", 0.01},
                {"generators", {"dephasing", "redfield"}},
                {"seed", 1},
                {"output_path", "gaussian-dephasing.csv"}};
  }
  if (name == "two-point-breakdown") {
    return json{{"name", "two-point-breakdown"},
                {"dim", 2},
                {"hs", half_sz},
                {"ensemble", {{"type", "two_point"}, {"base", sz}, {"g", 0.5}}},
                {"rho0", "plus"},
                {"t_final", 4.0},
                {"dt", 0.01},
                {"generators", {"dephasing", "redfield"}},
                {"seed", 1},
                {"output_path", "two-point-breakdown.csv"}};
  }
  if (name == "gksl-qubit") {
    return json{{"name", "gksl-qubit"},
                {"dim", 2},
                {"hs", half_sz},
                {"ensemble", {{"type", "gaussian"}, {"base", sx}, {"sigma", 0.05}, {"n_nodes", 16}}},
                {"rho0", "plus"},
                {"t_final", 20.0},
                {"dt", 0.01},
                {"generators", json::array({"redfield", json{{"gksl", {{"epsilon", 0.0}}}}})},
                {"seed", 1},
                {"output_path", "gksl-qubit.csv"}};
  }
  std::string known;
  for (const auto& n : demo_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown demo \"" + std::string(name) + "\" (available: " + known + ")");
}

RunRecord run(const Scenario& s) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.scenario_name = s.name;
  record.tool_version = std::string(kToolVersion);
  record.configuration = s.document;
  record.log = s.log;

  const std::vector<double> times = time_grid(s.t_final, s.dt);

  // Exact channel from the Hamiltonians as written; the embedding below uses
  // the centered form, so the cross-check also covers the centering step.
  TimeSeries exact{times, evolve_average_series(s.hs, s.ensemble, s.rho0, times)};

  const EmbeddedSystem embedded = embed(s.effective_hs, s.centered);
  constexpr std::size_t kCheckpoints = 101;
  std::vector<std::size_t> picks;
  if (times.size() <= kCheckpoints) {
    for (std::size_t k = 0; k < times.size(); ++k) picks.push_back(k);
  } else {
    for (std::size_t i = 0; i < kCheckpoints; ++i) {
      picks.push_back(static_cast<std::size_t>(std::llround(
          static_cast<double>(i) * static_cast<double>(times.size() - 1) / (kCheckpoints - 1))));
    }
  }
  std::vector<double> check_times;
  for (std::size_t k : picks) check_times.push_back(times[k]);
  const auto embedded_states = evolve_embedded_series(embedded, s.rho0, check_times);
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const double dist = trace_distance(exact.states[picks[i]], embedded_states[i]);
    record.embedding_max_distance = std::max(record.embedding_max_distance, dist);
    if (dist > kEmbeddingTolerance) {
      throw NumericalError("ensemble-average and embedded dynamics disagree at t = " +
                           format_double(check_times[i]) + " (trace distance " +
                           format_double(dist) + ")");
    }
  }
  record.embedding_checkpoints = picks.size();
  record.series.push_back({"exact", std::move(exact), std::nullopt});

  for (const auto& kind : s.generators) {
    const std::string name = generator_name(kind);
    MasterEqProblem problem = with_field("generators." + name, [&] {
      return MasterEqProblem(s.effective_hs, s.centered, kind);
    });
    if (auto warning = step_size_warning(problem, s.dt)) {
      record.warnings.push_back(name + ": " + *warning);
    }
    TimeSeries series = integrate(problem, s.rho0, s.t_final, s.dt);
    ComparisonReport report = compare(record.series.front().series, series, s.breakdown_threshold);
    record.series.push_back({name, std::move(series), std::move(report)});
  }

  record.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

std::string csv_header(const RunRecord& record) {
  std::string header = "t";
  for (const auto& sr : record.series) {
    const auto d = sr.series.states.empty() ? 0 : sr.series.states.front().matrix().rows();
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const std::string base = "," + sr.name + "_rho_" + std::to_string(i) + "_" + std::to_string(j);
        header += base + "_re" + base + "_im";
      }
    }
    header += "," + sr.name + "_purity," + sr.name + "_trace_distance";
  }
  return header;
}

void write_csv(const RunRecord& record, const std::filesystem::path& path) {
  if (record.series.empty()) throw ValidationError("write_csv: record has no series");
  const TimeSeries& exact = record.series.front().series;
  for (const auto& sr : record.series) {
    if (sr.series.size() != exact.size()) {
      throw ValidationError("write_csv: series \"" + sr.name + "\" has a different length");
    }
  }

  std::string out = csv_header(record);
  out += '\n';
  for (std::size_t k = 0; k < exact.size(); ++k) {
    out += format_double(exact.times[k]);
    for (const auto& sr : record.series) {
      const DensityMatrix& rho = sr.series.states[k];
      const ComplexMatrix& m = rho.matrix();
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          out += ',';
          out += format_double(m(i, j).real());
          out += ',';
          out += format_double(m(i, j).imag());
        }
      }
      out += ',';
      out += format_double(purity(rho));
      out += ',';
      out += format_double(sr.report ? sr.report->trace_distances[k] : 0.0);
    }
    out += '\n';
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << out;
  if (!file) throw std::runtime_error("failed writing " + path.string());
}

json report_json(const RunRecord& record) {
  json generators = json::object();
  for (const auto& sr : record.series) {
    if (!sr.report) continue;
    generators[sr.name] = {
        {"max_trace_distance", sr.report->max_error},
        {"breakdown_time",
         sr.report->breakdown_time ? json(*sr.report->breakdown_time) : json(nullptr)},
    };
  }
  return json{{"scenario", record.scenario_name},
              {"tool_version", record.tool_version},
              {"wall_time_seconds", record.wall_time_seconds},
              {"samples", record.series.empty() ? std::size_t{0} : record.series.front().series.size()},
              {"embedding_check",
               {{"max_trace_distance", record.embedding_max_distance},
                {"checkpoints", record.embedding_checkpoints},
                {"tolerance", kEmbeddingTolerance}}},
              {"generators", generators},
              {"warnings", record.warnings},
              {"log", record.log},
              {"configuration", record.configuration}};
}

void write_report(const RunRecord& record, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << report_json(record).dump(2) << '\n';
  if (!file) throw std::runtime_error("failed writing " + path.string());
}

std::filesystem::path report_path_for(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".report.json");
  return p;
}

}  // namespace rndunit
