#pragma once

// Serialization of results: JSON documents, CSV tables and SVG plots.
// Numbers are written with the shortest representation that reads back to
// the same double, so equal results always give equal bytes.

#include "xformtest/analysis.hpp"
#include "xformtest/montecarlo.hpp"
#include "xformtest/testing.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace xformtest {

nlohmann::json to_json(const TestResult& r);

/// Columns: case,statistic,alternative,n,beta,replications,reject_pct,retries,seed
std::string simulation_csv(const SimulationReport& report);
nlohmann::json to_json(const SimulationReport& report);

nlohmann::json to_json(const DescriptiveStats& s);
nlohmann::json to_json(const LinearFit& f);

/// Columns: y,g_hat,g_tilde_hat,g0_hat
std::string grid_csv(const EstimatorGrid& grid);

/// Line plot of the three estimator curves.
std::string grid_svg(const EstimatorGrid& grid);

/// Fits, parametric benchmark, moment comparison, descriptive statistics
/// and the test at the chosen point.
nlohmann::json to_json(const AnalysisResult& r, const AnalysisOptions& opts);

/// Human-readable moment comparison, six significant digits.
std::string moment_table(const AnalysisResult& r);

struct NamedSample {
    std::string name;
    const Sample* sample;
};

/// Untrimmed quartic kernel density of each sample on `points` evenly spaced
/// abscissae spanning all samples, bandwidth sd * n^(-1/5).
/// Columns: sample,x,density
std::string density_csv(const std::vector<NamedSample>& samples, std::size_t points = 200);

}  // namespace xformtest
