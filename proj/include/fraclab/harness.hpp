#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/funcspace.hpp"
#include "fraclab/quadrature_spec.hpp"
#include "fraclab/report.hpp"

namespace fraclab {

enum class Experiment { deriv_limits, lap_limits, maximal_ratios, weight_scan, ftfc, semigroup_suite, oracle_xcheck };

const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& s);

/// Which end of the order interval a limit sweep reports.
///   one:  error to f' (derivatives) or to -Laplacian f
///   zero: error to f
///   both: every metric the sweep produces, lp and sup
enum class LimitEnd { one, zero, both };

struct GridConfig {
  std::size_t dim = 1;
  double lo = -4.0;
  double hi = 4.0;
  std::size_t points = 33;
  /// Evaluation window; unset means the whole grid.
  std::optional<Window> window;
  /// Averaging scales 2^j, j in [jmin, jmax].
  int lattice_jmin = -6;
  int lattice_jmax = 6;
  /// Grid nodes per length scale for ftfc.
  double points_per_scale = 32.0;
  /// weight_scan: number of randomly chosen lattice centers (0 = every node).
  std::size_t sample_centers = 0;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::deriv_limits;
  std::string function = "gaussian";
  std::string weight = "constant";
  double p = 2.0;
  std::vector<double> orders;
  LimitEnd limit = LimitEnd::one;
  /// lap_limits, oracle_xcheck: semigroup, pv or spectral.
  std::string method = "semigroup";
  GridConfig grid;
  QuadratureSpec quad;
  std::string output;         // empty: standard output
  std::string format = "csv";  // csv or json
  bool record_runtime = false;
  std::uint64_t seed = 0;

  /// ConfigInvalid on unknown names, p < 1, orders outside (0,1), bad grids.
  void validate() const;
};

/// INI-style text: [experiment], [grid], [quadrature], [output] sections of
/// key = value lines. Lists are comma separated. ConfigInvalid on unknown
/// sections or keys and on malformed values.
ExperimentConfig parse_config(const std::string& text);
/// IoError when the file cannot be read.
ExperimentConfig load_config(const std::string& path);
/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const ExperimentConfig& c);

/// Runs the experiment. Rows are sorted by order; metadata echoes the whole
/// config, the grid and the artifact version. Module errors are rethrown
/// with the experiment name prepended to the message.
SweepReport run(const ExperimentConfig& config);

enum class ReportFormat { csv, json };
ReportFormat parse_format(const std::string& s);

/// CSV: header "order,metric,value,error" plus one line per row (RFC 4180
/// quoting); metadata is JSON-only. JSON: {"metadata": {...}, "rows": [...]}.
/// IoError on non-finite values.
std::string emit(const SweepReport& report, ReportFormat format);
/// Inverse of emit. IoError on malformed input.
SweepReport parse_report(const std::string& text, ReportFormat format);
/// Writes emit(report, format) to path. IoError when the file cannot be written.
void write_report(const SweepReport& report, ReportFormat format, const std::string& path);

/// Artifact version recorded in every report.
const char* artifact_version();

/// Command line entry point. Exit 0 on success, 1 on configuration or usage
/// errors, 2 on numerical non-convergence. Diagnostics go to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace fraclab
