#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "patchdyn/bifurcation.hpp"
#include "patchdyn/integrate.hpp"
#include "patchdyn/types.hpp"

namespace patchdyn {

enum class OutFormat { csv, ndjson };

struct CliOptions {
  std::string config_path;
  std::string out_path;  // empty: no machine-readable file
  OutFormat format = OutFormat::csv;
  int jobs = 1;
};

// Everything a run needs, parsed from one flat "section.key = value" file.
// Environment variables are never consulted.
struct RunConfig {
  ModelParams model;
  IntegrationConfig integration;
  bool has_initial = false;
  State4 initial;
  int grid_density = 30;
  EquilibriumFamily family = EquilibriumFamily::full_interior;
  int source_patch = 1;
  double s_min = 0.0, s_max = 0.99;
  int s_n = 200;
  AxisSpec axis1{"s", 0.0, 0.99, 150};
  AxisSpec axis2{"rho1", 0.1, 15.0, 150};
};

// Parses and schema-validates the config for the given command. Unknown
// keys are errors; the error string names the offending key or field.
struct ConfigResult {
  std::optional<RunConfig> config;
  std::string error;
};
ConfigResult load_config(const std::string& path, const std::string& command);

// Shortest decimal that parses back to exactly the same double (at most 17
// significant digits), so emitted files diff cleanly and reload losslessly.
std::string render_double(double v);

// Rectangular payload plus footer records (summary lines, failure markers).
// CSV renders footers as '#' comment lines; NDJSON as extra objects carrying
// a "record" discriminator.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<std::pair<std::string, std::string>>> footers;
};

bool write_table(const Table& t, const std::string& path, OutFormat format);
std::optional<Table> read_table(const std::string& path, OutFormat format);

// Documented column order / config keys for one subcommand.
std::string schema_text(const std::string& command);

// Subcommand entry points. Exit codes: 0 success, 1 computation failure,
// 2 config error. No output file is written on a config error.
int cmd_classify(const CliOptions& opts, std::ostream& out);
int cmd_equilibria(const CliOptions& opts, std::ostream& out);
int cmd_simulate(const CliOptions& opts, std::ostream& out);
int cmd_sweep1d(const CliOptions& opts, std::ostream& out);
int cmd_sweep2d(const CliOptions& opts, std::ostream& out);

}  // namespace patchdyn
