#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "warplab/config.hpp"
#include "warplab/geometry.hpp"
#include "warplab/svg.hpp"
#include "warplab/verify.hpp"

namespace warplab {

using Cell = std::variant<std::monostate, double, std::string>;

/// Fixed-column table. The first `keys` columns identify a row.
struct Table {
  std::vector<std::string> columns;
  std::size_t keys = 1;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  std::string to_csv() const;
};

std::string format_number(double v);
std::string format_cell(const Cell& c);

struct Section {
  std::string name;
  Verdict verdict = Verdict::report_only;
  std::string offending;
  nlohmann::json detail = nlohmann::json::object();
};

struct PlotSpec {
  std::string file;  ///< relative to plots/
  svg::LineChart chart;
};

struct CommandResult {
  std::string command;
  std::string skipped;  ///< reason, when the command does not apply to the profile
  std::vector<Section> sections;
  Table table;
  std::vector<PlotSpec> plots;

  bool violated() const;
};

struct RunResult {
  RunConfig config;
  std::shared_ptr<const ModelManifold> model;
  std::vector<CommandResult> commands;

  bool violated() const;
  int exit_status() const { return violated() ? 1 : 0; }
};

/// Runs one command (not "all"). Throws ConfigurationError when the command
/// does not apply to the configured profile.
CommandResult run_command(const std::string& command, const RunConfig& cfg,
                          std::shared_ptr<const ModelManifold> model);
RunResult run(const RunConfig& cfg, std::ostream* log = nullptr);

nlohmann::json report_json(const RunResult& r);
/// records.csv: the command's table, or for "all" the tidy form
/// (command, label, field, value).
std::string records_csv(const RunResult& r);

/// Writes manifest.json, model.json, report.json, records.csv (plus
/// records_<command>.csv for "all") and, with plot, plots/*.svg.
void write_bundle(const RunResult& r, const std::string& started_utc, double elapsed_seconds);

/// run + write_bundle with a summary on log. Returns the exit status.
int execute(const RunConfig& cfg, std::ostream& log);

std::string utc_now();

}  // namespace warplab
