// tscale: command-line front end over the libtscale C interface.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tscale/tscale.h"

namespace {

int finish(tscale_status status) {
  if (status == TSCALE_OK) {
    std::fputs(tscale_last_output(), stdout);
  } else {
    std::fprintf(stderr, "tscale: %s\n", tscale_last_error());
  }
  return tscale_exit_code(status);
}

std::vector<const char*> c_strings(const std::vector<std::string>& xs) {
  std::vector<const char*> out;
  for (const auto& x : xs) out.push_back(x.c_str());
  return out;
}

char delimiter_of(const std::string& s) {
  if (s == "tab" || s == "\\t") return '\t';
  if (s == "space" || s == "whitespace") return ' ';
  if (s.size() != 1) throw CLI::ValidationError("--delimiter", "expected one character, 'tab' or 'space'");
  return s.front();
}

// Flags that map onto configuration keys; unset flags leave the file alone.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> intervals;
  std::optional<std::string> output;
  std::optional<std::vector<std::string>> selectors;
  std::optional<std::string> task;
  std::optional<double> beta;
  std::optional<std::size_t> truncation;
  std::optional<std::string> katz_mode;
  std::optional<std::string> new_links;
  std::optional<std::string> m;
  std::optional<std::string> b;
  std::optional<double> alpha;
  bool carry_over = false;
  std::optional<double> theta;
  std::optional<std::size_t> batch_size;
  std::optional<double> variance_floor;
  std::optional<double> tau;
  std::optional<double> epsilon;
  std::optional<std::size_t> consecutive;
  std::optional<std::size_t> max_sweeps;

  void attach(CLI::App* app, bool with_task) {
    app->add_option("--seed", seed, "master RNG seed");
    app->add_option("--jobs,-j", jobs, "parallel cells (default: logical cores)");
    app->add_option("--intervals", intervals, "number of consecutive intervals");
    app->add_option("--output,-o", output, "output directory");
    app->add_option("--selectors", selectors, "selector names");
    if (with_task) app->add_option("--task", task, "linkpred, attribute or changepoint");
    app->add_option("--beta", beta, "Katz damping");
    app->add_option("--truncation", truncation, "Katz path length cap");
    app->add_option("--katz-mode", katz_mode, "exact, truncated or auto");
    app->add_option("--new-links", new_links, "windowed or raw");
    app->add_option("--M", m, "minimum tests per size (integer or inf)");
    app->add_option("--B", b, "top sizes retested per step (integer or inf)");
    app->add_option("--alpha", alpha, "weighted-mean decay");
    app->add_flag("--carry-over", carry_over, "keep the ledger across train/test pairs");
    app->add_option("--theta", theta, "TVRC kernel parameter");
    app->add_option("--batch-size", batch_size, "leave-out batch size (0 = default)");
    app->add_option("--variance-floor", variance_floor, "Gaussian variance floor");
    app->add_option("--tau", tau, "Jaccard plateau threshold");
    app->add_option("--epsilon", epsilon, "ADAGE relative tolerance");
    app->add_option("--consecutive", consecutive, "ADAGE converged increments");
    app->add_option("--max-sweeps", max_sweeps, "Graphscope local-search sweeps");
  }

  std::string patch() const {
    nlohmann::json j = nlohmann::json::object();
    auto count = [](const std::string& s) {
      if (s == "inf") return nlohmann::json(s);
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw CLI::ValidationError("--M/--B", "expected a positive integer or 'inf', got '" + s + "'");
      }
      return nlohmann::json(std::stoull(s));
    };
    if (seed) j["seed"] = *seed;
    if (jobs) j["jobs"] = *jobs;
    if (intervals) j["intervals"] = *intervals;
    if (output) j["output"] = *output;
    if (selectors) j["selectors"] = *selectors;
    if (task) j["task"] = *task;
    if (beta) j["katz"]["beta"] = *beta;
    if (truncation) j["katz"]["truncation"] = *truncation;
    if (katz_mode) j["katz"]["mode"] = *katz_mode;
    if (new_links) j["katz"]["new_links"] = *new_links;
    if (m) j["online"]["M"] = count(*m);
    if (b) j["online"]["B"] = count(*b);
    if (alpha) j["online"]["alpha"] = *alpha;
    if (carry_over) j["online"]["carry_over"] = true;
    if (theta) j["tvrc"]["theta"] = *theta;
    if (batch_size) j["tvrc"]["batch_size"] = *batch_size;
    if (variance_floor) j["tvrc"]["variance_floor"] = *variance_floor;
    if (tau) j["jaccard"]["tau"] = *tau;
    if (epsilon) j["adage"]["epsilon"] = *epsilon;
    if (consecutive) j["adage"]["consecutive"] = *consecutive;
    if (max_sweeps) j["graphscope"]["max_sweeps"] = *max_sweeps;
    return j.dump();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-supervised window-size selection for dynamic networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tscale_version()));

  std::vector<std::string> inputs;
  std::string config;
  std::string out;
  std::string delimiter = ",";
  std::int64_t resolution = 1;
  std::optional<std::int64_t> origin;
  std::optional<std::string> sweep_task;
  Overrides overrides;

  auto* ingest = app.add_subcommand("ingest", "parse edge streams and write a binned archive");
  ingest->add_option("inputs", inputs, "edge files (src,dst,time)")->required();
  ingest->add_option("--resolution,-r", resolution, "bin width in timestamp units");
  ingest->add_option("--delimiter,-d", delimiter, "field separator (',', 'tab', 'space')");
  ingest->add_option("--origin", origin, "first bin start (default: earliest timestamp)");
  ingest->add_option("--output,-o", out, "archive directory")->required();

  auto* sweep = app.add_subcommand("sweep", "score every uniform window size on every interval");
  sweep->add_option("config", config, "run configuration (JSON)")->required();
  sweep->add_option("--task", sweep_task, "task to sweep instead of the configured one");

  auto* select = app.add_subcommand("select", "windowing chosen by each selector on the whole sequence");
  select->add_option("config", config, "run configuration (JSON)")->required();

  auto* evaluate = app.add_subcommand("evaluate", "run the train/test protocol and write a report");
  evaluate->add_option("config", config, "run configuration (JSON)")->required();

  for (auto* cmd : {sweep, select, evaluate}) overrides.attach(cmd, cmd != sweep);

  auto* analyze = app.add_subcommand("analyze", "cross-task tables from score-curve files");
  analyze->add_option("curves", inputs, "curves_<task>.json files")->required();
  analyze->add_option("--output,-o", out, "output directory")->required();

  auto* report = app.add_subcommand("report", "aggregate table from report files");
  report->add_option("reports", inputs, "report.json files")->required();
  report->add_option("--output,-o", out, "CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto paths = c_strings(inputs);
  if (*ingest) {
    char delim = ',';
    try {
      delim = delimiter_of(delimiter);
    } catch (const CLI::Error& e) {
      std::fprintf(stderr, "tscale: %s\n", e.what());
      return 1;
    }
    return finish(tscale_cmd_ingest(paths.data(), paths.size(), resolution, delim, origin.has_value(),
                                    origin.value_or(0), out.c_str()));
  }
  std::string patch;
  try {
    patch = overrides.patch();
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "tscale: %s\n", e.what());
    return 1;
  }
  if (*sweep) return finish(tscale_cmd_sweep(config.c_str(), sweep_task ? sweep_task->c_str() : nullptr, patch.c_str()));
  if (*select) return finish(tscale_cmd_select(config.c_str(), patch.c_str()));
  if (*evaluate) return finish(tscale_cmd_evaluate(config.c_str(), patch.c_str()));
  if (*analyze) return finish(tscale_cmd_analyze(paths.data(), paths.size(), out.c_str()));
  if (*report) return finish(tscale_cmd_report(paths.data(), paths.size(), out.empty() ? nullptr : out.c_str()));
  return 1;
}
