#include "tscale/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "tscale/errors.hpp"
#include "tscale/metrics.hpp"

namespace tscale {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

std::string stamp_line(const std::string& hash, std::uint64_t seed) {
  return "# config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : ""; }

// Re-raises a parse error with the offending file in front of the line.
[[noreturn]] void rethrow_with_path(const ParseError& e, const fs::path& path) {
  std::string msg = e.what();
  const std::string prefix = "line " + std::to_string(e.line()) + ": ";
  if (e.line() && msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  throw ValidationError(path.string() + ":" + (e.line() ? std::to_string(e.line()) + ": " : std::string(" ")) + msg);
}

// Collects every configuration problem before reporting.
class Reader {
 public:
  std::vector<std::string> errors;

  void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        errors.push_back(where + ": unknown key '" + key + "'");
      }
    }
  }

  template <class T>
  std::optional<T> get(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      errors.push_back(where + "." + key + ": wrong type");
      return std::nullopt;
    }
  }

  const json* object(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) return nullptr;
    if (!obj.at(key).is_object()) {
      errors.push_back(where + "." + key + ": expected an object");
      return nullptr;
    }
    return &obj.at(key);
  }

  std::size_t count_or_unlimited(const json& obj, const std::string& where, const char* key, std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "unlimited")) return kUnlimited;
    if (v.is_number_unsigned() && v.get<std::size_t>() >= 1) return v.get<std::size_t>();
    errors.push_back(where + "." + key + ": expected a positive integer or \"inf\"");
    return fallback;
  }
};

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

void parse_dataset(Reader& r, const json& d, const fs::path& base, DatasetConfig& out) {
  r.check_keys(d, "dataset",
               {"id", "edges", "archive", "resolution", "origin", "delimiter", "attributes", "target", "continuous",
                "positive", "change_points"});
  if (d.contains("edges")) {
    const auto& e = d.at("edges");
    if (e.is_string()) {
      out.edges.push_back(resolve(base, e.get<std::string>()));
    } else if (e.is_array() && std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_string(); })) {
      for (const auto& x : e) out.edges.push_back(resolve(base, x.get<std::string>()));
    } else {
      r.errors.push_back("dataset.edges: expected a path or a list of paths");
    }
  }
  if (auto a = r.get<std::string>(d, "dataset", "archive")) out.archive = resolve(base, *a);
  if (out.edges.empty() == !out.archive.has_value()) {
    r.errors.push_back("dataset: give exactly one of 'edges' or 'archive'");
  }
  for (const auto& p : out.edges) {
    if (!fs::exists(p)) r.errors.push_back("dataset.edges: file not found: " + p.string());
  }
  if (out.archive && !fs::exists(*out.archive / "manifest.json")) {
    r.errors.push_back("dataset.archive: no manifest.json in " + out.archive->string());
  }
  if (auto res = r.get<std::int64_t>(d, "dataset", "resolution")) {
    if (*res < 1) r.errors.push_back("dataset.resolution: must be at least 1");
    out.resolution = *res;
  }
  out.origin = r.get<std::int64_t>(d, "dataset", "origin");
  if (auto delim = r.get<std::string>(d, "dataset", "delimiter")) {
    if (*delim == "tab" || *delim == "\t") {
      out.delimiter = '\t';
    } else if (*delim == "space" || *delim == " ") {
      out.delimiter = ' ';
    } else if (delim->size() == 1) {
      out.delimiter = delim->front();
    } else {
      r.errors.push_back("dataset.delimiter: expected a single character, \"tab\" or \"space\"");
    }
  }
  if (auto a = r.get<std::string>(d, "dataset", "attributes")) {
    out.attributes = resolve(base, *a);
    if (!fs::exists(*out.attributes)) r.errors.push_back("dataset.attributes: file not found: " + out.attributes->string());
    auto target = r.get<std::string>(d, "dataset", "target");
    if (!target || target->empty()) r.errors.push_back("dataset.target: required with 'attributes'");
    out.target = target.value_or("");
  }
  if (auto c = r.get<std::vector<std::string>>(d, "dataset", "continuous")) out.continuous = *c;
  out.positive = r.get<std::string>(d, "dataset", "positive");
  if (auto c = r.get<std::string>(d, "dataset", "change_points")) {
    out.change_points = resolve(base, *c);
    if (!fs::exists(*out.change_points)) {
      r.errors.push_back("dataset.change_points: file not found: " + out.change_points->string());
    }
  }
  if (auto id = r.get<std::string>(d, "dataset", "id")) {
    out.id = *id;
  } else if (!out.edges.empty()) {
    out.id = out.edges.front().stem().string();
  } else if (out.archive) {
    out.id = out.archive->filename().string();
  }
}

std::optional<SelectorKind> selector_or_error(Reader& r, const std::string& where, const std::string& name) {
  auto kind = parse_selector(name);
  if (!kind) {
    r.errors.push_back(where + ": unknown selector '" + name + "' (valid: " + join(selector_names(), ", ") + ")");
  }
  return kind;
}

}  // namespace

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const json& j, const fs::path& base) {
  if (!j.is_object()) throw ValidationError("configuration must be a JSON object");
  Reader r;
  RunConfig cfg;
  // Output location and thread count do not change results.
  json hashed = j;
  hashed.erase("output");
  hashed.erase("jobs");
  cfg.hash = config_hash(hashed);
  r.check_keys(j, "config",
               {"dataset", "task", "selectors", "intervals", "seed", "jobs", "output", "katz", "online", "tvrc",
                "jaccard", "adage", "graphscope", "sweep"});

  if (const auto* d = r.object(j, "config", "dataset")) {
    parse_dataset(r, *d, base, cfg.dataset);
  } else {
    r.errors.push_back("config.dataset: required");
  }

  if (auto t = r.get<std::string>(j, "config", "task")) {
    if (auto task = parse_task(*t)) {
      cfg.task = *task;
    } else {
      r.errors.push_back("config.task: unknown task '" + *t + "' (valid: " + join(task_names(), ", ") + ")");
    }
  } else if (!j.contains("task")) {
    r.errors.push_back("config.task: required");
  }
  if (cfg.task == Task::Attribute && !cfg.dataset.attributes) {
    r.errors.push_back("config.task: 'attribute' needs dataset.attributes");
  }
  if (cfg.task == Task::ChangePoint && !cfg.dataset.change_points) {
    r.errors.push_back("config.task: 'changepoint' needs dataset.change_points");
  }

  if (auto names = r.get<std::vector<std::string>>(j, "config", "selectors")) {
    if (names->empty()) r.errors.push_back("config.selectors: empty list");
    std::set<std::string> seen;
    for (const auto& name : *names) {
      if (!seen.insert(name).second) {
        r.errors.push_back("config.selectors: duplicate '" + name + "'");
        continue;
      }
      if (auto kind = selector_or_error(r, "config.selectors", name)) {
        if (!selector_supports(*kind, cfg.task)) {
          r.errors.push_back("config.selectors: '" + name + "' does not apply to task '" +
                             std::string(task_name(cfg.task)) + "'");
        }
        cfg.selectors.push_back(*kind);
      }
    }
  } else if (!j.contains("selectors")) {
    r.errors.push_back("config.selectors: required");
  }

  if (auto k = r.get<std::size_t>(j, "config", "intervals")) {
    if (*k < 2) r.errors.push_back("config.intervals: need at least 2 intervals for a train/test pair");
    cfg.intervals = *k;
  }
  cfg.params.seed = r.get<std::uint64_t>(j, "config", "seed").value_or(0);
  cfg.params.jobs = r.get<std::size_t>(j, "config", "jobs").value_or(std::max(1u, std::thread::hardware_concurrency()));
  if (cfg.params.jobs == 0) r.errors.push_back("config.jobs: must be at least 1");
  cfg.output = resolve(base, r.get<std::string>(j, "config", "output").value_or("tscale-out"));

  if (const auto* k = r.object(j, "config", "katz")) {
    r.check_keys(*k, "katz", {"beta", "truncation", "mode", "new_links"});
    auto& katz = cfg.params.katz;
    katz.beta = r.get<double>(*k, "katz", "beta").value_or(katz.beta);
    if (!(katz.beta > 0.0 && katz.beta < 1.0)) r.errors.push_back("katz.beta: must lie in (0, 1)");
    katz.truncation = r.get<std::size_t>(*k, "katz", "truncation").value_or(katz.truncation);
    if (katz.truncation < 1) r.errors.push_back("katz.truncation: must be at least 1");
    if (auto mode = r.get<std::string>(*k, "katz", "mode")) {
      if (*mode == "exact") {
        katz.mode = KatzMode::Exact;
      } else if (*mode == "truncated") {
        katz.mode = KatzMode::Truncated;
      } else if (*mode == "auto") {
        katz.mode = KatzMode::Auto;
      } else {
        r.errors.push_back("katz.mode: expected exact, truncated or auto");
      }
    }
    if (auto ref = r.get<std::string>(*k, "katz", "new_links")) {
      if (*ref == "windowed") {
        cfg.params.reference = NewLinkReference::Windowed;
      } else if (*ref == "raw") {
        cfg.params.reference = NewLinkReference::Raw;
      } else {
        r.errors.push_back("katz.new_links: expected windowed or raw");
      }
    }
  }
  if (const auto* o = r.object(j, "config", "online")) {
    r.check_keys(*o, "online", {"M", "B", "alpha", "carry_over"});
    auto& sp = cfg.params.selector;
    sp.min_tests = r.count_or_unlimited(*o, "online", "M", sp.min_tests);
    sp.top_tested = r.count_or_unlimited(*o, "online", "B", sp.top_tested);
    sp.alpha = r.get<double>(*o, "online", "alpha").value_or(sp.alpha);
    if (!(sp.alpha > 0.0 && sp.alpha <= 1.0)) r.errors.push_back("online.alpha: must lie in (0, 1]");
    cfg.params.carry_over = r.get<bool>(*o, "online", "carry_over").value_or(false);
  }
  cfg.params.selector.seed = cfg.params.seed;
  if (const auto* t = r.object(j, "config", "tvrc")) {
    r.check_keys(*t, "tvrc", {"theta", "batch_size", "variance_floor"});
    auto& opts = cfg.params.tvrc;
    opts.kernel.theta = r.get<double>(*t, "tvrc", "theta").value_or(opts.kernel.theta);
    if (!(opts.kernel.theta > 0.0 && opts.kernel.theta < 1.0)) r.errors.push_back("tvrc.theta: must lie in (0, 1)");
    cfg.params.batch_size = r.get<std::size_t>(*t, "tvrc", "batch_size").value_or(0);
    opts.variance_floor = r.get<double>(*t, "tvrc", "variance_floor").value_or(opts.variance_floor);
    if (!(opts.variance_floor > 0.0)) r.errors.push_back("tvrc.variance_floor: must be positive");
  }
  if (const auto* t = r.object(j, "config", "jaccard")) {
    r.check_keys(*t, "jaccard", {"tau"});
    cfg.params.jaccard_tau = r.get<double>(*t, "jaccard", "tau").value_or(cfg.params.jaccard_tau);
    if (!(cfg.params.jaccard_tau > 0.0 && cfg.params.jaccard_tau < 1.0)) r.errors.push_back("jaccard.tau: must lie in (0, 1)");
  }
  if (const auto* a = r.object(j, "config", "adage")) {
    r.check_keys(*a, "adage", {"epsilon", "consecutive"});
    cfg.params.adage.epsilon = r.get<double>(*a, "adage", "epsilon").value_or(cfg.params.adage.epsilon);
    cfg.params.adage.consecutive = r.get<std::size_t>(*a, "adage", "consecutive").value_or(cfg.params.adage.consecutive);
    if (!(cfg.params.adage.epsilon > 0.0)) r.errors.push_back("adage.epsilon: must be positive");
    if (cfg.params.adage.consecutive < 1) r.errors.push_back("adage.consecutive: must be at least 1");
  }
  if (const auto* g = r.object(j, "config", "graphscope")) {
    r.check_keys(*g, "graphscope", {"max_sweeps"});
    cfg.params.graphscope.max_sweeps = r.get<std::size_t>(*g, "graphscope", "max_sweeps").value_or(50);
    if (cfg.params.graphscope.max_sweeps < 1) r.errors.push_back("graphscope.max_sweeps: must be at least 1");
  }
  if (const auto* s = r.object(j, "config", "sweep")) {
    r.check_keys(*s, "sweep", {"M", "B", "fixed", "selector"});
    SweepConfig sweep;
    sweep.m_values = r.get<std::vector<std::size_t>>(*s, "sweep", "M").value_or(std::vector<std::size_t>{});
    sweep.b_values = r.get<std::vector<std::size_t>>(*s, "sweep", "B").value_or(std::vector<std::size_t>{});
    sweep.fixed = r.get<std::size_t>(*s, "sweep", "fixed").value_or(10);
    if (sweep.fixed < 1) r.errors.push_back("sweep.fixed: must be at least 1");
    for (auto v : sweep.m_values) {
      if (v < 1) r.errors.push_back("sweep.M: values must be at least 1");
    }
    for (auto v : sweep.b_values) {
      if (v < 1) r.errors.push_back("sweep.B: values must be at least 1");
    }
    if (auto name = r.get<std::string>(*s, "sweep", "selector")) {
      if (auto kind = selector_or_error(r, "sweep.selector", *name)) {
        if (*kind != SelectorKind::Online && *kind != SelectorKind::OnlineWeighted && *kind != SelectorKind::TrainingOnly) {
          r.errors.push_back("sweep.selector: must be a ledger selector (online, online-weighted, training-only)");
        }
        sweep.selector = *kind;
      }
    }
    if (cfg.task != Task::LinkPrediction) r.errors.push_back("sweep: hyperparameter sweeps apply to task 'linkpred'");
    cfg.sweep = sweep;
  }

  if (!r.errors.empty()) throw ValidationError("invalid configuration:\n  " + join(r.errors, "\n  "));
  return cfg;
}

RunConfig load_config(const fs::path& path, const std::optional<json>& overrides) {
  if (!fs::exists(path)) throw ValidationError("configuration file not found: " + path.string());
  auto j = read_json(path);
  if (overrides) j.merge_patch(*overrides);
  return parse_config(j, path.parent_path());
}

Dataset load_dataset(const DatasetConfig& config) {
  Dataset data;
  data.id = config.id;
  if (config.archive) {
    data.sequence = read_archive(*config.archive);
  } else {
    EdgeListFormat format;
    format.delimiter = config.delimiter;
    ParsedEdges parsed;
    for (const auto& path : config.edges) {
      std::ifstream in(path);
      if (!in) throw IoError("cannot open " + path.string());
      try {
        auto part = parse_edge_stream(in, format, std::move(parsed.labels));
        parsed.events.insert(parsed.events.end(), part.events.begin(), part.events.end());
        parsed.labels = std::move(part.labels);
      } catch (const ParseError& e) {
        rethrow_with_path(e, path);
      }
    }
    data.sequence = bin_initial(parsed, config.resolution, config.origin);
  }
  if (config.attributes) {
    std::ifstream in(*config.attributes);
    if (!in) throw IoError("cannot open " + config.attributes->string());
    AttributeSchema schema;
    schema.continuous = config.continuous;
    schema.positive = config.positive;
    try {
      data.attributes = load_attributes(in, config.target, data.sequence.labels(), schema);
    } catch (const ParseError& e) {
      rethrow_with_path(e, *config.attributes);
    } catch (const ValidationError& e) {
      throw ValidationError(config.attributes->string() + ": " + e.what());
    }
  }
  if (config.change_points) {
    std::ifstream in(*config.change_points);
    if (!in) throw IoError("cannot open " + config.change_points->string());
    try {
      data.change_points = parse_change_points(in, data.sequence.length());
    } catch (const ParseError& e) {
      rethrow_with_path(e, *config.change_points);
    }
  }
  return data;
}

// ---------------------------------------------------------------------------

std::string cmd_ingest(std::span<const fs::path> inputs, Timestamp resolution, char delimiter,
                       std::optional<Timestamp> origin, const fs::path& out_dir) {
  if (inputs.empty()) throw ValidationError("no input files");
  DatasetConfig config;
  for (const auto& p : inputs) {
    if (!fs::exists(p)) throw ValidationError("input file not found: " + p.string());
    config.edges.push_back(p);
  }
  if (resolution < 1) throw ValidationError("resolution must be at least 1");
  config.resolution = resolution;
  config.delimiter = delimiter;
  config.origin = origin;
  const auto data = load_dataset(config);
  const auto& seq = data.sequence;
  write_archive(seq, out_dir);

  std::ostringstream summary;
  summary << "step,start_time,edges\n";
  std::size_t total = 0;
  for (std::size_t i = 1; i <= seq.length(); ++i) {
    const auto edges = seq.at(i).edge_count();
    total += edges;
    summary << i << ',' << seq.origin() + static_cast<Timestamp>(i - 1) * seq.resolution() << ',' << edges << '\n';
  }
  write_text(out_dir / "summary.csv", summary.str());
  std::ostringstream msg;
  msg << "ingested " << inputs.size() << " file(s): n=" << seq.vertex_count() << " T=" << seq.length()
      << " edges=" << total << " -> " << out_dir.string() << '\n';
  return msg.str();
}

namespace {

IntervalPlan plan_for(const RunConfig& config, const Dataset& data) {
  try {
    return split_intervals(data.sequence.length(), config.intervals);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("interval plan: ") + e.what());
  }
}

json stamp(json j, const RunConfig& config) {
  j["config_hash"] = config.hash;
  j["seed"] = config.params.seed;
  return j;
}

}  // namespace

std::string cmd_sweep(const RunConfig& config, std::optional<Task> task_override) {
  const Task task = task_override.value_or(config.task);
  const auto data = load_dataset(config.dataset);
  if (task == Task::Attribute && !data.attributes) throw ValidationError("task 'attribute' needs dataset.attributes");
  if (task == Task::ChangePoint && !data.change_points) throw ValidationError("task 'changepoint' needs dataset.change_points");
  const auto plan = plan_for(config, data);
  const auto curves = score_curves(plan, task, data, config.params);
  const std::string stem = "curves_" + std::string(task_name(task));
  write_text(config.output / (stem + ".json"), stamp(curves_to_json(curves), config).dump(2) + "\n");
  write_text(config.output / (stem + ".csv"), stamp_line(config.hash, config.params.seed) + curves_to_csv(curves));

  std::ostringstream msg;
  msg << "score curves for " << task_name(task) << " on " << data.id << " (" << plan.size() << " intervals)\n";
  for (std::size_t i = 0; i < curves.scores.size(); ++i) {
    const auto w = curve_argmax(curves.scores[i]);
    msg << "  interval " << i + 1 << " [" << plan.intervals[i].first << ", " << plan.intervals[i].last
        << "]: best w=" << w << " score=" << fmt(curves.scores[i][w - 1]) << '\n';
  }
  return msg.str();
}

std::string cmd_select(const RunConfig& config) {
  const auto data = load_dataset(config.dataset);
  const auto graphs = data.sequence.graphs();
  const std::size_t T = graphs.size();
  json selections = json::array();
  std::ostringstream msg;
  for (auto kind : config.selectors) {
    const std::string name(selector_name(kind));
    json entry{{"selector", name}};
    std::optional<Windowing> windowing;
    if (kind == SelectorKind::Online || kind == SelectorKind::OnlineWeighted || kind == SelectorKind::TrainingOnly) {
      SelectorParams sp = config.params.selector;
      if (kind == SelectorKind::Online) sp.alpha = 1.0;
      const auto params = config.params;
      OnlineWindowSelector selector(sp, [params](std::span<const StaticGraph> past, std::size_t w,
                                                 const StaticGraph& next) {
        return link_step_score(past, uniform_last_window_start(past.size(), w), next, params.katz, params.reference);
      });
      json steps = json::array();
      for (const auto& g : graphs) {
        const auto& st = selector.observe(g);
        json appended = json::array();
        for (const auto& [w, s] : st.appended) appended.push_back({w, s});
        steps.push_back({{"step", st.step}, {"tested", st.tested}, {"appended", appended}, {"chosen", st.chosen}});
      }
      entry["steps"] = steps;
      entry["width"] = selector.chosen();
      windowing = Windowing::uniform(T, selector.chosen());
    } else {
      TrainingView train{graphs, data.attributes ? &*data.attributes : nullptr, {}};
      if (data.change_points) train.change_points = *data.change_points;
      auto selection = select_offline(kind, config.task, train, TestEdges{graphs}, data.sequence.vertex_count(),
                                      config.params, cell_seed(config.params.seed, name, 0));
      if (selection.width) entry["width"] = *selection.width;
      entry["log"] = selection.log;
      windowing = selection.windowing;
    }
    std::vector<std::size_t> cuts(windowing->cuts().begin(), windowing->cuts().end());
    entry["cuts"] = cuts;
    entry["lengths"] = windowing->lengths();
    msg << name << ": " << windowing->segment_count() << " window(s)";
    if (entry.contains("width")) msg << ", w=" << entry["width"].get<std::size_t>();
    msg << '\n';
    selections.push_back(std::move(entry));
  }
  json out{{"format", "tscale-selection"},
           {"version", 1},
           {"dataset", data.id},
           {"task", task_name(config.task)},
           {"length", T},
           {"selections", selections}};
  write_text(config.output / "select.json", stamp(out, config).dump(2) + "\n");
  return msg.str();
}

std::string cmd_evaluate(const RunConfig& config) {
  const auto data = load_dataset(config.dataset);
  const auto plan = plan_for(config, data);
  auto report = config.task == Task::LinkPrediction
                    ? run_online(plan, config.selectors, data, config.params)
                    : run_offline(plan, config.selectors, config.task, data, config.params);
  report.config_hash = config.hash;
  write_text(config.output / "report.json", report_to_json(report).dump(2) + "\n");
  write_text(config.output / "report.csv", stamp_line(config.hash, config.params.seed) + report_to_csv(report));

  std::ostringstream msg;
  msg << task_name(config.task) << " on " << data.id << " (" << plan.pairs.size() << " train/test pairs, "
      << report.aggregation << " aggregate)\n";
  for (auto kind : config.selectors) {
    const std::string name(selector_name(kind));
    const auto& agg = report.aggregates.at(name);
    msg << "  " << name << ": " << (agg ? fmt(*agg) : std::string("undefined")) << '\n';
  }

  if (config.sweep) {
    const auto grid = hyperparam_sweep(config.sweep->m_values, config.sweep->b_values, config.sweep->fixed,
                                       config.sweep->selector, data, plan, config.params);
    std::ostringstream csv;
    csv << stamp_line(config.hash, config.params.seed) << "M,B,aggregate\n";
    for (const auto& cell : grid) csv << cell.min_tests << ',' << cell.top_tested << ',' << fmt(cell.aggregate) << '\n';
    write_text(config.output / "sweep.csv", csv.str());
    msg << "  hyperparameter grid: " << grid.size() << " cell(s) -> sweep.csv\n";
  }
  return msg.str();
}

// ---------------------------------------------------------------------------

std::string cmd_analyze(std::span<const fs::path> files, const fs::path& out_dir) {
  if (files.empty()) throw ValidationError("no score-curve files given");
  std::vector<ScoreCurves> curves;
  std::vector<std::string> labels;
  std::set<std::string> hashes;
  std::set<std::uint64_t> seeds;
  std::map<std::string, int> seen;
  for (const auto& path : files) {
    if (!fs::exists(path)) throw ValidationError("score-curve file not found: " + path.string());
    const auto j = read_json(path);
    try {
      curves.push_back(curves_from_json(j));
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ": malformed score-curve file: " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ": " + e.what());
    }
    hashes.insert(j.value("config_hash", std::string("unknown")));
    seeds.insert(j.value("seed", std::uint64_t{0}));
    std::string label(task_name(curves.back().task));
    if (const int k = ++seen[label]; k > 1) label += "#" + std::to_string(k);
    labels.push_back(label);
  }
  const auto& first = curves.front();
  for (std::size_t f = 1; f < curves.size(); ++f) {
    const auto& c = curves[f];
    const std::string both = files[0].string() + " and " + files[f].string();
    if (c.dataset_id != first.dataset_id) {
      throw ValidationError("refusing to mix datasets '" + first.dataset_id + "' and '" + c.dataset_id + "' (" + both + ")");
    }
    if (c.plan.size() != first.plan.size()) {
      throw ValidationError("interval counts differ (" + std::to_string(first.plan.size()) + " vs " +
                            std::to_string(c.plan.size()) + "): " + both);
    }
    if (!(c.plan == first.plan)) throw ValidationError("window-size ranges differ between " + both);
  }

  std::vector<std::string> hash_list(hashes.begin(), hashes.end());
  std::vector<std::string> seed_list;
  for (auto s : seeds) seed_list.push_back(std::to_string(s));
  const std::string header = "# config_hash=" + join(hash_list, "+") + " seed=" + join(seed_list, "+") + "\n";

  const auto matrix = cross_task_matrix(curves);
  std::ostringstream table1;
  table1 << header << "argmax_of";
  for (const auto& l : labels) table1 << ',' << l;
  table1 << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    table1 << labels[i];
    for (double x : matrix[i]) table1 << ',' << fmt(x);
    table1 << '\n';
  }
  write_text(out_dir / "table1.csv", table1.str());

  std::ostringstream sp;
  sp << header << "task_a,task_b,interval,n,rho,p\n";
  auto spearman_row = [&](std::size_t a, std::size_t b, const std::string& interval, const std::vector<double>& xs,
                          const std::vector<double>& ys) {
    sp << labels[a] << ',' << labels[b] << ',' << interval << ',' << xs.size() << ',';
    try {
      const auto r = spearman(xs, ys);
      sp << fmt(r.rho) << ',' << fmt(r.p) << '\n';
    } catch (const std::exception&) {
      sp << "undefined,undefined\n";
    }
  };
  for (std::size_t a = 0; a < curves.size(); ++a) {
    for (std::size_t b = a + 1; b < curves.size(); ++b) {
      std::vector<double> all_x, all_y;
      for (std::size_t t = 0; t < first.plan.size(); ++t) {
        std::vector<double> xs, ys;
        for (std::size_t w = 0; w < curves[a].scores[t].size(); ++w) {
          if (curves[a].scores[t][w] && curves[b].scores[t][w]) {
            xs.push_back(*curves[a].scores[t][w]);
            ys.push_back(*curves[b].scores[t][w]);
          }
        }
        all_x.insert(all_x.end(), xs.begin(), xs.end());
        all_y.insert(all_y.end(), ys.begin(), ys.end());
        spearman_row(a, b, std::to_string(t + 1), xs, ys);
      }
      spearman_row(a, b, "all", all_x, all_y);
    }
  }
  write_text(out_dir / "spearman.csv", sp.str());

  std::ostringstream stab;
  stab << header << "task,mean_abs_diff\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    stab << labels[c] << ',';
    try {
      stab << fmt(stability_diff(curves[c])) << '\n';
    } catch (const std::exception&) {
      stab << "undefined\n";
    }
  }
  write_text(out_dir / "stability.csv", stab.str());

  std::ostringstream plot;
  plot << header << "task,interval,w,score\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    for (std::size_t t = 0; t < curves[c].scores.size(); ++t) {
      for (std::size_t w = 1; w <= curves[c].scores[t].size(); ++w) {
        plot << labels[c] << ',' << t + 1 << ',' << w << ',' << fmt(curves[c].scores[t][w - 1]) << '\n';
      }
    }
  }
  write_text(out_dir / "curves.csv", plot.str());

  std::ostringstream msg;
  msg << "cross-task matrix (rows: task whose argmax picks w; columns: task scored)\n";
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    msg << "  " << labels[i] << ':';
    for (double x : matrix[i]) msg << ' ' << fmt(x);
    msg << '\n';
  }
  msg << "wrote table1.csv, spearman.csv, stability.csv, curves.csv to " << out_dir.string() << '\n';
  return msg.str();
}

std::string cmd_report(std::span<const fs::path> files, const fs::path& out_csv) {
  if (files.empty()) throw ValidationError("no report files given");
  std::vector<std::string> columns;
  std::vector<std::string> rows;
  std::map<std::pair<std::string, std::string>, std::optional<double>> values;
  std::vector<std::string> stamps;
  for (const auto& path : files) {
    if (!fs::exists(path)) throw ValidationError("report file not found: " + path.string());
    ExperimentReport report;
    try {
      report = report_from_json(read_json(path));
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ": malformed report: " + e.what());
    }
    const std::string column = report.dataset_id + "/" + std::string(task_name(report.task));
    if (std::find(columns.begin(), columns.end(), column) == columns.end()) columns.push_back(column);
    stamps.push_back(report.config_hash + ":" + std::to_string(report.seed));
    for (const auto& [selector, value] : report.aggregates) {
      if (std::find(rows.begin(), rows.end(), selector) == rows.end()) rows.push_back(selector);
      values[{selector, column}] = value;
    }
  }
  // Rows follow the registry order so tables line up across runs.
  std::vector<std::string> ordered;
  for (const auto& name : selector_names()) {
    if (std::find(rows.begin(), rows.end(), name) != rows.end()) ordered.push_back(name);
  }

  std::ostringstream csv;
  std::ostringstream msg;
  csv << "# reports=" << join(stamps, "+") << "\nselector";
  msg << "selector";
  for (const auto& c : columns) {
    csv << ',' << c;
    msg << '\t' << c;
  }
  csv << '\n';
  msg << '\n';
  for (const auto& r : ordered) {
    csv << r;
    msg << r;
    for (const auto& c : columns) {
      const auto it = values.find({r, c});
      const std::string cell = it == values.end() ? "" : (it->second ? fmt(*it->second) : "undefined");
      csv << ',' << cell;
      char buf[32];
      if (it != values.end() && it->second) {
        std::snprintf(buf, sizeof buf, "%.3f", *it->second);
        msg << '\t' << buf;
      } else {
        msg << '\t' << (cell.empty() ? "-" : cell);
      }
    }
    csv << '\n';
    msg << '\n';
  }
  if (!out_csv.empty()) write_text(out_csv, csv.str());
  return msg.str();
}

}  // namespace tscale
