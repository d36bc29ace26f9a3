#include "tscale/tscale.h"

#include <exception>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>
#include <vector>

#include "tscale/changepoint.hpp"
#include "tscale/commands.hpp"
#include "tscale/errors.hpp"
#include "tscale/linkpred.hpp"
#include "tscale/metrics.hpp"
#include "tscale/selectors.hpp"

struct tscale_sequence {
  tscale::GraphSequence seq;
};

struct tscale_windowing {
  tscale::Windowing w;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_output;

template <class F>
tscale_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return TSCALE_OK;
  } catch (const tscale::ValidationError& e) {
    last_error = e.what();
    return TSCALE_ERR_VALIDATION;
  } catch (const tscale::ParseError& e) {
    last_error = e.what();
    return TSCALE_ERR_VALIDATION;
  } catch (const tscale::UndefinedMetric& e) {
    last_error = e.what();
    return TSCALE_ERR_UNDEFINED;
  } catch (const std::invalid_argument& e) {
    last_error = e.what();
    return TSCALE_ERR_ARGUMENT;
  } catch (const std::out_of_range& e) {
    last_error = e.what();
    return TSCALE_ERR_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TSCALE_ERR_RUNTIME;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TSCALE_ERR_RUNTIME;
  } catch (...) {
    last_error = "unknown error";
    return TSCALE_ERR_RUNTIME;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " is null");
}

std::vector<std::filesystem::path> paths_of(const char* const* paths, size_t count) {
  if (count > 0) require(paths, "path list");
  std::vector<std::filesystem::path> out;
  for (size_t i = 0; i < count; ++i) {
    require(paths[i], "path");
    out.emplace_back(paths[i]);
  }
  return out;
}

tscale::RunConfig config_with(const char* path, const char* overrides) {
  require(path, "config path");
  std::optional<nlohmann::json> patch;
  if (overrides) {
    try {
      patch = nlohmann::json::parse(overrides);
    } catch (const nlohmann::json::parse_error& e) {
      throw tscale::ValidationError(std::string("invalid override JSON: ") + e.what());
    }
  }
  return tscale::load_config(path, patch);
}

}  // namespace

extern "C" {

const char* tscale_version(void) { return "0.3.0"; }
const char* tscale_last_error(void) { return last_error.c_str(); }
const char* tscale_last_output(void) { return last_output.c_str(); }

int tscale_exit_code(tscale_status status) {
  switch (status) {
    case TSCALE_OK:
      return 0;
    case TSCALE_ERR_VALIDATION:
    case TSCALE_ERR_ARGUMENT:
      return 1;
    default:
      return 2;
  }
}

tscale_status tscale_sequence_load_edges(const char* path, int64_t resolution, char delimiter, int has_origin,
                                         int64_t origin, tscale_sequence** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    tscale::DatasetConfig config;
    config.edges.emplace_back(path);
    config.resolution = resolution;
    config.delimiter = delimiter;
    if (has_origin) config.origin = origin;
    if (!std::filesystem::exists(config.edges.front())) throw tscale::ValidationError(std::string("file not found: ") + path);
    *out = new tscale_sequence{tscale::load_dataset(config).sequence};
  });
}

tscale_status tscale_sequence_load_archive(const char* dir, tscale_sequence** out) {
  return guard([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new tscale_sequence{tscale::read_archive(dir)};
  });
}

tscale_status tscale_sequence_save_archive(const tscale_sequence* seq, const char* dir) {
  return guard([&] {
    require(seq, "sequence");
    require(dir, "dir");
    tscale::write_archive(seq->seq, dir);
  });
}

size_t tscale_sequence_length(const tscale_sequence* seq) { return seq ? seq->seq.length() : 0; }
size_t tscale_sequence_vertex_count(const tscale_sequence* seq) { return seq ? seq->seq.vertex_count() : 0; }

tscale_status tscale_sequence_edge_count(const tscale_sequence* seq, size_t step, size_t* out) {
  return guard([&] {
    require(seq, "sequence");
    require(out, "out");
    *out = seq->seq.at(step).edge_count();
  });
}

void tscale_sequence_free(tscale_sequence* seq) { delete seq; }

tscale_status tscale_windowing_uniform(size_t length, size_t width, tscale_windowing** out) {
  return guard([&] {
    require(out, "out");
    *out = new tscale_windowing{tscale::Windowing::uniform(length, width)};
  });
}

tscale_status tscale_windowing_random(size_t length, uint64_t seed, tscale_windowing** out) {
  return guard([&] {
    require(out, "out");
    *out = new tscale_windowing{tscale::random_windowing(length, seed)};
  });
}

size_t tscale_windowing_length(const tscale_windowing* w) { return w ? w->w.length() : 0; }
size_t tscale_windowing_segment_count(const tscale_windowing* w) { return w ? w->w.segment_count() : 0; }

tscale_status tscale_windowing_segment(const tscale_windowing* w, size_t index, size_t* first, size_t* last) {
  return guard([&] {
    require(w, "windowing");
    require(first, "first");
    require(last, "last");
    const auto s = w->w.segment(index);
    *first = s.first;
    *last = s.last;
  });
}

void tscale_windowing_free(tscale_windowing* w) { delete w; }

tscale_status tscale_select_fourier(const tscale_sequence* seq, size_t* width) {
  return guard([&] {
    require(seq, "sequence");
    require(width, "width");
    *width = tscale::fourier_select(seq->seq);
  });
}

tscale_status tscale_select_jaccard(const tscale_sequence* seq, double tau, size_t* width) {
  return guard([&] {
    require(seq, "sequence");
    require(width, "width");
    *width = tscale::jaccard_select(seq->seq, tau);
  });
}

tscale_status tscale_select_adage(const tscale_sequence* seq, double epsilon, size_t consecutive, size_t* width) {
  return guard([&] {
    require(seq, "sequence");
    require(width, "width");
    *width = tscale::adage_select(seq->seq, tscale::AdageOptions{epsilon, consecutive});
  });
}

tscale_status tscale_select_entropy(const tscale_sequence* seq, tscale_windowing** out) {
  return guard([&] {
    require(seq, "sequence");
    require(out, "out");
    *out = new tscale_windowing{tscale::entropy_select(seq->seq)};
  });
}

tscale_status tscale_graphscope_detect(const tscale_sequence* seq, const tscale_windowing* windowing, size_t* times,
                                       size_t capacity, size_t* count) {
  return guard([&] {
    require(seq, "sequence");
    require(windowing, "windowing");
    require(count, "count");
    if (capacity > 0) require(times, "times");
    const auto result = tscale::graphscope_detect(tscale::apply_windowing(seq->seq, windowing->w));
    *count = result.times.size();
    for (size_t i = 0; i < result.times.size() && i < capacity; ++i) times[i] = result.times[i];
  });
}

tscale_status tscale_link_step_score(const tscale_sequence* seq, size_t first, size_t last, size_t next, double beta,
                                     double* score, int* skipped) {
  return guard([&] {
    require(seq, "sequence");
    require(score, "score");
    require(skipped, "skipped");
    const auto T = seq->seq.length();
    if (first < 1 || first > last || last >= next || next > T) {
      throw std::out_of_range("need 1 <= first <= last < next <= length");
    }
    tscale::KatzParams params;
    params.beta = beta;
    const auto past = seq->seq.graphs().first(last);
    const auto s = tscale::link_step_score(past, first - 1, seq->seq.at(next), params);
    *skipped = s ? 0 : 1;
    *score = s.value_or(0.0);
  });
}

tscale_status tscale_cp_pr_auc(const size_t* proposed, size_t k, const size_t* truth, size_t l, size_t n, double* out) {
  return guard([&] {
    require(out, "out");
    if (k > 0) require(proposed, "proposed");
    if (l > 0) require(truth, "truth");
    *out = tscale::cp_pr_auc(std::span<const size_t>(proposed, k), std::span<const size_t>(truth, l), n);
  });
}

tscale_status tscale_roc_auc(const double* scores, const uint8_t* positive, size_t count, double* out) {
  return guard([&] {
    require(out, "out");
    if (count > 0) {
      require(scores, "scores");
      require(positive, "positive");
    }
    std::vector<tscale::ScoredLabel> items;
    items.reserve(count);
    for (size_t i = 0; i < count; ++i) items.push_back(tscale::ScoredLabel{scores[i], positive[i] != 0});
    *out = tscale::roc_auc(items);
  });
}

tscale_status tscale_average_precision(const uint8_t* relevance, size_t count, size_t total_positives, double* out) {
  return guard([&] {
    require(out, "out");
    if (count > 0) require(relevance, "relevance");
    *out = tscale::average_precision(std::span<const uint8_t>(relevance, count), total_positives);
  });
}

tscale_status tscale_cmd_ingest(const char* const* paths, size_t count, int64_t resolution, char delimiter,
                                int has_origin, int64_t origin, const char* out_dir) {
  return guard([&] {
    require(out_dir, "output directory");
    const auto inputs = paths_of(paths, count);
    last_output = tscale::cmd_ingest(inputs, resolution, delimiter,
                                     has_origin ? std::optional<int64_t>(origin) : std::nullopt, out_dir);
  });
}

tscale_status tscale_cmd_sweep(const char* config_path, const char* task, const char* overrides) {
  return guard([&] {
    const auto config = config_with(config_path, overrides);
    std::optional<tscale::Task> override_task;
    if (task) {
      override_task = tscale::parse_task(task);
      if (!override_task) throw tscale::ValidationError(std::string("unknown task '") + task + "'");
    }
    last_output = tscale::cmd_sweep(config, override_task);
  });
}

tscale_status tscale_cmd_select(const char* config_path, const char* overrides) {
  return guard([&] { last_output = tscale::cmd_select(config_with(config_path, overrides)); });
}

tscale_status tscale_cmd_evaluate(const char* config_path, const char* overrides) {
  return guard([&] { last_output = tscale::cmd_evaluate(config_with(config_path, overrides)); });
}

tscale_status tscale_cmd_analyze(const char* const* curve_paths, size_t count, const char* out_dir) {
  return guard([&] {
    require(out_dir, "output directory");
    last_output = tscale::cmd_analyze(paths_of(curve_paths, count), out_dir);
  });
}

tscale_status tscale_cmd_report(const char* const* report_paths, size_t count, const char* out_csv) {
  return guard([&] {
    last_output = tscale::cmd_report(paths_of(report_paths, count), out_csv ? out_csv : "");
  });
}

}  // extern "C"
