#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "tscale/errors.hpp"
#include "tscale/graph.hpp"

namespace tscale {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  if (delimiter == ' ') {
    std::size_t pos = 0;
    while (pos < line.size()) {
      pos = line.find_first_not_of(" \t\r", pos);
      if (pos == std::string_view::npos) break;
      auto end = line.find_first_of(" \t\r", pos);
      if (end == std::string_view::npos) end = line.size();
      fields.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return fields;
  }
  std::size_t pos = 0;
  while (true) {
    const auto end = line.find(delimiter, pos);
    fields.push_back(trim(line.substr(pos, end == std::string_view::npos ? end : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return fields;
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

bool is_missing(std::string_view v) { return v.empty() || v == "?" || v == "NA" || v == "nan"; }

}  // namespace

ParsedEdges parse_edge_stream(std::istream& in, const EdgeListFormat& format, LabelTable labels) {
  ParsedEdges out;
  out.labels = std::move(labels);
  const std::size_t needed =
      std::max({format.src_column, format.dst_column, format.time_column}) + 1;
  std::string line;
  std::size_t line_no = 0;
  std::size_t first_loop_line = 0;
  std::size_t loops = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split(line, format.delimiter);
    if (fields.size() < needed) {
      throw ParseError("expected at least " + std::to_string(needed) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const auto src = fields[format.src_column];
    const auto dst = fields[format.dst_column];
    const auto ts = fields[format.time_column];
    if (src.empty() || dst.empty()) throw ParseError("empty vertex label", line_no);
    Timestamp t = 0;
    const auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), t);
    if (ec != std::errc{} || ptr != ts.data() + ts.size()) {
      throw ParseError("malformed timestamp '" + std::string(ts) + "'", line_no);
    }
    if (t < 0) throw ParseError("negative timestamp " + std::to_string(t), line_no);
    if (src == dst) {
      if (loops++ == 0) first_loop_line = line_no;
      continue;
    }
    const auto u = out.labels.intern(src);
    const auto v = out.labels.intern(dst);
    out.events.push_back(EdgeEvent{u, v, t});
  }
  if (loops > 0) {
    throw ParseError("self-loop rejected (" + std::to_string(loops) + " self-loop line" +
                         (loops == 1 ? "" : "s") + " in input)",
                     first_loop_line);
  }
  return out;
}

ParsedEdges parse_edge_stream(std::string_view text, const EdgeListFormat& format) {
  std::istringstream in{std::string(text)};
  return parse_edge_stream(in, format);
}

VertexAttributes::VertexAttributes(std::size_t n, std::vector<FeatureColumn> features,
                                   std::string target_name, std::vector<std::int8_t> target,
                                   std::string negative_value, std::string positive_value)
    : features_(std::move(features)), target_name_(std::move(target_name)),
      target_(std::move(target)), negative_value_(std::move(negative_value)),
      positive_value_(std::move(positive_value)) {
  if (target_.size() != n) throw std::invalid_argument("target vector size mismatch");
  for (const auto& f : features_) {
    const auto size = f.kind == FeatureKind::Categorical ? f.codes.size() : f.values.size();
    if (size != n) throw std::invalid_argument("feature '" + f.name + "' size mismatch");
  }
}

std::vector<VertexId> VertexAttributes::labeled_vertices() const {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < target_.size(); ++v) {
    if (target_[v] != kUnknown) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

VertexAttributes VertexAttributes::with_swapped_target() const {
  auto copy = *this;
  for (auto& t : copy.target_) {
    if (t != kUnknown) t = static_cast<std::int8_t>(1 - t);
  }
  std::swap(copy.negative_value_, copy.positive_value_);
  return copy;
}

VertexAttributes load_attributes(std::istream& in, const std::string& target,
                                 const LabelTable& labels, const AttributeSchema& schema) {
  const std::size_t n = labels.size();
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::map<std::string, FeatureKind> declared;
  for (const auto& c : schema.continuous) declared[c] = FeatureKind::Continuous;
  std::vector<std::string> schema_line;

  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.rfind("#schema", 0) == 0) {
      for (auto f : split(t.substr(7), schema.delimiter)) {
        if (!f.empty()) schema_line.emplace_back(f);
      }
      continue;
    }
    if (skippable(line)) continue;
    for (auto f : split(line, schema.delimiter)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw ParseError("attribute file has no header row", line_no);
  if (!schema_line.empty() && schema_line.size() != header.size()) {
    throw ParseError("#schema line has " + std::to_string(schema_line.size()) +
                         " entries for " + std::to_string(header.size()) + " columns",
                     0);
  }
  for (std::size_t c = 1; c < schema_line.size(); ++c) {
    const auto& kind = schema_line[c];
    if (kind == "continuous" || kind == "cont") {
      declared[header[c]] = FeatureKind::Continuous;
    } else if (kind == "categorical" || kind == "cat") {
      declared.emplace(header[c], FeatureKind::Categorical);
    } else {
      throw ParseError("unknown column type '" + kind + "' in #schema line", 0);
    }
  }
  const auto target_it = std::find(header.begin() + 1, header.end(), target);
  if (target_it == header.end()) throw ValidationError("target attribute '" + target + "' not found in header");
  const auto target_col = static_cast<std::size_t>(target_it - header.begin());

  std::vector<FeatureColumn> features;
  std::vector<std::size_t> feature_col;
  std::vector<std::map<std::string, int>> dictionaries;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (c == target_col) continue;
    FeatureColumn col;
    col.name = header[c];
    auto it = declared.find(col.name);
    col.kind = it == declared.end() ? FeatureKind::Categorical : it->second;
    if (col.kind == FeatureKind::Categorical) {
      col.codes.assign(n, -1);
    } else {
      col.values.assign(n, std::numeric_limits<double>::quiet_NaN());
    }
    features.push_back(std::move(col));
    feature_col.push_back(c);
    dictionaries.emplace_back();
  }
  std::vector<std::vector<std::string>> raw_categories(features.size());
  for (std::size_t f = 0; f < features.size(); ++f) {
    if (features[f].kind == FeatureKind::Categorical) raw_categories[f].resize(n);
  }

  std::vector<std::string> raw_target(n);
  std::vector<bool> seen(n, false);
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split(line, schema.delimiter);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const auto id = labels.find(fields[0]);
    if (!id) throw ValidationError("line " + std::to_string(line_no) + ": unknown vertex label '" + std::string(fields[0]) + "'");
    if (seen[*id]) throw ParseError("duplicate record for vertex '" + std::string(fields[0]) + "'", line_no);
    seen[*id] = true;
    if (!is_missing(fields[target_col])) raw_target[*id] = std::string(fields[target_col]);
    for (std::size_t f = 0; f < features.size(); ++f) {
      const auto value = fields[feature_col[f]];
      if (is_missing(value)) continue;
      auto& col = features[f];
      if (col.kind == FeatureKind::Continuous) {
        double x = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
          throw ParseError("column '" + col.name + "': not a number '" + std::string(value) + "'", line_no);
        }
        col.values[*id] = x;
      } else {
        dictionaries[f].emplace(std::string(value), 0);
        raw_categories[f][*id] = std::string(value);
      }
    }
  }

  // Category codes follow sorted order so that the assignment does not depend
  // on record order.
  for (std::size_t f = 0; f < features.size(); ++f) {
    auto& col = features[f];
    if (col.kind != FeatureKind::Categorical) continue;
    int code = 0;
    for (auto& [value, c] : dictionaries[f]) {
      c = code++;
      col.categories.push_back(value);
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (!raw_categories[f][v].empty()) col.codes[v] = dictionaries[f].at(raw_categories[f][v]);
    }
  }
  std::set<std::string> classes;
  for (const auto& t : raw_target) {
    if (!t.empty()) classes.insert(t);
  }
  if (classes.size() > 2) {
    throw ValidationError("target attribute '" + target + "' is not binary (" +
                          std::to_string(classes.size()) + " distinct values)");
  }
  std::string negative = classes.empty() ? "" : *classes.begin();
  std::string positive = classes.size() == 2 ? *classes.rbegin() : "";
  if (schema.positive) {
    if (classes.count(*schema.positive) == 0 && classes.size() == 2) {
      throw ValidationError("positive value '" + *schema.positive + "' does not occur in target");
    }
    if (classes.size() == 2 && *schema.positive == negative) std::swap(negative, positive);
    if (classes.size() < 2) {
      positive = *schema.positive;
      if (negative == positive) negative.clear();
    }
  } else if (classes.size() == 1) {
    positive = negative;
    negative.clear();
  }
  std::vector<std::int8_t> tgt(n, VertexAttributes::kUnknown);
  for (std::size_t v = 0; v < n; ++v) {
    if (raw_target[v].empty()) continue;
    tgt[v] = raw_target[v] == positive ? 1 : 0;
  }
  return VertexAttributes(n, std::move(features), target, std::move(tgt), negative, positive);
}

VertexAttributes load_attributes(std::string_view text, const std::string& target,
                                 const LabelTable& labels, const AttributeSchema& schema) {
  std::istringstream in{std::string(text)};
  return load_attributes(in, target, labels, schema);
}

ChangePointLabels parse_change_points(std::istream& in, std::size_t length) {
  ChangePointLabels out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto t = trim(line);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
      throw ParseError("malformed change point '" + std::string(t) + "'", line_no);
    }
    if (value < 1 || value > length) {
      throw ParseError("change point " + std::to_string(value) + " outside 1.." + std::to_string(length), line_no);
    }
    if (!out.times.empty() && value <= out.times.back()) {
      throw ParseError("change points must be strictly increasing", line_no);
    }
    out.times.push_back(value);
  }
  return out;
}

ChangePointLabels parse_change_points(std::string_view text, std::size_t length) {
  std::istringstream in{std::string(text)};
  return parse_change_points(in, length);
}

}  // namespace tscale
