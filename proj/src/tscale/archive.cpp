#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tscale/errors.hpp"
#include "tscale/graph.hpp"

namespace tscale {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr const char* kFormat = "tscale-archive";
constexpr int kVersion = 1;
}  // namespace

void write_archive(const GraphSequence& seq, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create archive directory " + dir.string() + ": " + ec.message());

  json manifest;
  manifest["format"] = kFormat;
  manifest["version"] = kVersion;
  manifest["n"] = seq.vertex_count();
  manifest["T"] = seq.length();
  manifest["resolution"] = seq.resolution();
  manifest["origin"] = seq.origin();
  manifest["labels"] = seq.labels().labels();
  manifest["edges_file"] = "edges.tsv";
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
  }
  std::ofstream out(dir / "edges.tsv", std::ios::binary);
  if (!out) throw IoError("cannot write " + (dir / "edges.tsv").string());
  out << "step\tu\tv\n";
  for (std::size_t i = 0; i < seq.length(); ++i) {
    for (const auto& e : seq.graphs()[i].edges()) out << (i + 1) << '\t' << e.u << '\t' << e.v << '\n';
  }
  if (!out) throw IoError("write failed for " + (dir / "edges.tsv").string());
}

GraphSequence read_archive(const fs::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream min(manifest_path);
  if (!min) throw IoError("cannot open archive manifest " + manifest_path.string());
  json manifest;
  try {
    manifest = json::parse(min);
  } catch (const json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what(), 0);
  }
  if (manifest.value("format", "") != kFormat) throw ParseError(manifest_path.string() + ": not a tscale archive", 0);
  if (manifest.value("version", 0) != kVersion) throw ParseError(manifest_path.string() + ": unsupported archive version", 0);

  const auto n = manifest.at("n").get<std::size_t>();
  const auto steps = manifest.at("T").get<std::size_t>();
  const auto resolution = manifest.at("resolution").get<Timestamp>();
  const auto origin = manifest.value("origin", Timestamp{0});
  LabelTable labels(manifest.value("labels", std::vector<std::string>{}));

  const auto edges_path = dir / manifest.value("edges_file", std::string("edges.tsv"));
  std::ifstream ein(edges_path);
  if (!ein) throw IoError("cannot open " + edges_path.string());
  std::vector<std::vector<Edge>> per_step(steps);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ein, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::istringstream fields(line);
    std::size_t step = 0;
    VertexId u = 0;
    VertexId v = 0;
    if (!(fields >> step >> u >> v)) throw ParseError(edges_path.string() + ": malformed row", line_no);
    if (step < 1 || step > steps) throw ParseError(edges_path.string() + ": step out of range", line_no);
    if (u >= n || v >= n || u == v) throw ParseError(edges_path.string() + ": bad edge", line_no);
    per_step[step - 1].push_back(make_edge(u, v));
  }
  std::vector<StaticGraph> graphs;
  graphs.reserve(steps);
  for (auto& edges : per_step) graphs.emplace_back(n, std::move(edges));
  return GraphSequence(n, std::move(graphs), resolution, origin, std::move(labels));
}

}  // namespace tscale
