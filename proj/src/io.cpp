#include "countgraph/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "countgraph/errors.hpp"

namespace countgraph {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

int parse_count_cell(const std::string& cell, const std::string& path, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || value < 0)
    throw IoError(path + ":" + std::to_string(line_no) + ": cell '" + cell +
                  "' is not a nonnegative integer");
  return value;
}

}  // namespace

CountMatrix read_counts_tsv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) throw IoError(path + ": expected a header row and at least one data row");

  CountMatrix out;
  out.names = split_tabs(lines[0]);
  const std::size_t p = out.names.size();
  if (p < 1) throw IoError(path + ":1: empty header");

  out.counts.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(p));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_tabs(lines[i]);
    if (cells.size() != p)
      throw IoError(path + ":" + std::to_string(i + 1) + ": expected " + std::to_string(p) +
                    " cells, found " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < p; ++j)
      out.counts(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j)) =
          parse_count_cell(cells[j], path, i + 1);
  }
  return out;
}

void write_counts_tsv(const std::string& path, const CountMatrix& matrix) {
  std::ofstream outf(path);
  if (!outf) throw IoError("cannot write '" + path + "'");
  for (std::size_t j = 0; j < matrix.names.size(); ++j) {
    if (j) outf << '\t';
    outf << matrix.names[j];
  }
  outf << '\n';
  for (Eigen::Index i = 0; i < matrix.counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.counts.cols(); ++j) {
      if (j) outf << '\t';
      outf << matrix.counts(i, j);
    }
    outf << '\n';
  }
  if (!outf) throw IoError("failed writing '" + path + "'");
}

std::pair<Eigen::MatrixXd, std::vector<std::string>> read_real_tsv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) throw IoError(path + ": expected a header row and at least one data row");

  const auto names = split_tabs(lines[0]);
  const std::size_t p = names.size();
  Eigen::MatrixXd values(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(p));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_tabs(lines[i]);
    if (cells.size() != p)
      throw IoError(path + ":" + std::to_string(i + 1) + ": expected " + std::to_string(p) +
                    " cells, found " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < p; ++j) {
      double v = 0.0;
      const auto& cell = cells[j];
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw IoError(path + ":" + std::to_string(i + 1) + ": cell '" + cell +
                      "' is not a finite number");
      values(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return {values, names};
}

std::vector<std::pair<int, int>> read_edge_list(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = split_tabs(lines[i]);
    if (cells.size() != 2)
      throw IoError(path + ":" + std::to_string(i + 1) + ": expected 'u<TAB>v'");
    const int u = parse_count_cell(cells[0], path, i + 1);
    const int v = parse_count_cell(cells[1], path, i + 1);
    if (u == v) throw IoError(path + ":" + std::to_string(i + 1) + ": self-loop");
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

void write_edge_list(const std::string& path, const UndirectedGraph& graph) {
  std::ofstream outf(path);
  if (!outf) throw IoError("cannot write '" + path + "'");
  for (const auto& [u, v] : graph.edges()) outf << u << '\t' << v << '\n';
  if (!outf) throw IoError("failed writing '" + path + "'");
}

UndirectedGraph graph_from_edges(const std::vector<std::pair<int, int>>& edges, int p) {
  UndirectedGraph g(p);
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

void write_trace_jsonl(const std::string& path, const std::vector<TestOutcome>& trace) {
  std::ofstream outf(path);
  if (!outf) throw IoError("cannot write '" + path + "'");
  for (const auto& t : trace) {
    nlohmann::json j;
    j["level"] = t.level();
    j["response"] = t.response;
    j["tested"] = t.tested;
    j["cond"] = t.cond_set;
    if (std::isfinite(t.z)) j["z"] = t.z; else j["z"] = nullptr;
    if (std::isfinite(t.p_value)) j["p"] = t.p_value; else j["p"] = nullptr;
    j["rejected"] = t.rejected;
    j["degenerate"] = t.degenerate;
    outf << j.dump() << '\n';
  }
  if (!outf) throw IoError("failed writing '" + path + "'");
}

std::string format_double(double value, int precision) {
  if (std::isnan(value)) return "NA";
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss.setf(std::ios::fixed);
  ss.precision(precision);
  ss << value;
  return ss.str();
}

}  // namespace countgraph
