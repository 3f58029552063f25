#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "countgraph/graph.hpp"
#include "countgraph/matrix.hpp"
#include "countgraph/wald.hpp"

namespace countgraph {

// Counts matrix: TSV, first row column names, cells base-10 nonnegative
// integers. Parse failures throw IoError naming the line.
CountMatrix read_counts_tsv(const std::string& path);
void write_counts_tsv(const std::string& path, const CountMatrix& matrix);

// Real-valued TSV with the same layout (preprocess input).
std::pair<Eigen::MatrixXd, std::vector<std::string>> read_real_tsv(const std::string& path);

// Edge list: one `u<TAB>v` per line with u < v, 0-based, sorted
// lexicographically.
std::vector<std::pair<int, int>> read_edge_list(const std::string& path);
void write_edge_list(const std::string& path, const UndirectedGraph& graph);
UndirectedGraph graph_from_edges(const std::vector<std::pair<int, int>>& edges, int p);

// Trace: JSON lines, one TestOutcome per line in canonical trace order.
// Degenerate outcomes carry null z / p.
void write_trace_jsonl(const std::string& path, const std::vector<TestOutcome>& trace);

// Locale-proof fixed-precision formatting ('.' decimal separator always).
std::string format_double(double value, int precision = 6);

}  // namespace countgraph
