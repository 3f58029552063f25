#include "countgraph/matrix.hpp"

namespace countgraph {

std::vector<std::string> default_column_names(int p) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) names.push_back("c" + std::to_string(j));
  return names;
}

}  // namespace countgraph
