#pragma once

namespace countgraph {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace countgraph
