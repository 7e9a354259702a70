#pragma once

namespace scatterkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace scatterkit
