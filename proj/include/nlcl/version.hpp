#pragma once

namespace nlcl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nlcl
