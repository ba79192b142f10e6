#pragma once

#include <string_view>

namespace bohmflow {

inline constexpr std::string_view kVersion = "bohmflow 0.1.0";

}  // namespace bohmflow
