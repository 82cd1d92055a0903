#pragma once

namespace mddkit {

inline constexpr const char* k_version = "0.1.0";

}  // namespace mddkit
