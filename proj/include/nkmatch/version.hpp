#pragma once

namespace nkmatch {
inline constexpr const char* kVersion = "0.1.0";
}
