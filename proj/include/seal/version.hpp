#pragma once

namespace seal {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace seal
