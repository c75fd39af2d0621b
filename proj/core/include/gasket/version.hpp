#pragma once

namespace gasket {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kToolName = "gasket";

} // namespace gasket
