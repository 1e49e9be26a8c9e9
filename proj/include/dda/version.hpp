#pragma once

namespace dda {

inline const char* version_string() { return "0.1.0"; }

}  // namespace dda
