#pragma once

#include <iosfwd>

namespace bftsmpc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point shared by the executable and the tests. Usage errors and bad
/// configuration return kExitConfig; failures while running return kExitRuntime.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bftsmpc::cli
