#pragma once

// Command-line driver. Exit codes: 0 success, 1 usage error, 2 infeasible
// or unsupported initialization, 3 I/O or instance schema error, 4 oracle
// batch failure.

#include <ostream>
#include <string>
#include <vector>

namespace gtv {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int init_failed = 2;
inline constexpr int io_error = 3;
inline constexpr int check_failed = 4;
}  // namespace exit_code

/// Entry point used by the executable and by tests. GRAVER_TV_SEED, when set,
/// overrides --seed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gtv
