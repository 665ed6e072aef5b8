#ifndef QUASIMIX_TOOLS_CLI_H_
#define QUASIMIX_TOOLS_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace quasimix::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  std::string group = "a5";
  int m = 4;
  int k = 3;
  int parties = 2;
  std::uint64_t seed = 1;
  double tol = 1e-9;  // irrep numerical tolerance
  int max_steps = 6;
  std::optional<double> target_eps;  // default |H|^{-m}
  std::string output;
  std::string engine = "auto";
  std::string mode;  // boost: self-square | fresh-copy; repair: paper-formula | adaptive
  std::string input = "box";  // box, or a dist file
  std::optional<int> d;       // flatten: quasirandomness degree, measured when absent
  double delta = 1e-9;
  std::string which = "all";
  bool no_cache = false;
  std::string cache_dir;  // overrides QUASIMIX_CACHE_DIR
  bool timing = false;
  bool strict = false;
};

// Parses argv (config file defaults, flags override) and runs one
// subcommand. Returns 0 iff every asserted check held.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quasimix::cli

#endif  // QUASIMIX_TOOLS_CLI_H_
