#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace memsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Seed used when neither the flag nor the input provides one.
inline constexpr std::uint64_t kDefaultSeed = 20250101;

/// Environment variable holding the default worker count.
inline constexpr const char* kWorkersEnv = "MEMSIM_WORKERS";

/// Bad flag combinations detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int default_workers();

/// Calls fn(i) for i in [0, n) on up to `workers` threads. If any call throws,
/// the exception of the lowest failing index is rethrown after all finish.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// "%06d" frame file stem.
std::string frame_stem(std::int64_t frame_id);

/// Parses "WxH".
std::pair<int, int> parse_resolution(const std::string& s);

// Subcommand registration; each returns the callback run after parsing.
using Action = std::function<int(Streams)>;
Action register_simulate(CLI::App& app);
Action register_render_depth(CLI::App& app);
Action register_ingest(CLI::App& app);
Action register_normalize(CLI::App& app);
Action register_mix(CLI::App& app);
Action register_split(CLI::App& app);
Action register_augment(CLI::App& app);
Action register_stats(CLI::App& app);
Action register_evaluate(CLI::App& app);

}  // namespace memsim::cli
